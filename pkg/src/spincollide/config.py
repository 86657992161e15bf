"""Experiment configuration: flat key = value files, validation, presets.

Config files use `section.key = value` lines (sections chain., noise.,
ensemble., init., analysis., output.); '#' starts a comment. Unknown keys
are errors. Every key can be overridden by an environment variable named
SPINCOLLIDE_<SECTION>_<KEY> (dots become underscores, uppercased).
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis, rank
from .errors import ParameterError
from .hamiltonian import ChainSpec
from .noise import NoiseSpec
from .plateaus import PlateauConfig
from .trajectories import ENTROPY_MODES, EnsembleSpec

ENV_PREFIX = "SPINCOLLIDE_"

INITIAL_PRESETS = ("single_center", "two_separated", "two_adjacent",
                   "domain_wall", "explicit_sites")

_OBSERVABLE_NAMES = ("ipr", "ier", "imb", "svn", "sites")


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text):
    return tuple(int(x) for x in text.split(",") if x.strip())


def _parse_str_list(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


# key -> (parser, default); REQUIRED means the key must be present
REQUIRED = object()

SCHEMA = {
    "chain.n_sites": (int, REQUIRED),
    "chain.j": (float, 1.0),
    "chain.delta": (float, 0.0),
    "chain.h": (float, 0.0),
    "chain.disorder_seed": (int, 1),
    "noise.nu": (float, 100.0),
    "noise.rc": (float, 0.0),
    "noise.seed": (int, 2),
    "ensemble.n_traj": (int, 100),
    "ensemble.dt": (float, 0.02),
    "ensemble.t_final": (float, 30.0),
    "ensemble.master_seed": (int, 3),
    "ensemble.entropy_mode": (str, "per-trajectory-average"),
    "ensemble.cut": (int, None),
    "init.preset": (str, REQUIRED),
    "init.n_exc": (int, None),
    "init.sites": (_parse_int_list, None),
    "analysis.window": (int, 25),
    "analysis.slope": (float, 0.002),
    "analysis.dmin": (float, 1.0),
    "analysis.floor": (float, 0.0),
    "output.observables": (_parse_str_list, ("auto",)),
    "output.eigenvalues": (_parse_bool, False),
}


@dataclass
class ExperimentConfig:
    """Validated flat configuration for one simulation run."""

    values: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def n_exc(self) -> int:
        preset = self.values["init.preset"]
        if preset == "single_center":
            return 1
        if preset in ("two_separated", "two_adjacent"):
            return 2
        if preset == "domain_wall":
            return self.values["init.n_exc"]
        return len(self.values["init.sites"])

    def chain_spec(self) -> ChainSpec:
        v = self.values
        return ChainSpec(n_sites=v["chain.n_sites"], j=v["chain.j"],
                         delta=v["chain.delta"], h=v["chain.h"],
                         disorder_seed=v["chain.disorder_seed"])

    def noise_spec(self) -> NoiseSpec:
        v = self.values
        return NoiseSpec(nu=v["noise.nu"], rc=v["noise.rc"], noise_seed=v["noise.seed"])

    def ensemble_spec(self) -> EnsembleSpec:
        v = self.values
        return EnsembleSpec(n_traj=v["ensemble.n_traj"], dt=v["ensemble.dt"],
                            t_final=v["ensemble.t_final"],
                            master_seed=v["ensemble.master_seed"],
                            entropy_mode=v["ensemble.entropy_mode"],
                            bipartition_cut=v["ensemble.cut"])

    def plateau_config(self) -> PlateauConfig:
        v = self.values
        return PlateauConfig(window=v["analysis.window"], slope=v["analysis.slope"],
                             d_min=v["analysis.dmin"], floor=v["analysis.floor"])

    def observables(self) -> tuple:
        sel = self.values["output.observables"]
        if sel == ("auto",):
            out = ["ier", "sites", "imb"]
            if self.n_exc == 1:
                out.insert(0, "ipr")
            if self.values["ensemble.cut"] is not None:
                out.append("svn")
            return tuple(out)
        return sel


def _env_name(key: str) -> str:
    return ENV_PREFIX + key.replace(".", "_").upper()


def validate_config(values: dict) -> ExperimentConfig:
    """Check types already parsed; enforce cross-field invariants."""
    v = values
    if v["noise.rc"] < 0:
        raise ParameterError("noise.rc must be >= 0")
    if v["noise.nu"] < 0:
        raise ParameterError("noise.nu must be >= 0")
    if v["chain.h"] < 0:
        raise ParameterError("chain.h must be >= 0")
    preset = v["init.preset"]
    if preset not in INITIAL_PRESETS:
        raise ParameterError(f"init.preset must be one of {INITIAL_PRESETS}, got {preset!r}")
    if preset == "domain_wall" and not v["init.n_exc"]:
        raise ParameterError("init.n_exc is required for init.preset = domain_wall")
    if preset == "explicit_sites" and not v["init.sites"]:
        raise ParameterError("init.sites is required for init.preset = explicit_sites")
    if v["ensemble.entropy_mode"] not in ENTROPY_MODES:
        raise ParameterError(f"ensemble.entropy_mode must be one of {ENTROPY_MODES}")
    n = v["chain.n_sites"]
    cut = v["ensemble.cut"]
    if cut is not None and not 0 < cut < n:
        raise ParameterError(f"ensemble.cut must be in (0, {n}), got {cut}")
    for name in v["output.observables"]:
        if name not in _OBSERVABLE_NAMES + ("auto",):
            raise ParameterError(f"unknown observable {name!r} in output.observables")
    cfg = ExperimentConfig(values=dict(values))
    q = cfg.n_exc
    if not 0 <= q <= n:
        raise ParameterError(f"initial state needs {q} excitations but chain has {n} sites")
    if preset == "explicit_sites":
        for s in v["init.sites"]:
            if not 1 <= s <= n:
                raise ParameterError(f"init.sites entry {s} outside 1..{n}")
        if len(set(v["init.sites"])) != q:
            raise ParameterError("init.sites entries must be distinct")
    if "svn" in cfg.observables() and cut is None:
        raise ParameterError("svn observable requires ensemble.cut")
    return cfg


def config_from_dict(overrides: dict, use_env: bool = False) -> ExperimentConfig:
    """Build a config from already-typed values on top of schema defaults."""
    values = {}
    for key, (parser, default) in SCHEMA.items():
        if key in overrides:
            val = overrides[key]
            # JSON round-trips (e.g. rerunning from a manifest) turn tuples
            # into lists; normalize so comparisons stay exact
            values[key] = tuple(val) if isinstance(val, list) else val
        elif use_env and _env_name(key) in os.environ:
            values[key] = _coerce(key, os.environ[_env_name(key)])
        elif default is REQUIRED:
            raise ParameterError(f"missing mandatory key {key}")
        else:
            values[key] = default
    unknown = set(overrides) - set(SCHEMA)
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    return validate_config(values)


def _coerce(key: str, raw: str):
    parser = SCHEMA[key][0]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"bad value for {key}: {raw!r} ({exc})") from exc


def parse_config(path, use_env: bool = True) -> ExperimentConfig:
    """Parse and validate a flat key = value config file."""
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {text!r}")
            key, _, value = text.partition("=")
            key = key.strip()
            if key not in SCHEMA:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            if key in raw:
                raise ParameterError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = _coerce(key, value.strip())
    return config_from_dict(raw, use_env=use_env)


def _centered_pattern(n_sites: int, span: int) -> int:
    """Occupied sites c and c + span, centered on the chain (1-based c)."""
    c = (n_sites - span + 1) // 2
    return (1 << (c - 1)) | (1 << (c - 1 + span))


def initial_pattern(preset: str, n_sites: int, n_exc: int = None, sites=None) -> int:
    """Occupation pattern of the initial basis state for a preset."""
    if preset == "single_center":
        c = (n_sites + 1) // 2
        return 1 << (c - 1)
    if preset == "two_separated":
        return _centered_pattern(n_sites, 3)
    if preset == "two_adjacent":
        return _centered_pattern(n_sites, 1)
    if preset == "domain_wall":
        if not n_exc:
            raise ParameterError("domain_wall needs n_exc")
        return (1 << n_exc) - 1
    if preset == "explicit_sites":
        if not sites:
            raise ParameterError("explicit_sites needs a site list")
        return sum(1 << (s - 1) for s in sites)
    raise ParameterError(f"unknown initial-state preset {preset!r}")


def initial_state(preset: str, basis: SectorBasis, n_exc: int = None,
                  sites=None) -> np.ndarray:
    """Unit-norm amplitude vector of the preset's basis state."""
    pattern = initial_pattern(preset, basis.n_sites, n_exc=n_exc, sites=sites)
    if int(pattern).bit_count() != basis.n_exc:
        raise ParameterError(
            f"preset {preset!r} places {int(pattern).bit_count()} excitations "
            f"but the basis sector has {basis.n_exc}")
    psi = np.zeros(basis.dim, dtype=np.complex128)
    psi[rank(basis, pattern)] = 1.0
    return psi


def center_site(cfg: ExperimentConfig) -> int:
    """0-based reference site for the imbalance (center of the chain)."""
    return (cfg["chain.n_sites"] + 1) // 2 - 1
