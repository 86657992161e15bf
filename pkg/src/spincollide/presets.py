"""Named experiment presets, one per published figure panel.

Each preset carries a paper-scale parameter set and a cheaper desk-scale
variant (fewer trajectories, thinner grids). `kind` selects the emission
path: "series" runs one simulation per listed run, "sweep" emits one
plateau-report row per grid point, "histogram" emits collision counts.
"""

from dataclasses import dataclass, field

from .config import config_from_dict
from .errors import ParameterError

_SINGLE_41 = {
    "chain.n_sites": 41, "chain.delta": 0.0, "chain.h": 10.0,
    "noise.nu": 100.0, "ensemble.n_traj": 500, "ensemble.t_final": 30.0,
    "init.preset": "single_center",
}

_TWO_SEP_20 = {
    "chain.n_sites": 20, "chain.delta": 2.5, "chain.h": 10.0,
    "noise.nu": 100.0, "ensemble.n_traj": 250, "ensemble.t_final": 30.0,
    "init.preset": "two_separated",
}


@dataclass(frozen=True)
class FigurePreset:
    name: str
    kind: str                      # series | sweep | histogram
    base: dict
    runs: tuple = ()               # (label, overrides) pairs, for kind=series/histogram
    grid: tuple = ()               # (key, paper_values, desk_values), for kind=sweep
    desk: dict = field(default_factory=dict)   # desk-scale base overrides
    note: str = ""

    def configs(self, desk: bool = False):
        """Yield (label, ExperimentConfig) for each run of the preset."""
        base = dict(self.base)
        if desk:
            base.update(self.desk)
        if self.kind == "sweep":
            yield "sweep", config_from_dict(base)
            return
        for label, overrides in self.runs:
            values = dict(base)
            values.update(overrides)
            yield label, config_from_dict(values)

    def grid_axes(self, desk: bool = False):
        if self.kind != "sweep":
            raise ParameterError(f"preset {self.name} is not a sweep")
        return [(key, desk_vals if desk else paper_vals)
                for key, paper_vals, desk_vals in self.grid]


def _rc_runs(values):
    return tuple((f"rc_{rc:g}", {"noise.rc": rc}) for rc in values)


def _h_runs(values):
    return tuple((f"h_{h:g}", {"chain.h": h}) for h in values)


_CATALOG = (
    FigurePreset(
        name="fig1b", kind="histogram",
        base={**_SINGLE_41, "noise.rc": 1.0},
        runs=(("hist", {}),), desk={"ensemble.n_traj": 100},
        note="collision histogram, stroboscopic bands at tJ = 1, 2, ..."),
    FigurePreset(
        name="fig1c", kind="histogram",
        base={**_SINGLE_41, "noise.rc": 0.1},
        runs=(("hist", {}),), desk={"ensemble.n_traj": 100},
        note="collision histogram, first band at tJ = 10"),
    FigurePreset(
        name="fig2a", kind="sweep",
        base=_SINGLE_41,
        grid=(("noise.nu", (0.5, 1.0, 5.0, 10.0, 50.0, 100.0), (1.0, 100.0)),
              ("noise.rc", (0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0), (0.1, 1.0, 10.0))),
        desk={"ensemble.n_traj": 100},
        note="IPR(tJ=30) heatmap over nu x rc"),
    FigurePreset(
        name="fig2b", kind="series",
        base=_SINGLE_41,
        runs=_rc_runs((0.0, 0.1, 0.5, 1.0, 5.0, 50.0, 100.0)),
        desk={"ensemble.n_traj": 100},
        note="IPR vs tJ for h=10, rc sweep"),
    FigurePreset(
        name="fig2c", kind="series",
        base={**_SINGLE_41, "noise.rc": 0.1},
        runs=_h_runs((0.1, 0.5, 1.0, 5.0, 10.0)),
        desk={"ensemble.n_traj": 100},
        note="IPR vs tJ at rc=0.1 for several disorder ranges"),
    FigurePreset(
        name="fig3a", kind="series",
        base=_TWO_SEP_20,
        runs=_rc_runs((0.0, 0.1, 0.5, 1.0, 5.0, 10.0)),
        desk={"ensemble.n_traj": 100},
        note="two-excitation IER vs tJ; magnetization inset from site columns"),
    FigurePreset(
        name="fig3b", kind="series",
        base=_TWO_SEP_20,
        runs=_rc_runs(tuple(round(0.20 + 0.05 * k, 2) for k in range(17))),
        desk={"ensemble.n_traj": 100},
        note="IER collapse vs tJ*rc, rc from 0.20 to 1.00"),
    FigurePreset(
        name="fig4", kind="sweep",
        base=_TWO_SEP_20,
        grid=(("chain.h", (0.5, 1.0, 5.0, 10.0), (0.5, 10.0)),
              ("noise.rc", (0.1, 0.2, 0.5, 0.7, 0.9, 1.0), (0.1, 0.5, 1.0)),
              ("noise.nu", (50.0, 100.0), (100.0,))),
        desk={"ensemble.n_traj": 100},
        note="plateau duration / area collapse vs disorder power"),
    FigurePreset(
        name="fig5", kind="sweep",
        base=_TWO_SEP_20,
        grid=(("chain.h", (0.5, 1.0, 2.0, 5.0, 10.0), (0.5, 10.0)),
              ("noise.rc", (0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 10.0), (0.5, 2.0, 8.0)),
              ("noise.nu", (50.0, 100.0), (100.0,))),
        desk={"ensemble.n_traj": 100},
        note="complete delocalization time tau over (h, rc)"),
    FigurePreset(
        name="fig6", kind="series",
        base={"chain.n_sites": 8, "chain.delta": 2.5, "chain.h": 10.0,
              "noise.nu": 100.0, "ensemble.n_traj": 250, "ensemble.t_final": 1000.0,
              "init.preset": "domain_wall", "init.n_exc": 4},
        runs=_rc_runs((0.1, 0.5, 1.0)),
        desk={"ensemble.n_traj": 50, "ensemble.t_final": 200.0},
        note="domain-wall IER to tJ=1000 plus magnetization map"),
    FigurePreset(
        name="fig7", kind="series",
        base={"chain.n_sites": 20, "chain.delta": 2.5, "chain.h": 10.0,
              "noise.rc": 0.1, "ensemble.n_traj": 250, "ensemble.t_final": 30.0,
              "init.preset": "two_adjacent", "ensemble.cut": 10},
        runs=(("nu_0", {"noise.nu": 0.0}), ("nu_1", {"noise.nu": 1.0}),
              ("nu_100", {"noise.nu": 100.0})),
        desk={"ensemble.n_traj": 100},
        note="entanglement entropy vs tJ for three noise shapes"),
    FigurePreset(
        name="figA1a", kind="series",
        base=_SINGLE_41,
        runs=_rc_runs((0.0, 0.1, 0.5, 1.0, 5.0, 50.0, 100.0)),
        desk={"ensemble.n_traj": 100},
        note="imbalance vs tJ for several collision rates"),
    FigurePreset(
        name="figA1b", kind="series",
        base={**_SINGLE_41, "noise.rc": 0.1},
        runs=_h_runs((0.1, 0.5, 1.0, 5.0, 10.0)),
        desk={"ensemble.n_traj": 100},
        note="imbalance vs tJ for several disorder ranges"),
    FigurePreset(
        name="figA2a", kind="series",
        base={**_TWO_SEP_20, "noise.rc": 0.1},
        runs=_h_runs((0.1, 0.5, 1.0, 5.0, 10.0)),
        desk={"ensemble.n_traj": 100},
        note="IER vs tJ, separated pair, disorder sweep"),
    FigurePreset(
        name="figA2b", kind="series",
        base={"chain.n_sites": 20, "chain.delta": 2.5, "noise.rc": 0.1,
              "noise.nu": 100.0, "ensemble.n_traj": 250, "ensemble.t_final": 30.0,
              "init.preset": "two_adjacent"},
        runs=_h_runs((0.1, 0.5, 1.0, 5.0, 10.0)),
        desk={"ensemble.n_traj": 100},
        note="IER vs tJ, adjacent pair, disorder sweep"),
)


def preset_catalog() -> dict:
    return {p.name: p for p in _CATALOG}


def get_preset(name: str) -> FigurePreset:
    catalog = preset_catalog()
    if name not in catalog:
        raise ParameterError(f"unknown preset {name!r}; available: {', '.join(sorted(catalog))}")
    return catalog[name]
