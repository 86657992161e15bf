"""Trajectory-ensemble simulator for disordered XXZ spin chains under
stochastic collisional dephasing, with localization analysis."""

__version__ = "0.1.0"

from .basis import SectorBasis, bipartition_factorization, build_basis, rank, unrank
from .errors import CapacityError, DiagonalizationError, ParameterError
from .hamiltonian import ChainSpec, SectorHamiltonian, build_hamiltonian, diagonalize, draw_disorder
from .noise import (CollisionSchedule, NoiseSpec, collision_histogram,
                    generate_events, init_schedule, pop_next_event, sample_waiting_time)
from .observables import (ObservableSeries, build_series, entanglement_entropy,
                          ier, imbalance, ipr, site_density)
from .plateaus import (PlateauConfig, PlateauReport, analyze_series, collapse_transform,
                       delocalization_time, detect_plateaus, first_plateau_metrics)
from .trajectories import (EnsembleSpec, TrajectoryState, apply_collision,
                           propagate, run_ensemble, run_trajectory)
