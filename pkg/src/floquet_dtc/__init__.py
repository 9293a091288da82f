"""Classical Floquet spin-chain simulator.

A one-dimensional ring of classical unit spins is driven periodically: a
global x-flip, a half period of z-coupled precession, a half period of
x-coupled precession.  Both half-period maps are exact rotations, which
makes very long stroboscopic trajectories cheap and norm-exact.  On top of
the propagator sit decorrelator-based thermalization times, subharmonic
spectral analysis, continuous-time dynamics under the averaged generators,
and a deterministic scenario runner with a CLI.
"""

__version__ = "0.1.0"

from .chain import (ChainError, InitialStateSpec, PerturbationSpec, SpinChain,
                    perturb_chain, rotate_about_axis, sample_initial_chain,
                    spin_vector)
from .config import ConfigError, ScenarioSpec, emit_config, parse_config
from .drive import (DriveParams, FloquetState, evolve_periods, global_flip,
                    half_period_x, half_period_z, one_period, rescale_couplings)
from .effective import (EffectiveHamiltonianSpec, IntegratorConfig,
                        crossover_time_tau_c, evolve_effective)
from .ensembles import (EnsembleSpec, run_effective_ensemble, run_floquet_ensemble)
from .fitting import FitResult, log_linear_fit
from .observables import (CrossingTime, decorrelator, effective_energy_density,
                          magnetization_z, thermalization_time)
from .oracle import OracleError, ode_oracle, oracle_one_period
from .presets import preset_config_text, preset_names, preset_spec
from .spectral import (Spectrum, crystalline_fraction, dtft, flip_error_sweep,
                       peak_frequency)

__all__ = [
    "__version__",
    "ChainError", "InitialStateSpec", "PerturbationSpec", "SpinChain",
    "perturb_chain", "rotate_about_axis", "sample_initial_chain", "spin_vector",
    "ConfigError", "ScenarioSpec", "emit_config", "parse_config",
    "DriveParams", "FloquetState", "evolve_periods", "global_flip",
    "half_period_x", "half_period_z", "one_period", "rescale_couplings",
    "EffectiveHamiltonianSpec", "IntegratorConfig", "crossover_time_tau_c",
    "evolve_effective",
    "EnsembleSpec", "run_effective_ensemble", "run_floquet_ensemble",
    "FitResult", "log_linear_fit",
    "CrossingTime", "decorrelator", "effective_energy_density",
    "magnetization_z", "thermalization_time",
    "OracleError", "ode_oracle", "oracle_one_period",
    "preset_config_text", "preset_names", "preset_spec",
    "Spectrum", "crystalline_fraction", "dtft", "flip_error_sweep",
    "peak_frequency",
]
