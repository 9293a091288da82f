"""One-period stroboscopic propagator of the periodically kicked chain.

A drive period lasts 2T: a global x-flip (pi plus an optional error angle),
then the z-coupled half period, then the x-coupled half period.  Both half
period maps are exact rotations because the generator's own-axis spin
components are conserved, so no time discretization error enters anywhere.
Spins are never re-normalized; norm drift stays a clean error diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .chain import SpinChain
from . import stepping

FREQUENCY_CONVENTIONS = ("pi_over_T", "two_pi_over_T")

# observer phases within one period, in order of application
PHASES = ("after_flip", "after_z", "after_x")


@dataclass(frozen=True)
class DriveParams:
    """Couplings, fields, half period T and flip error of the drive."""

    j_z: float
    j_x: float
    b_z: float
    b_x: float
    half_period: float
    flip_error: float = 0.0

    def __post_init__(self):
        for name in ("j_z", "j_x", "b_z", "b_x", "flip_error"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not (math.isfinite(self.half_period) and self.half_period > 0.0):
            raise ValueError(f"half_period must be > 0, got {self.half_period}")

    @property
    def period(self) -> float:
        return 2.0 * self.half_period

    def omega(self, convention: str = "pi_over_T") -> float:
        """Drive frequency under the chosen convention."""
        return _omega_factor(convention) / self.half_period

    @classmethod
    def from_omega(cls, j_z: float, j_x: float, b_z: float, b_x: float,
                   omega: float, flip_error: float = 0.0,
                   convention: str = "pi_over_T") -> "DriveParams":
        if omega <= 0.0:
            raise ValueError(f"omega must be > 0, got {omega}")
        return cls(j_z, j_x, b_z, b_x, _omega_factor(convention) / omega, flip_error)


def _omega_factor(convention: str) -> float:
    if convention not in FREQUENCY_CONVENTIONS:
        raise ValueError(
            f"frequency convention must be one of {FREQUENCY_CONVENTIONS}, got {convention!r}")
    return math.pi if convention == "pi_over_T" else 2.0 * math.pi


def rescale_couplings(params: DriveParams, ratio: float) -> DriveParams:
    """Magnify j_x and b_z by a common ratio, leaving j_z and b_x fixed."""
    return replace(params, j_x=params.j_x * ratio, b_z=params.b_z * ratio)


@dataclass(frozen=True)
class FloquetState:
    """Chain plus the stroboscopic clock after an integer number of periods."""

    chain: SpinChain
    period_index: int

    def time(self, params: DriveParams) -> float:
        return self.period_index * params.period


def _require_duration(duration: float) -> None:
    if not (math.isfinite(duration) and duration >= 0.0):
        raise ValueError(f"duration must be >= 0, got {duration}")


def half_period_z(chain: SpinChain, params: DriveParams, duration: float | None = None) -> SpinChain:
    """Exact evolution under the z-coupled half-period generator.

    Each spin rotates about z by (4*j_z*(S_{i-1}^z + S_{i+1}^z) + 2*b_z)*duration
    using pre-update neighbor values; all z components are unchanged.
    """
    duration = params.half_period if duration is None else duration
    _require_duration(duration)
    comps = stepping.coupled_axis_step(
        stepping.components_from_vectors(chain.vectors), "z",
        4.0 * params.j_z, 2.0 * params.b_z, duration)
    return SpinChain(stepping.vectors_from_components(comps), copy=False)


def half_period_x(chain: SpinChain, params: DriveParams, duration: float | None = None) -> SpinChain:
    """As half_period_z with the roles of z and x exchanged."""
    duration = params.half_period if duration is None else duration
    _require_duration(duration)
    comps = stepping.coupled_axis_step(
        stepping.components_from_vectors(chain.vectors), "x",
        4.0 * params.j_x, 2.0 * params.b_x, duration)
    return SpinChain(stepping.vectors_from_components(comps), copy=False)


def global_flip(chain: SpinChain, flip_error: float = 0.0) -> SpinChain:
    """Rotate every spin about x by pi + flip_error."""
    comps = stepping.uniform_axis_step(
        stepping.components_from_vectors(chain.vectors), "x", math.pi + flip_error)
    return SpinChain(stepping.vectors_from_components(comps), copy=False)


def one_period(chain: SpinChain, params: DriveParams) -> SpinChain:
    """Advance exactly one drive period: flip, z half, x half."""
    return half_period_x(half_period_z(global_flip(chain, params.flip_error), params), params)


def evolve_periods(chain: SpinChain, params: DriveParams, n_periods: int,
                   observer=None, record_phases=("after_z", "after_x")) -> FloquetState:
    """Apply the one-period map n_periods times.

    The observer is called as observer(period_index, phase, chain_view) at the
    requested phases; returning False aborts the run cleanly, any exception
    propagates.  It is also called once up front as (0, "after_x", chain) so
    the t = 0 state is always seen.  Chain views are read-only snapshots.

    Returns the final state; period_index counts fully completed periods, so
    an abort between sub-steps reports the previous period while the chain
    holds the mid-period state.
    """
    if n_periods < 0:
        raise ValueError(f"n_periods must be >= 0, got {n_periods}")
    bad = set(record_phases) - set(PHASES)
    if bad:
        raise ValueError(f"unknown phases: {sorted(bad)}")

    comps = stepping.components_from_vectors(chain.vectors)

    def snapshot() -> SpinChain:
        return SpinChain(stepping.vectors_from_components(comps), copy=False, validate=False)

    if observer is not None:
        if observer(0, "after_x", snapshot()) is False:
            return FloquetState(snapshot(), 0)

    flip_angle = math.pi + params.flip_error
    az, cz = 4.0 * params.j_z, 2.0 * params.b_z
    ax, cx = 4.0 * params.j_x, 2.0 * params.b_x
    T = params.half_period

    completed = 0
    for m in range(1, n_periods + 1):
        comps = stepping.uniform_axis_step(comps, "x", flip_angle)
        if observer is not None and "after_flip" in record_phases:
            if observer(m, "after_flip", snapshot()) is False:
                break
        comps = stepping.coupled_axis_step(comps, "z", az, cz, T)
        if observer is not None and "after_z" in record_phases:
            if observer(m, "after_z", snapshot()) is False:
                break
        comps = stepping.coupled_axis_step(comps, "x", ax, cx, T)
        completed = m
        if observer is not None and "after_x" in record_phases:
            if observer(m, "after_x", snapshot()) is False:
                break

    return FloquetState(snapshot(), completed)
