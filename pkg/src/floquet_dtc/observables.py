"""Tracked observables and threshold-crossing time extraction.

Three scalars are tracked along a trajectory: the average energy density of
the zeroth-order static Hamiltonian, the mean z magnetization, and the
normalized decorrelator between a chain and its perturbed shadow.  The
decorrelator is scaled by 1/sqrt(2) so that two statistically independent
chains give 1, the late-time ergodic value.

Batch variants take component arrays of shape (..., n_sites) and reduce the
last axis; the chain-level functions wrap them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import SpinChain
from .drive import DriveParams
from . import stepping

# decorrelator normalization: statistical average over independent chains
DECORRELATOR_NORM = np.sqrt(2.0)


@dataclass(frozen=True)
class CrossingTime:
    """First-crossing result; value is None when censored at the horizon."""

    value: float | None
    censored: bool


def energy_density_batch(sx: np.ndarray, sz: np.ndarray, params: DriveParams) -> np.ndarray:
    """Average energy density per chain; reduces the last (site) axis."""
    ez = stepping.next_site(sz)
    ex = stepping.next_site(sx)
    terms = 2.0 * params.j_z * sz * ez + 2.0 * params.j_x * sx * ex
    terms += params.b_z * sz + params.b_x * sx
    return terms.mean(axis=-1)


def magnetization_batch(sz: np.ndarray) -> np.ndarray:
    return sz.mean(axis=-1)


def decorrelator_batch(ax, ay, az, bx, by, bz) -> np.ndarray:
    dx = ax - bx
    dy = ay - by
    dz = az - bz
    return np.sqrt((dx * dx + dy * dy + dz * dz).mean(axis=-1) / 2.0)


def effective_energy_density(chain: SpinChain, params: DriveParams) -> float:
    """(1/N) sum_i (2 j_z Sz_i Sz_{i+1} + 2 j_x Sx_i Sx_{i+1} + b_z Sz_i + b_x Sx_i)."""
    v = chain.vectors
    return float(energy_density_batch(v[:, 0], v[:, 2], params))


def magnetization_z(chain: SpinChain) -> float:
    """Mean z component of the spins, in [-1, 1]."""
    return float(chain.vectors[:, 2].mean())


def decorrelator(primary: SpinChain, shadow: SpinChain) -> float:
    """Normalized rms distance between two chains: (1/sqrt 2) sqrt(mean |S - S'|^2)."""
    if primary.n_sites != shadow.n_sites:
        raise ValueError(
            f"chain length mismatch: {primary.n_sites} != {shadow.n_sites}")
    a, b = primary.vectors, shadow.vectors
    return float(decorrelator_batch(a[:, 0], a[:, 1], a[:, 2], b[:, 0], b[:, 1], b[:, 2]))


def thermalization_time(d_series, threshold: float = 0.9,
                        sample_interval: float = 1.0) -> CrossingTime:
    """First time the decorrelator series reaches the threshold.

    Linear interpolation between the bracketing samples; a series that never
    reaches the threshold is censored at the horizon.
    """
    d = np.asarray(d_series, dtype=float)
    if d.size == 0:
        raise ValueError("empty decorrelator series")
    if threshold <= 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    idx = np.nonzero(d >= threshold)[0]
    if idx.size == 0:
        return CrossingTime(None, True)
    k = int(idx[0])
    if k == 0:
        return CrossingTime(0.0, False)
    frac = (threshold - d[k - 1]) / (d[k] - d[k - 1])
    return CrossingTime((k - 1 + float(frac)) * sample_interval, False)


def alternation_fraction(mz_per_period, start: int, end: int) -> float:
    """Fraction of consecutive-period pairs in [start, end] whose signs alternate."""
    mz = np.asarray(mz_per_period, dtype=float)
    window = mz[start:end + 1]
    if window.size < 2:
        raise ValueError("window too short for alternation statistics")
    s = np.sign(window)
    return float((s[1:] * s[:-1] < 0).mean())


def longest_alternating_run(mz_per_period, amplitude_floor: float = 0.1) -> int:
    """Longest run of consecutive periods with sign-alternating Mz above a floor.

    The floor keeps noise-level wobbles around zero from counting as
    subharmonic response; the run length is the number of alternating pairs.
    """
    mz = np.asarray(mz_per_period, dtype=float)
    if mz.size < 2:
        return 0
    s = np.sign(mz)
    ok = (s[1:] * s[:-1] < 0) & (np.abs(mz[1:]) > amplitude_floor) \
        & (np.abs(mz[:-1]) > amplitude_floor)
    best = run = 0
    for flag in ok:
        run = run + 1 if flag else 0
        best = max(best, run)
    return int(best)


def crossover_time(mz_series, threshold: float = 0.05, sample_interval: float = 1.0,
                   persistence_window: int = 50) -> CrossingTime:
    """First time |Mz| stays below the threshold for a whole persistence window.

    Only windows fully contained in the series count; if none qualifies the
    result is censored at the horizon.
    """
    mz = np.asarray(mz_series, dtype=float)
    if mz.size == 0:
        raise ValueError("empty magnetization series")
    if threshold <= 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    if persistence_window < 1:
        raise ValueError(f"persistence_window must be >= 1, got {persistence_window}")
    below = np.abs(mz) < threshold
    if persistence_window > below.size:
        return CrossingTime(None, True)
    # windowed all-below via run lengths
    run = 0
    for k, flag in enumerate(below):
        run = run + 1 if flag else 0
        if run >= persistence_window:
            return CrossingTime((k - persistence_window + 1) * sample_interval, False)
    return CrossingTime(None, True)
