"""Deterministic ensemble evolution over batches of twin trajectories.

Realizations evolve in lockstep as one (batch, n_sites) array per spin
component; elementwise updates make the batched arithmetic bit-identical
to evolving each chain alone.  Every realization owns a child stream
spawned from the master seed (one grandchild for the initial state, one
for the shadow perturbation), so results never depend on batch size or
execution order.

Observables are recorded at the half-period boundaries t = mT; the
decorrelator threshold crossing is tracked online at full resolution even
when the stored series is strided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import (InitialStateSpec, PerturbationSpec, SpinChain,
                    perturb_chain, sample_initial_chain)
from .drive import DriveParams
from .effective import EffectiveHamiltonianSpec, IntegratorConfig, strang_step
from . import observables, stepping

NORM_CHECK_EVERY = 256  # half periods between drift/finiteness checkpoints


@dataclass(frozen=True)
class EnsembleSpec:
    """Initial-state distribution, shadow perturbation scale, realization count."""

    initial: InitialStateSpec
    perturbation_scale: float
    realizations: int

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if self.perturbation_scale < 0.0:
            raise ValueError(f"perturbation_scale must be >= 0, got {self.perturbation_scale}")


def realization_seeds(master_seed: int, n: int) -> list[np.random.SeedSequence]:
    """One child SeedSequence per realization, spawned from the master seed."""
    return np.random.SeedSequence(int(master_seed)).spawn(n)


def sample_realization(ensemble: EnsembleSpec, n_sites: int,
                       child: np.random.SeedSequence) -> tuple[SpinChain, SpinChain]:
    """(primary, shadow) chains for one realization's seed stream."""
    init_ss, pert_ss = child.spawn(2)
    primary = sample_initial_chain(ensemble.initial, n_sites, init_ss)
    shadow = perturb_chain(primary, PerturbationSpec(ensemble.perturbation_scale), pert_ss)
    return primary, shadow


def _batch_components(ensemble: EnsembleSpec, n_sites: int, master_seed: int,
                      with_twin: bool):
    rows = []
    for child in realization_seeds(master_seed, ensemble.realizations):
        primary, shadow = sample_realization(ensemble, n_sites, child)
        rows.append(primary.vectors)
        if with_twin:
            rows.append(shadow.vectors)
    stacked = np.stack(rows)  # (B, N, 3)
    return stepping.components_from_vectors(stacked)


def _stored_stride(n_samples: int, cap: int) -> int:
    """Smallest stride of the form 2 * odd that keeps stored samples within cap.

    That family preserves both period boundaries (even m survive) and the
    even/odd period alternation after decimation.
    """
    if n_samples <= cap:
        return 1
    half = math.ceil(math.ceil(n_samples / cap) / 2)
    if half % 2 == 0:
        half += 1
    return 2 * half


@dataclass
class FloquetEnsembleRun:
    """Stored series plus online-extracted scalars from one twin-batch run."""

    sample_m: np.ndarray            # stored half-period indices
    stride: int
    mz: np.ndarray                  # (samples, realizations), primary chains
    h_eff: np.ndarray
    d: np.ndarray | None            # None when run without twins
    tau_star_t: np.ndarray          # first d-crossing per pair, units of T; nan if censored
    tau_censored: np.ndarray
    failed: np.ndarray              # per-realization non-finite flag
    norm_drift: float
    periods_run: int
    realizations: int

    @property
    def tau_star_periods(self) -> np.ndarray:
        return self.tau_star_t / 2.0

    def per_period_mz(self) -> np.ndarray:
        """Samples at period boundaries only (m even)."""
        keep = self.sample_m % 2 == 0
        return self.mz[keep]

    def per_period_index(self) -> np.ndarray:
        keep = self.sample_m % 2 == 0
        return self.sample_m[keep] // 2


def run_floquet_ensemble(params: DriveParams, ensemble: EnsembleSpec, n_sites: int,
                         horizon_periods: int, master_seed: int, *,
                         with_twin: bool = True, d_threshold: float = 0.9,
                         series_cap: int = 50001,
                         early_stop_after: int | None = None,
                         record_energy: bool = True) -> FloquetEnsembleRun:
    """Evolve the ensemble for up to horizon_periods drive periods.

    With early_stop_after set, the run ends once every pair has crossed the
    decorrelator threshold and at least that many periods have elapsed.
    """
    if horizon_periods < 0:
        raise ValueError(f"horizon_periods must be >= 0, got {horizon_periods}")
    if n_sites < 2:
        raise ValueError(f"need at least 2 sites, got {n_sites}")

    r_count = ensemble.realizations
    sx, sy, sz = _batch_components(ensemble, n_sites, master_seed, with_twin)

    n_samples = 2 * horizon_periods + 1
    stride = _stored_stride(n_samples, series_cap)
    max_stored = len(range(0, n_samples, stride))
    mz = np.full((max_stored, r_count), np.nan)
    h_eff = np.full((max_stored, r_count), np.nan)
    d = np.full((max_stored, r_count), np.nan) if with_twin else None
    sample_m = np.zeros(max_stored, dtype=np.int64)

    prim = slice(0, None, 2) if with_twin else slice(None)
    shad = slice(1, None, 2)

    tau_t = np.full(r_count, np.nan)
    censored = np.ones(r_count, dtype=bool)
    failed = np.zeros(r_count, dtype=bool)
    d_prev = None
    norm_drift = 0.0
    n_stored = 0

    def record(m: int):
        nonlocal n_stored
        sample_m[n_stored] = m
        mz[n_stored] = observables.magnetization_batch(sz[prim])
        if record_energy:
            h_eff[n_stored] = observables.energy_density_batch(sx[prim], sz[prim], params)
        if with_twin:
            d[n_stored] = observables.decorrelator_batch(
                sx[prim], sy[prim], sz[prim], sx[shad], sy[shad], sz[shad])
        n_stored += 1

    def d_now() -> np.ndarray:
        return observables.decorrelator_batch(
            sx[prim], sy[prim], sz[prim], sx[shad], sy[shad], sz[shad])

    def update_crossings(m: int, d_cur: np.ndarray):
        nonlocal d_prev
        newly = censored & (d_cur >= d_threshold)
        if newly.any():
            if m == 0:
                tau_t[newly] = 0.0
            else:
                prev = d_prev
                denom = d_cur - prev
                frac = np.where(denom > 0,
                                (d_threshold - prev) / np.where(denom == 0, 1, denom), 0.0)
                tau_t[newly] = (m - 1) + np.clip(frac[newly], 0.0, 1.0)
            censored[newly] = False
        d_prev = d_cur

    if with_twin:
        update_crossings(0, d_now())
    record(0)

    flip_angle = math.pi + params.flip_error
    az, cz = 4.0 * params.j_z, 2.0 * params.b_z
    ax, cx = 4.0 * params.j_x, 2.0 * params.b_x
    T = params.half_period

    comps = (sx, sy, sz)
    periods_run = 0
    for p in range(1, horizon_periods + 1):
        comps = stepping.uniform_axis_step(comps, "x", flip_angle)
        comps = stepping.coupled_axis_step(comps, "z", az, cz, T)
        sx, sy, sz = comps
        m = 2 * p - 1
        if with_twin:
            update_crossings(m, d_now())
        if m % stride == 0:
            record(m)
        comps = stepping.coupled_axis_step(comps, "x", ax, cx, T)
        sx, sy, sz = comps
        m = 2 * p
        if with_twin:
            update_crossings(m, d_now())
        if m % stride == 0:
            record(m)
        periods_run = p
        if m % (2 * NORM_CHECK_EVERY) == 0:
            err2 = np.abs(sx * sx + sy * sy + sz * sz - 1.0)
            bad = ~np.isfinite(err2).all(axis=-1)
            if bad.any():
                per_real = bad[prim] | (bad[shad] if with_twin else False)
                failed |= per_real
            norm_drift = max(norm_drift, float(np.nanmax(err2)))
        if (early_stop_after is not None and p >= early_stop_after
                and with_twin and not censored.any()):
            break

    err2 = np.abs(sx * sx + sy * sy + sz * sz - 1.0)
    if np.isfinite(err2).all():
        norm_drift = max(norm_drift, float(err2.max()))
    else:
        bad = ~np.isfinite(err2).all(axis=-1)
        failed |= bad[prim] | (bad[shad] if with_twin else False)

    return FloquetEnsembleRun(
        sample_m=sample_m[:n_stored].copy(),
        stride=stride,
        mz=mz[:n_stored],
        h_eff=h_eff[:n_stored],
        d=d[:n_stored] if with_twin else None,
        tau_star_t=tau_t,
        tau_censored=censored.copy(),
        failed=failed,
        norm_drift=norm_drift,
        periods_run=periods_run,
        realizations=r_count,
    )


@dataclass
class EffectiveEnsembleRun:
    """Sampled toggling-frame series from one effective-Hamiltonian batch run."""

    times: np.ndarray               # stored sample times
    mz: np.ndarray                  # (samples, realizations)
    d: np.ndarray | None
    norm_drift: float
    realizations: int

    def ensemble_mean_mz(self) -> np.ndarray:
        return self.mz.mean(axis=1)


def run_effective_ensemble(spec: EffectiveHamiltonianSpec, ensemble: EnsembleSpec,
                           n_sites: int, total_time: float, cfg: IntegratorConfig,
                           master_seed: int, *, sample_interval: float = 1.0,
                           with_twin: bool = True) -> EffectiveEnsembleRun:
    """Strang-split ensemble evolution with flip-free (toggling frame) recording."""
    if total_time < 0.0:
        raise ValueError(f"total_time must be >= 0, got {total_time}")
    n_steps = int(round(total_time / cfg.dt))
    sample_every = max(1, int(round(sample_interval / cfg.dt)))
    if abs(sample_every * cfg.dt - sample_interval) > 1e-9:
        raise ValueError(
            f"sample_interval={sample_interval} must be a multiple of dt={cfg.dt}")

    r_count = ensemble.realizations
    comps = _batch_components(ensemble, n_sites, master_seed, with_twin)
    coeffs = spec.coefficients()

    prim = slice(0, None, 2) if with_twin else slice(None)
    shad = slice(1, None, 2)

    n_stored = n_steps // sample_every + 1
    times = np.empty(n_stored)
    mz = np.empty((n_stored, r_count))
    d = np.empty((n_stored, r_count)) if with_twin else None

    def record(i: int, t: float):
        sx, sy, sz = comps
        times[i] = t
        mz[i] = observables.magnetization_batch(sz[prim])
        if with_twin:
            d[i] = observables.decorrelator_batch(
                sx[prim], sy[prim], sz[prim], sx[shad], sy[shad], sz[shad])

    record(0, 0.0)
    stored = 1
    for k in range(1, n_steps + 1):
        comps = strang_step(comps, coeffs, cfg.dt)
        if k % sample_every == 0:
            record(stored, k * cfg.dt)
            stored += 1

    sx, sy, sz = comps
    norm_drift = float(np.abs(sx * sx + sy * sy + sz * sz - 1.0).max())
    return EffectiveEnsembleRun(times[:stored], mz[:stored],
                                d[:stored] if with_twin else None,
                                norm_drift, r_count)
