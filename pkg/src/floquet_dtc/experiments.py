"""Declarative scenario runner: one validated spec in, one result bundle out.

Each scenario expands into a list of grid points (frequencies, flip errors,
initial angles, coupling rescales, effective-generator kinds).  Points are
pure functions of (spec, master seed, point), so they may run sequentially
or on a process pool with identical results.  All aggregates are computed
from exactly the per-realization samples that get persisted, which makes
them reproducible from the bundle alone.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bundle import BundleWriter
from .chain import InitialStateSpec
from .config import ScenarioSpec, emit_config
from .drive import DriveParams, rescale_couplings
from .effective import EffectiveHamiltonianSpec, IntegratorConfig
from .ensembles import (EffectiveEnsembleRun, EnsembleSpec, FloquetEnsembleRun,
                        run_effective_ensemble, run_floquet_ensemble)
from .fitting import log_linear_fit
from .observables import (alternation_fraction, crossover_time,
                          longest_alternating_run, thermalization_time)
from .spectral import dtft, fraction_summary, peak_frequency

THREADS_ENV = "FLOQUET_DTC_THREADS"

MIN_SUCCESS_FRACTION = 0.9  # valid-ensemble requirement per point


@dataclass(frozen=True)
class GridPoint:
    """One unit of work: overrides applied to the scenario's base parameters."""

    index: int
    omega_over_pi: float
    theta_bar: float
    delta_r: float
    rescale_ratio: float
    effective_kind: str | None = None  # None -> stroboscopic drive point

    def label_columns(self) -> dict:
        return {
            "point": self.index,
            "kind": self.effective_kind or "floquet",
            "omega_over_pi": self.omega_over_pi,
            "theta_bar": self.theta_bar,
            "delta_r": self.delta_r,
            "rescale_ratio": self.rescale_ratio,
        }


@dataclass
class PointResult:
    point: GridPoint
    floquet: FloquetEnsembleRun | None = None
    effective: EffectiveEnsembleRun | None = None
    control_f_mean: float | None = None
    error: str | None = None


def drive_params_for(spec: ScenarioSpec, point: GridPoint) -> DriveParams:
    base = DriveParams(spec.j_z, spec.j_x, spec.b_z, spec.b_x,
                       spec.half_period(point.omega_over_pi), point.delta_r)
    if point.rescale_ratio != 1.0:
        base = rescale_couplings(base, point.rescale_ratio)
    return base


def ensemble_for(spec: ScenarioSpec, point: GridPoint) -> EnsembleSpec:
    return EnsembleSpec(InitialStateSpec(point.theta_bar, spec.w),
                        spec.delta, spec.realizations)


def grid_points(spec: ScenarioSpec) -> list[GridPoint]:
    kind = spec.scenario
    base = dict(omega_over_pi=spec.omega_over_pi, theta_bar=spec.theta_bar,
                delta_r=spec.delta_r, rescale_ratio=spec.rescale_ratio)
    points: list[GridPoint] = []

    def add(**overrides):
        points.append(GridPoint(index=len(points), **{**base, **overrides}))

    if kind in ("dtc_baseline", "alt_params"):
        add()
    elif kind == "freq_sweep":
        for w in spec.omega_over_pi_grid:
            add(omega_over_pi=w)
    elif kind == "flip_error_sweep":
        for dr in spec.delta_r_grid:
            add(delta_r=dr)
    elif kind == "initial_state_sweep":
        for tb in spec.theta_bar_grid:
            add(theta_bar=tb)
    elif kind == "saturation_sweep":
        ratios = spec.rescale_ratio_grid or (spec.rescale_ratio,)
        for r in ratios:
            for w in spec.omega_over_pi_grid:
                add(omega_over_pi=w, rescale_ratio=r)
        for r in ratios:  # toggling-frame crossover companions
            add(rescale_ratio=r, effective_kind="Dx")
    elif kind == "effective_dynamics":
        kinds = ("D0", "Dx") if spec.effective_kind == "both" else (spec.effective_kind,)
        ratios = spec.rescale_ratio_grid or (spec.rescale_ratio,)
        thetas = spec.theta_bar_grid or (spec.theta_bar,)
        for ek in kinds:
            for r in ratios:
                for tb in thetas:
                    add(effective_kind=ek, rescale_ratio=r, theta_bar=tb)
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    return points


def run_point(spec: ScenarioSpec, point: GridPoint) -> PointResult:
    """Run one grid point; failures are captured, not raised."""
    try:
        if point.effective_kind is not None:
            params = DriveParams(spec.j_z, spec.j_x, spec.b_z, spec.b_x,
                                 spec.half_period(point.omega_over_pi))
            eff = EffectiveHamiltonianSpec(point.effective_kind, params,
                                           point.rescale_ratio)
            run = run_effective_ensemble(
                eff, ensemble_for(spec, point), spec.n_sites, spec.total_time,
                IntegratorConfig(dt=spec.dt), spec.seed,
                sample_interval=spec.sample_interval, with_twin=True)
            return PointResult(point, effective=run)

        params = drive_params_for(spec, point)
        early = max(spec.ft_window_periods, 500) if spec.early_stop else None
        run = run_floquet_ensemble(
            params, ensemble_for(spec, point), spec.n_sites, spec.horizon_periods,
            spec.seed, with_twin=True, d_threshold=spec.d_threshold,
            series_cap=spec.series_cap, early_stop_after=early)
        result = PointResult(point, floquet=run)
        if spec.scenario == "flip_error_sweep":
            ctrl_params = replace(params, j_z=0.0, j_x=0.0, b_z=0.0, b_x=0.0)
            ctrl = run_floquet_ensemble(
                ctrl_params, ensemble_for(spec, point), spec.n_sites,
                spec.ft_window_periods, spec.seed, with_twin=False)
            f_mean, _, _, _ = fraction_summary(
                ctrl.per_period_mz(), spec.ft_window_periods, f_mode=spec.f_mode,
                exclude_dc=spec.exclude_dc, peak_width_bins=spec.peak_width_bins,
                grid_spacing=spec.ft_grid_spacing)
            result.control_f_mean = f_mean
        return result
    except Exception as exc:
        return PointResult(point, error=f"{type(exc).__name__}: {exc}")


def _run_point_star(args):
    return run_point(*args)


def default_thread_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def run_scenario(spec: ScenarioSpec, out_dir, threads: int | None = None) -> dict:
    """Run every grid point, write the bundle, return the summary dict."""
    points = grid_points(spec)
    threads = default_thread_count() if threads is None else max(1, threads)
    if threads > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(points))) as pool:
            results = list(pool.map(_run_point_star, [(spec, p) for p in points]))
    else:
        results = [run_point(spec, p) for p in points]
    return write_bundle(spec, results, out_dir)


# ---------------------------------------------------------------- analysis


def tau_star_summary(spec: ScenarioSpec, run: FloquetEnsembleRun) -> dict:
    """Thermalization-time aggregate for one point under the configured mode."""
    if spec.tau_mode == "ensemble_mean":
        if run.d is None:
            return {"n_valid": 0, "n_censored": 0, "mean": math.nan, "sd": math.nan}
        mean_d = np.nanmean(run.d, axis=1)
        crossing = thermalization_time(mean_d, spec.d_threshold,
                                       sample_interval=float(run.stride) / 2.0)
        censored = crossing.censored
        mean = math.nan if censored else crossing.value
        return {"n_valid": 0 if censored else 1, "n_censored": int(censored),
                "mean": mean, "sd": 0.0}
    ok = ~run.tau_censored & ~run.failed
    vals = run.tau_star_periods[ok]
    return {
        "n_valid": int(ok.sum()),
        "n_censored": int((run.tau_censored & ~run.failed).sum()),
        "mean": float(vals.mean()) if vals.size else math.nan,
        "sd": float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
    }


def tau_c_summary(spec: ScenarioSpec, run: EffectiveEnsembleRun) -> dict:
    interval = float(run.times[1] - run.times[0]) if run.times.size > 1 else 1.0
    if spec.tau_c_mode == "ensemble_mean":
        crossing = crossover_time(run.ensemble_mean_mz(), spec.mz_threshold,
                                  interval, spec.persistence_window)
        return {"tau_c": crossing.value if not crossing.censored else math.nan,
                "censored": int(crossing.censored), "n_valid": int(not crossing.censored)}
    vals = []
    censored = 0
    for r in range(run.realizations):
        crossing = crossover_time(run.mz[:, r], spec.mz_threshold, interval,
                                  spec.persistence_window)
        if crossing.censored:
            censored += 1
        else:
            vals.append(crossing.value)
    return {"tau_c": float(np.mean(vals)) if vals else math.nan,
            "censored": censored, "n_valid": len(vals)}


def subharmonic_summary(spec: ScenarioSpec, run: FloquetEnsembleRun) -> dict:
    mz = run.per_period_mz()
    if mz.shape[0] < 2:
        return {}
    if run.stride > 2:
        return {"ft_skipped_stride": int(run.stride)}
    f_mean, f_sd, _, peak = fraction_summary(
        mz, spec.ft_window_periods, f_mode=spec.f_mode, exclude_dc=spec.exclude_dc,
        peak_width_bins=spec.peak_width_bins, grid_spacing=spec.ft_grid_spacing)
    window_end = min(spec.ft_window_periods, mz.shape[0]) - 1
    mean_mz = np.nanmean(mz, axis=1)
    stats = {
        "f_mean": f_mean,
        "f_sd": f_sd,
        "peak_frequency": peak,
        "longest_alternating_run": longest_alternating_run(mean_mz[:window_end + 1]),
    }
    if window_end >= 11:
        stats["alternation_fraction"] = alternation_fraction(mean_mz, 10, window_end)
    return stats


# ---------------------------------------------------------------- bundle IO


_SERIES_HEADER = ["m", "t_over_T", "period", "phase", "h_eff", "mz", "d"]

# rows persisted per series file; thinning keeps every k-th stored sample with
# k odd, which preserves both the sub-period phase pattern and period parity
_BUNDLE_SERIES_CAP = 2001


def _phase_for(m: int) -> str:
    return "after_x" if m % 2 == 0 else "after_z"


def _keep_mask(spec: ScenarioSpec, sample_m: np.ndarray) -> np.ndarray:
    if spec.cadence == "period":
        keep = sample_m % 2 == 0
    else:
        keep = np.ones(sample_m.size, dtype=bool)
    n = int(keep.sum())
    if n > _BUNDLE_SERIES_CAP:
        k = math.ceil(n / _BUNDLE_SERIES_CAP)
        if k % 2 == 0:
            k += 1
        positions = np.zeros(n, dtype=bool)
        positions[::k] = True
        thin = np.zeros(sample_m.size, dtype=bool)
        thin[np.nonzero(keep)[0][positions]] = True
        return thin
    return keep


def _write_floquet_point(writer: BundleWriter, spec: ScenarioSpec,
                         res: PointResult) -> dict:
    run = res.floquet
    p = res.point.index
    keep = _keep_mask(spec, run.sample_m)
    ms = run.sample_m[keep]
    t_over_t = ms.astype(float)
    periods = ms // 2
    phases = np.array([_phase_for(int(m)) for m in ms], dtype=object)

    for r in range(run.realizations):
        writer.write_table(
            f"series/p{p:02d}_r{r:03d}.tsv", _SERIES_HEADER,
            [ms, t_over_t, periods, phases, run.h_eff[keep, r], run.mz[keep, r],
             (run.d[keep, r] if run.d is not None else np.full(ms.size, np.nan))])

    def stats(a):
        mean = np.nanmean(a, axis=1)
        if run.realizations < 2:
            return mean, np.zeros_like(mean)
        return mean, np.nanstd(a, axis=1, ddof=1)

    h_mean, h_sd = stats(run.h_eff[keep])
    m_mean, m_sd = stats(run.mz[keep])
    if run.d is not None:
        d_mean, d_sd = stats(run.d[keep])
    else:
        d_mean = d_sd = np.full(ms.size, np.nan)
    agg_header = ["m", "t_over_T", "h_eff_mean", "h_eff_sd", "mz_mean", "mz_sd",
                  "d_mean", "d_sd"]
    agg_cols = [ms, t_over_t, h_mean, h_sd, m_mean, m_sd, d_mean, d_sd]
    writer.write_table(f"aggregate/p{p:02d}.tsv", agg_header, agg_cols)

    boundary = ms % 2 == 0
    per_header = ["period", "h_eff_mean", "h_eff_sd", "mz_mean", "mz_sd",
                  "d_mean", "d_sd"]
    per_cols = [periods[boundary]] + [c[boundary] for c in agg_cols[2:]]
    writer.write_table(f"aggregate/p{p:02d}_period.tsv", per_header, per_cols)
    for parity, name in ((0, "even"), (1, "odd")):
        sel = per_cols[0] % 2 == parity
        writer.write_table(f"aggregate/p{p:02d}_period_{name}.tsv", per_header,
                           [c[sel] for c in per_cols])

    entry = dict(res.point.label_columns())
    entry["norm_drift"] = run.norm_drift
    entry["periods_run"] = run.periods_run
    entry["n_failed"] = int(run.failed.sum())
    entry["valid_ensemble"] = bool(
        (run.realizations - run.failed.sum()) >= MIN_SUCCESS_FRACTION * run.realizations)
    entry["tau_star"] = tau_star_summary(spec, run)

    mz_pp = run.per_period_mz()
    if mz_pp.shape[0] >= 2:
        window = min(spec.ft_window_periods, mz_pp.shape[0])
        mean_spectrum = dtft(np.nanmean(mz_pp[:window], axis=1), spec.ft_grid_spacing)
        writer.write_table(
            f"spectra/p{p:02d}.tsv", ["omega", "re", "im", "power"],
            [mean_spectrum.frequencies, mean_spectrum.amplitudes.real,
             mean_spectrum.amplitudes.imag, mean_spectrum.power])
        entry["subharmonic"] = subharmonic_summary(spec, run)
        if res.control_f_mean is not None:
            entry["control_f_mean"] = res.control_f_mean
    return entry


def _write_effective_point(writer: BundleWriter, spec: ScenarioSpec,
                           res: PointResult) -> dict:
    run = res.effective
    p = res.point.index
    for r in range(run.realizations):
        writer.write_table(
            f"series/p{p:02d}_r{r:03d}.tsv", ["t", "mz", "d"],
            [run.times, run.mz[:, r],
             (run.d[:, r] if run.d is not None else np.full(run.times.size, np.nan))])
    mz_mean = run.mz.mean(axis=1)
    mz_sd = run.mz.std(axis=1, ddof=1) if run.realizations > 1 else np.zeros_like(mz_mean)
    if run.d is not None:
        d_mean = run.d.mean(axis=1)
        d_sd = run.d.std(axis=1, ddof=1) if run.realizations > 1 else np.zeros_like(d_mean)
    else:
        d_mean = d_sd = np.full(run.times.size, np.nan)
    writer.write_table(f"aggregate/p{p:02d}.tsv",
                       ["t", "mz_mean", "mz_sd", "d_mean", "d_sd"],
                       [run.times, mz_mean, mz_sd, d_mean, d_sd])

    entry = dict(res.point.label_columns())
    entry["norm_drift"] = run.norm_drift
    entry["tau_c"] = tau_c_summary(spec, run)
    s0 = float(mz_mean[0])
    above = np.abs(mz_mean) > spec.mz_threshold
    flipped = (np.sign(mz_mean) != np.sign(s0)) & above
    entry["mz_start"] = s0
    entry["mz_sign_flip"] = bool(flipped.any())
    entry["mz_first_flip_time"] = float(run.times[int(np.argmax(flipped))]) if flipped.any() else None
    return entry


def write_bundle(spec: ScenarioSpec, results: list[PointResult], out_dir) -> dict:
    writer = BundleWriter(out_dir)
    config_text = emit_config(spec)
    writer.write_text("config.txt", config_text)

    point_rows = []
    entries = []
    for res in results:
        if res.error is not None:
            entry = dict(res.point.label_columns())
            entry["error"] = res.error
        elif res.floquet is not None:
            entry = _write_floquet_point(writer, spec, res)
        else:
            entry = _write_effective_point(writer, spec, res)
        entries.append(entry)
        point_rows.append(res.point)

    writer.write_table(
        "points.tsv",
        ["point", "kind", "omega_over_pi", "theta_bar", "delta_r", "rescale_ratio"],
        [[p.index for p in point_rows],
         [(p.effective_kind or "floquet") for p in point_rows],
         [p.omega_over_pi for p in point_rows],
         [p.theta_bar for p in point_rows],
         [p.delta_r for p in point_rows],
         [p.rescale_ratio for p in point_rows]])

    _write_tau_tables(writer, spec, results)
    summary = {"scenario": spec.scenario, "points": entries}

    if spec.scenario in ("freq_sweep", "saturation_sweep"):
        summary["fits"] = _write_fits(writer, spec, entries)
    if spec.scenario == "saturation_sweep":
        summary["saturation"] = _saturation_statement(spec, entries)
    if spec.scenario == "flip_error_sweep":
        _write_f_table(writer, entries)

    writer.write_json("summary.json", summary)
    writer.finish(config_text=config_text, seed=spec.seed, extra=summary)
    return summary


def _write_tau_tables(writer: BundleWriter, spec: ScenarioSpec,
                      results: list[PointResult]) -> None:
    idx, real, taus, cens, fail = [], [], [], [], []
    srows = []
    for res in results:
        if res.floquet is None:
            continue
        run = res.floquet
        for r in range(run.realizations):
            idx.append(res.point.index)
            real.append(r)
            taus.append(run.tau_star_periods[r])
            cens.append(int(run.tau_censored[r]))
            fail.append(int(run.failed[r]))
        s = tau_star_summary(spec, run)
        srows.append((res.point, s))
    if idx:
        writer.write_table("tau_star.tsv",
                           ["point", "realization", "tau_star_periods", "censored", "failed"],
                           [idx, real, taus, cens, fail])
    if srows:
        writer.write_table(
            "tau_summary.tsv",
            ["point", "omega_over_pi", "theta_bar", "delta_r", "rescale_ratio",
             "n_valid", "n_censored", "tau_mean_periods", "tau_sd_periods"],
            [[p.index for p, _ in srows], [p.omega_over_pi for p, _ in srows],
             [p.theta_bar for p, _ in srows], [p.delta_r for p, _ in srows],
             [p.rescale_ratio for p, _ in srows], [s["n_valid"] for _, s in srows],
             [s["n_censored"] for _, s in srows], [s["mean"] for _, s in srows],
             [s["sd"] for _, s in srows]])

    tau_c_rows = []
    for res in results:
        if res.effective is None:
            continue
        s = tau_c_summary(spec, res.effective)
        tau_c_rows.append((res.point, s))
    if tau_c_rows:
        writer.write_table(
            "tau_c.tsv",
            ["point", "effective_kind", "theta_bar", "rescale_ratio", "tau_c",
             "censored", "n_valid"],
            [[p.index for p, _ in tau_c_rows],
             [p.effective_kind for p, _ in tau_c_rows],
             [p.theta_bar for p, _ in tau_c_rows],
             [p.rescale_ratio for p, _ in tau_c_rows],
             [s["tau_c"] for _, s in tau_c_rows],
             [s["censored"] for _, s in tau_c_rows],
             [s["n_valid"] for _, s in tau_c_rows]])


def _write_fits(writer: BundleWriter, spec: ScenarioSpec, entries: list[dict]) -> dict:
    """Exponential fits of mean tau* against omega, one per rescale ratio."""
    fits = {}
    groups: dict[float, list[dict]] = {}
    for e in entries:
        if e.get("kind") != "floquet" or "tau_star" not in e:
            continue
        groups.setdefault(e["rescale_ratio"], []).append(e)
    for ratio, grp in sorted(groups.items()):
        xs, ys, used, excluded = [], [], [], []
        for e in grp:
            s = e["tau_star"]
            if s["n_valid"] > 0 and math.isfinite(s["mean"]) and s["mean"] > 0:
                xs.append(e["omega_over_pi"] * math.pi)
                ys.append(s["mean"])
                used.append(e["omega_over_pi"])
            else:
                excluded.append(e["omega_over_pi"])
        key = f"rescale_{ratio:g}"
        if len(xs) >= 2:
            fit = log_linear_fit(xs, ys)
            fits[key] = {"slope": fit.slope, "intercept": fit.intercept,
                         "r_squared": fit.r_squared, "n_points": fit.n_points,
                         "omega_over_pi_used": used,
                         "omega_over_pi_excluded_fully_censored": excluded}
        else:
            fits[key] = {"error": "fewer than 2 uncensored points",
                         "omega_over_pi_excluded_fully_censored": excluded}
    writer.write_json("fit.json", fits)
    return fits


def _write_f_table(writer: BundleWriter, entries: list[dict]) -> None:
    rows = [e for e in entries if "subharmonic" in e]
    writer.write_table(
        "f_table.tsv",
        ["delta_r", "f_mean", "f_sd", "control_f_mean", "peak_frequency"],
        [[e["delta_r"] for e in rows],
         [e["subharmonic"]["f_mean"] for e in rows],
         [e["subharmonic"]["f_sd"] for e in rows],
         [e.get("control_f_mean", math.nan) for e in rows],
         [e["subharmonic"]["peak_frequency"] for e in rows]])


def _saturation_statement(spec: ScenarioSpec, entries: list[dict]) -> dict:
    """Flattening check at the top frequencies plus explicit censoring report."""
    out = {}
    floq = [e for e in entries if e.get("kind") == "floquet" and "tau_star" in e]
    ratios = sorted({e["rescale_ratio"] for e in floq})
    for ratio in ratios:
        grp = sorted((e for e in floq if e["rescale_ratio"] == ratio),
                     key=lambda e: e["omega_over_pi"])
        taus = [e["tau_star"] for e in grp]
        n = spec.realizations
        censor_fractions = {f'{e["omega_over_pi"]:g}': s["n_censored"] / n
                            for e, s in zip(grp, taus)}
        entry = {"censor_fraction_by_omega_over_pi": censor_fractions,
                 "horizon_periods": spec.horizon_periods,
                 "tau_mean_periods_by_omega_over_pi": {
                     f'{e["omega_over_pi"]:g}': s["mean"]
                     for e, s in zip(grp, taus)},
                 # one drive period lasts 2T, so the same numbers in time units
                 "tau_mean_time_by_omega_over_pi": {
                     f'{e["omega_over_pi"]:g}':
                         s["mean"] * 2.0 * spec.half_period(e["omega_over_pi"])
                     for e, s in zip(grp, taus)}}
        if len(grp) >= 3 and all(s["n_valid"] > 0 for s in taus):
            lo, mid, hi = taus[0], taus[-2], taus[-1]
            flat = abs(hi["mean"] - mid["mean"]) <= max(hi["sd"], mid["sd"])
            entry["top_two_within_1sd"] = bool(flat)
            entry["lowest_below_top_two"] = bool(
                lo["mean"] < min(mid["mean"], hi["mean"]))
            entry["statement"] = (
                "tau* flattens at the two highest frequencies (difference within "
                "1SD error bars)" if flat else
                "tau* still rising at the highest frequencies at this horizon")
        else:
            entry["statement"] = ("censoring at the configured horizon prevents the "
                                  "flattening comparison; fractions reported above")
        out[f"rescale_{ratio:g}"] = entry

    tau_cs = {f'{e["rescale_ratio"]:g}': e["tau_c"] for e in entries
              if e.get("kind") == "Dx" and "tau_c" in e}
    if tau_cs:
        out["dx_crossover_by_rescale"] = tau_cs
    return out
