import numpy as np
import pytest

from floquet_dtc import (DriveParams, EffectiveHamiltonianSpec, EnsembleSpec,
                         InitialStateSpec, IntegratorConfig, PerturbationSpec,
                         evolve_effective, evolve_periods, magnetization_z,
                         perturb_chain, run_effective_ensemble,
                         run_floquet_ensemble, sample_initial_chain)
from floquet_dtc.ensembles import (_stored_stride, realization_seeds,
                                   sample_realization)


def small_ensemble(realizations=3, width=0.1):
    return EnsembleSpec(InitialStateSpec(np.pi, width), 0.01, realizations)


class TestSeeding:
    def test_sample_realization_matches_public_api(self):
        ens = small_ensemble()
        child = realization_seeds(99, 3)[1]
        primary, shadow = sample_realization(ens, 20, child)
        init_ss, pert_ss = realization_seeds(99, 3)[1].spawn(2)
        expected_primary = sample_initial_chain(ens.initial, 20, init_ss)
        expected_shadow = perturb_chain(expected_primary, PerturbationSpec(0.01),
                                        pert_ss)
        assert np.array_equal(primary.vectors, expected_primary.vectors)
        assert np.array_equal(shadow.vectors, expected_shadow.vectors)

    def test_streams_independent_lag_one(self):
        # lag-1 correlation of per-realization Mz(0) across the stream order
        ens = EnsembleSpec(InitialStateSpec(np.pi / 2, 0.3), 0.01, 256)
        mz0 = []
        for child in realization_seeds(7, ens.realizations):
            primary, _ = sample_realization(ens, 50, child)
            mz0.append(magnetization_z(primary))
        x = np.asarray(mz0)
        a, b = x[:-1] - x.mean(), x[1:] - x.mean()
        corr = (a * b).mean() / x.var()
        assert abs(corr) < 3.0 / np.sqrt(x.size)


class TestStoredStride:
    def test_small_runs_unstripped(self):
        assert _stored_stride(101, 200) == 1

    def test_stride_family(self):
        for n, cap in ((100001, 2001), (40001, 1000), (12345, 77)):
            s = _stored_stride(n, cap)
            assert s % 2 == 0 and (s // 2) % 2 == 1
            assert len(range(0, n, s)) <= cap


class TestFloquetEnsemble:
    def test_matches_single_chain_evolution(self, baseline_params):
        # the batched engine and the public per-chain propagator agree sample
        # by sample for each realization
        ens = small_ensemble(realizations=2)
        run = run_floquet_ensemble(baseline_params, ens, 24, 40, master_seed=5)
        for r, child in enumerate(realization_seeds(5, 2)):
            primary, _ = sample_realization(ens, 24, child)
            mz = []
            evolve_periods(primary, baseline_params, 40,
                           observer=lambda m, ph, ch: mz.append(magnetization_z(ch)))
            assert np.allclose(run.mz[:, r], mz, rtol=0.0, atol=1e-13)

    def test_decorrelator_starts_small_and_grows(self, baseline_params):
        run = run_floquet_ensemble(baseline_params, small_ensemble(), 50, 400,
                                   master_seed=6)
        assert run.d[0].max() < 0.2
        assert np.nanmean(run.d[-1]) > np.nanmean(run.d[0])

    def test_tau_crossing_consistent_with_series(self, baseline_params):
        run = run_floquet_ensemble(baseline_params, small_ensemble(), 50, 2000,
                                   master_seed=7)
        assert not run.tau_censored.any()
        # crossing times must bracket the stored-series crossing
        from floquet_dtc import thermalization_time
        for r in range(run.realizations):
            stored = thermalization_time(run.d[:, r], 0.9,
                                         sample_interval=run.stride)
            assert abs(stored.value - run.tau_star_t[r]) <= run.stride

    def test_unperturbed_twin_stays_identical(self):
        # delta = 0 and j = b = 0: shadow equals primary forever, d = 0
        params = DriveParams(0.0, 0.0, 0.0, 0.0, half_period=1.0)
        ens = EnsembleSpec(InitialStateSpec(np.pi, 0.1), 0.0, 2)
        run = run_floquet_ensemble(params, ens, 30, 50, master_seed=8)
        assert np.abs(run.d).max() < 1e-12
        assert run.tau_censored.all()

    def test_early_stop(self, baseline_params):
        run = run_floquet_ensemble(baseline_params, small_ensemble(), 50, 50_000,
                                   master_seed=9, early_stop_after=100)
        assert not run.tau_censored.any()
        assert run.periods_run < 50_000

    def test_norm_drift_reported(self, baseline_params):
        run = run_floquet_ensemble(baseline_params, small_ensemble(), 50, 300,
                                   master_seed=10)
        assert 0.0 <= run.norm_drift < 1e-12
        assert not run.failed.any()

    def test_per_period_decimation(self, baseline_params):
        run = run_floquet_ensemble(baseline_params, small_ensemble(), 30, 64,
                                   master_seed=11)
        assert np.array_equal(run.per_period_index(), np.arange(65))
        assert run.per_period_mz().shape == (65, 3)

    def test_strided_storage_keeps_boundaries(self, baseline_params):
        run = run_floquet_ensemble(baseline_params, small_ensemble(), 30, 500,
                                   master_seed=12, series_cap=101)
        assert run.stride > 1
        assert np.all(run.sample_m % run.stride == 0)
        # decorrelator crossing still resolved at full resolution
        assert np.isfinite(run.tau_star_t).all()

    def test_deterministic_rerun(self, baseline_params):
        a = run_floquet_ensemble(baseline_params, small_ensemble(), 40, 100,
                                 master_seed=13)
        b = run_floquet_ensemble(baseline_params, small_ensemble(), 40, 100,
                                 master_seed=13)
        assert np.array_equal(a.mz, b.mz)
        assert np.array_equal(a.tau_star_t, b.tau_star_t, equal_nan=True)

    def test_batch_size_invariance(self, baseline_params):
        # realization 0 must not care how many others run alongside
        ens1 = small_ensemble(realizations=1)
        ens4 = small_ensemble(realizations=4)
        a = run_floquet_ensemble(baseline_params, ens1, 30, 60, master_seed=14)
        b = run_floquet_ensemble(baseline_params, ens4, 30, 60, master_seed=14)
        assert np.array_equal(a.mz[:, 0], b.mz[:, 0])
        assert np.array_equal(a.d[:, 0], b.d[:, 0])


class TestEffectiveEnsemble:
    def test_matches_single_chain_strang(self, baseline_params):
        spec = EffectiveHamiltonianSpec("Dx", baseline_params, rescale_ratio=14.0)
        ens = small_ensemble(realizations=2)
        cfg = IntegratorConfig(dt=0.05)
        run = run_effective_ensemble(spec, ens, 24, 10.0, cfg, master_seed=15,
                                     sample_interval=1.0)
        child = realization_seeds(15, 2)[0]
        primary, _ = sample_realization(ens, 24, child)
        final = evolve_effective(primary, spec, cfg, 10.0)
        assert abs(run.mz[-1, 0] - magnetization_z(final)) < 1e-12

    def test_sample_times(self, baseline_params):
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        run = run_effective_ensemble(spec, small_ensemble(2), 16, 5.0,
                                     IntegratorConfig(dt=0.05), master_seed=16,
                                     sample_interval=1.0)
        assert np.allclose(run.times, np.arange(6.0))
        assert run.mz.shape == (6, 2)

    def test_norms_preserved(self, baseline_params):
        spec = EffectiveHamiltonianSpec("Dx", baseline_params)
        run = run_effective_ensemble(spec, small_ensemble(2), 16, 50.0,
                                     IntegratorConfig(dt=0.05), master_seed=17)
        assert run.norm_drift < 1e-12

    def test_bad_sample_interval(self, baseline_params):
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        with pytest.raises(ValueError):
            run_effective_ensemble(spec, small_ensemble(2), 16, 5.0,
                                   IntegratorConfig(dt=0.3), master_seed=1,
                                   sample_interval=1.0)

    def test_equator_x_spins_fixed(self):
        # all spins along +x under the flip-symmetric generator with only the
        # x field: exact fixed point, Mz identically zero
        from floquet_dtc import SpinChain
        from floquet_dtc.effective import strang_step
        from floquet_dtc import stepping
        params = DriveParams(0.0, 0.0, 0.0, -0.3, half_period=1.0)
        spec = EffectiveHamiltonianSpec("Dx", params)
        chain = SpinChain([[1.0, 0.0, 0.0]] * 8)
        out = evolve_effective(chain, spec, IntegratorConfig(dt=0.1), 20.0)
        assert np.abs(out.vectors - chain.vectors).max() < 1e-13
        assert magnetization_z(out) == 0.0
