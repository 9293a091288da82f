import numpy as np
import pytest

from floquet_dtc import (DriveParams, EffectiveHamiltonianSpec, IntegratorConfig,
                         SpinChain, crossover_time_tau_c, evolve_effective,
                         global_flip, ode_oracle, one_period, oracle_one_period)
from floquet_dtc.oracle import OracleError, generator_energy

from helpers import ols_slope_t_statistic, rodrigues
from conftest import random_chain


class TestOdeOracle:
    def test_site_bound_enforced(self, baseline_params):
        with pytest.raises(ValueError):
            ode_oracle(random_chain(9, 0), "Hz", 1.0, params=baseline_params)

    def test_unknown_generator(self, baseline_params):
        with pytest.raises(ValueError):
            ode_oracle(random_chain(4, 0), "Hq", 1.0, params=baseline_params)

    def test_z_components_conserved_under_hz(self, baseline_params):
        chain = random_chain(6, seed=1)
        res = ode_oracle(chain, "Hz", 5.0, tol=1e-11, params=baseline_params)
        assert np.abs(res.chain.vectors[:, 2] - chain.vectors[:, 2]).max() < 1e-9
        assert res.norm_drift < 1e-9

    def test_energy_conserved(self, baseline_params):
        chain = random_chain(6, seed=2)
        for gen in ("Hz", "Hx", "D0", "Dx"):
            res = ode_oracle(chain, gen, 10.0, tol=1e-11, params=baseline_params)
            before = generator_energy(chain, gen, baseline_params)
            after = generator_energy(res.chain, gen, baseline_params)
            assert abs(after - before) < 10 * 1e-9, gen

    def test_single_spin_precession_closed_form(self):
        # field-only averaged generator: precession about (b_x, 0, b_z) at
        # rate |b| (two decoupled spins with j = 0)
        params = DriveParams(0.0, 0.0, -0.016, -0.3, half_period=1.0)
        chain = SpinChain([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        total = 7.0
        res = ode_oracle(chain, "D0", total, tol=1e-12, params=params)
        b = np.array([params.b_x, 0.0, params.b_z])
        rate = np.linalg.norm(b)
        axis = b / rate
        expected = np.array([rodrigues(v, axis, rate * total) for v in chain.vectors])
        assert np.abs(res.chain.vectors - expected).max() < 1e-9


class TestExactMapAgainstOracle:
    def test_half_period_z_matches(self, baseline_params):
        from floquet_dtc import half_period_z
        chain = random_chain(4, seed=3)
        exact = half_period_z(chain, baseline_params)
        ode = ode_oracle(chain, "Hz", baseline_params.half_period, tol=1e-11,
                         params=baseline_params)
        assert np.abs(exact.vectors - ode.chain.vectors).max() < 1e-9

    def test_half_period_x_matches(self, baseline_params):
        from floquet_dtc import half_period_x
        chain = random_chain(4, seed=4)
        exact = half_period_x(chain, baseline_params)
        ode = ode_oracle(chain, "Hx", baseline_params.half_period, tol=1e-11,
                         params=baseline_params)
        assert np.abs(exact.vectors - ode.chain.vectors).max() < 1e-9

    def test_one_period_matches(self, baseline_params):
        chain = random_chain(4, seed=5)
        exact = one_period(chain, baseline_params)
        ode = oracle_one_period(chain, baseline_params, tol=1e-11)
        assert np.abs(exact.vectors - ode.chain.vectors).max() < 1e-9


class TestEffectiveSpec:
    def test_dx_drops_z_field(self, baseline_params):
        d0 = EffectiveHamiltonianSpec("D0", baseline_params)
        dx = EffectiveHamiltonianSpec("Dx", baseline_params)
        assert d0.coefficients() == (2 * 0.399, -0.016, 2 * 0.011, -0.3)
        assert dx.coefficients() == (2 * 0.399, 0.0, 2 * 0.011, -0.3)

    def test_rescale_applies_to_jx_and_bz(self, baseline_params):
        d0 = EffectiveHamiltonianSpec("D0", baseline_params, rescale_ratio=20.0)
        pz, fz, px, fx = d0.coefficients()
        assert np.isclose(fz, -0.32)
        assert np.isclose(px, 2 * 0.22)
        assert pz == 2 * 0.399 and fx == -0.3

    def test_bad_kind(self, baseline_params):
        with pytest.raises(ValueError):
            EffectiveHamiltonianSpec("Hz", baseline_params)


class TestStrangSplitting:
    def test_pure_z_part_exact_any_dt(self, baseline_params):
        # j_x = b_x = 0 makes the x sub-step the identity; the two z half
        # steps then compose into the exact map regardless of dt
        from dataclasses import replace
        params = replace(baseline_params, j_x=0.0, b_x=0.0)
        spec = EffectiveHamiltonianSpec("D0", params)
        chain = random_chain(6, seed=6)
        coarse = evolve_effective(chain, spec, IntegratorConfig(dt=0.5), 4.0)
        ode = ode_oracle(chain, "D0", 4.0, tol=1e-12, params=params)
        assert np.abs(coarse.vectors - ode.chain.vectors).max() < 1e-9

    def test_norms_exact(self, baseline_params):
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        chain = random_chain(16, seed=7)
        out = evolve_effective(chain, spec, IntegratorConfig(dt=0.05), 200.0)
        assert out.max_norm_error() < 1e-12

    def test_second_order_convergence(self, baseline_params):
        # halving dt cuts the error against the adaptive oracle ~4x
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        chain = random_chain(4, seed=8)
        ref = ode_oracle(chain, "D0", 10.0, tol=1e-12, params=baseline_params)
        errs = []
        for dt in (0.04, 0.02):
            out = evolve_effective(chain, spec, IntegratorConfig(dt=dt), 10.0)
            errs.append(np.abs(out.vectors - ref.chain.vectors).max())
        ratio = errs[0] / errs[1]
        assert 3.2 <= ratio <= 4.8

    def test_dt_must_divide_total_time(self, baseline_params):
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        with pytest.raises(ValueError):
            evolve_effective(random_chain(4, 0), spec, IntegratorConfig(dt=0.3), 1.0)

    def test_rejects_non_finite_dt(self):
        with pytest.raises(ValueError):
            IntegratorConfig(dt=float("nan"))
        with pytest.raises(ValueError):
            IntegratorConfig(dt=0.0)

    def test_dx_commutes_with_global_flip(self, baseline_params):
        spec = EffectiveHamiltonianSpec("Dx", baseline_params)
        cfg = IntegratorConfig(dt=0.05)
        chain = random_chain(10, seed=9)
        a = evolve_effective(global_flip(chain), spec, cfg, 50.0)
        b = global_flip(evolve_effective(chain, spec, cfg, 50.0))
        assert np.abs(a.vectors - b.vectors).max() < 1e-10

    def test_observer_sampling(self, baseline_params):
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        times = []
        evolve_effective(random_chain(4, 1), spec, IntegratorConfig(dt=0.1), 1.0,
                         observer=lambda t, ch: times.append(t),
                         sample_interval=0.5)
        assert np.allclose(times, [0.0, 0.5, 1.0])

    def test_energy_drift_non_secular(self, baseline_params):
        # symplectic splitting of an autonomous flow: bounded oscillatory
        # energy error, no linear trend at 95% confidence
        spec = EffectiveHamiltonianSpec("D0", baseline_params)
        chain = random_chain(8, seed=10)
        energies = []

        def sample(t, view):
            energies.append(generator_energy(view, "D0", baseline_params))

        n_steps = 100_000
        dt = 0.05
        evolve_effective(chain, spec, IntegratorConfig(dt=dt), n_steps * dt,
                         observer=sample, sample_interval=100 * dt)
        e = np.array(energies)
        rel = (e - e[0]) / max(1.0, abs(e[0]))
        assert np.abs(rel).max() < 1e-3  # bounded
        t_stat = ols_slope_t_statistic(np.arange(e.size), e)
        assert abs(t_stat) < 1.96


class TestCrossoverTime:
    def test_constant_series_censored(self):
        res = crossover_time_tau_c(np.full(400, 0.5), threshold=0.05)
        assert res.censored and res.value is None

    def test_step_series(self):
        mz = np.concatenate([np.full(80, 0.5), np.zeros(200)])
        res = crossover_time_tau_c(mz, threshold=0.05, sample_interval=2.0,
                                   persistence_window=50)
        assert not res.censored
        assert np.isclose(res.value, 80 * 2.0)

    def test_persistence_required(self):
        # short dip below threshold must not count
        mz = np.full(300, 0.5)
        mz[100:120] = 0.0
        res = crossover_time_tau_c(mz, threshold=0.05, persistence_window=50)
        assert res.censored

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            crossover_time_tau_c([], threshold=0.05)
