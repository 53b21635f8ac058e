import math

import numpy as np
import pytest
from scipy import integrate, stats

from tailblocks import (
    RngStream,
    SimulationSpec,
    f1_inverse_survival,
    f1_survival,
    f2_inverse_survival,
    f2_survival,
    make_rng,
    run_simulation,
    sample_f1,
    sample_f2,
    sample_stable,
    sample_student,
    simulate_iid,
    simulate_ou_stable,
    simulate_student_diffusion,
)
from tailblocks.simulate import _ar1_path, _student_diffusion_steps


class TestStreams:
    def test_determinism(self):
        a = make_rng(12, 3).random(100)
        b = make_rng(12, 3).random(100)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = make_rng(12, 0).random(100)
        b = make_rng(12, 1).random(100)
        assert not np.array_equal(a, b)

    def test_stream_cross_correlation(self):
        a = make_rng(5, 1).random(100_000)
        b = make_rng(5, 2).random(100_000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.01

    def test_seed_range_validated(self):
        with pytest.raises(ValueError):
            RngStream(seed=-1)
        with pytest.raises(ValueError):
            RngStream(seed=0, stream_id=2 ** 64)
        RngStream(seed=2 ** 64 - 1, stream_id=0).generator()


class TestStableSampler:
    def test_alpha_two_variance(self):
        x = sample_stable(make_rng(42), 2.0, size=100_000)
        assert 1.9 <= float(np.var(x)) <= 2.1

    def test_alpha_one_symmetry(self):
        x = sample_stable(make_rng(43), 1.0, size=100_000)
        assert -0.05 <= float(np.median(x)) <= 0.05

    def test_tail_slope_alpha_15(self):
        x = np.abs(sample_stable(make_rng(45), 1.5, size=1_000_000))
        grid = np.logspace(1, 2, 15)
        survival = np.array([(x > g).mean() for g in grid])
        slope = np.polyfit(np.log(grid), np.log(survival), 1)[0]
        assert -1.7 <= slope <= -1.3

    def test_scale_and_location(self):
        x = sample_stable(make_rng(46), 2.0, scale=3.0, location=7.0, size=50_000)
        assert float(np.mean(x)) == pytest.approx(7.0, abs=0.1)
        assert float(np.var(x)) == pytest.approx(18.0, rel=0.05)

    def test_alpha_two_matches_normal_ks(self):
        x = sample_stable(make_rng(47), 2.0, size=50_000)
        ks = stats.kstest(x, lambda v: stats.norm.cdf(v, 0.0, math.sqrt(2.0))).statistic
        assert ks < 0.01

    def test_cauchy_case_matches_tan_representation(self):
        # alpha=1, beta=0 reduces to tan(u); check against the Cauchy law
        x = sample_stable(make_rng(48), 1.0, size=50_000)
        ks = stats.kstest(x, stats.cauchy.cdf).statistic
        assert ks < 0.01

    def test_parameter_validation(self):
        rng = make_rng(0)
        for kwargs in (dict(alpha=0.0), dict(alpha=2.1), dict(alpha=1.0, beta=2.0),
                       dict(alpha=1.0, scale=0.0)):
            with pytest.raises(ValueError):
                sample_stable(rng, **kwargs)

    def test_scalar_draw(self):
        assert isinstance(sample_stable(make_rng(1), 1.5), float)


class TestStudentSampler:
    def test_symmetry_and_location(self):
        x = sample_student(make_rng(50), 3.0, 1.0, 0.0, size=100_000)
        assert -0.05 <= float(np.mean(x)) <= 0.05
        y = sample_student(make_rng(51), 3.0, 1.0, 5.0, size=100_000)
        assert 4.9 <= float(np.median(y)) <= 5.1

    def test_variance_identity(self):
        # second moment of the density (1 + ((x-mu)/delta)^2)^(-(nu+1)/2) is
        # delta^2 / (nu - 2); quadrature cross-check below pins the constant
        nu, delta = 3.0, 1.0
        norm = math.gamma((nu + 1) / 2) / (delta * math.sqrt(math.pi) * math.gamma(nu / 2))
        second, _ = integrate.quad(
            lambda x: norm * x * x * (1 + (x / delta) ** 2) ** (-(nu + 1) / 2),
            -np.inf, np.inf,
        )
        assert second == pytest.approx(delta ** 2 / (nu - 2), rel=1e-9)
        x = sample_student(make_rng(52), nu, delta, 0.0, size=1_000_000)
        assert float(np.var(x)) == pytest.approx(second, abs=0.1)

    def test_tail_parameter_is_tail_index(self):
        x = np.abs(sample_student(make_rng(53), 2.0, 1.0, 0.0, size=1_000_000))
        grid = np.logspace(1, 2, 15)
        survival = np.array([(x > g).mean() for g in grid])
        slope = np.polyfit(np.log(grid), np.log(survival), 1)[0]
        assert -2.4 <= slope <= -1.6

    def test_matches_scaled_t_distribution(self):
        nu, delta, mu = 3.0, 2.0, -1.0
        x = sample_student(make_rng(54), nu, delta, mu, size=50_000)
        # X = mu + delta * T / sqrt(nu) with T standard Student t
        ks = stats.kstest(x, lambda v: stats.t.cdf(math.sqrt(nu) * (v - mu) / delta, nu)).statistic
        assert ks < 0.01

    def test_validation(self):
        with pytest.raises(ValueError):
            sample_student(make_rng(0), 1.0)
        with pytest.raises(ValueError):
            sample_student(make_rng(0), 3.0, delta=0.0)


class TestParetoLaws:
    def test_f1_algebraic_inverse(self):
        assert float(f1_inverse_survival(0.25)) == pytest.approx(16.0, abs=1e-12)
        assert float(f1_survival(16.0)) == pytest.approx(0.25, abs=1e-15)

    def test_f1_roundtrip(self):
        for u in (0.9, 0.5, 0.1, 1e-4):
            assert float(f1_survival(f1_inverse_survival(u))) == pytest.approx(u, abs=1e-12)

    def test_f2_boundary(self):
        assert f2_inverse_survival(1.0) == math.e
        assert float(f2_survival(math.e)) == pytest.approx(1.0, abs=1e-15)

    def test_f2_bisection_value(self):
        assert f2_inverse_survival(0.1) == pytest.approx(25.756, abs=0.01)

    def test_f2_roundtrip(self):
        for u in (0.9, 0.5, 0.1, 1e-4):
            assert float(f2_survival(f2_inverse_survival(u))) == pytest.approx(u, abs=1e-9)

    def test_f2_domain(self):
        with pytest.raises(ValueError):
            f2_inverse_survival(0.0)
        with pytest.raises(ValueError):
            f2_inverse_survival(1.5)

    def test_draws_respect_support(self):
        assert np.all(sample_f1(make_rng(60), size=1000) >= 1.0)
        assert np.all(sample_f2(make_rng(61), size=1000) >= math.e)

    def test_f1_tail_slope(self):
        x = sample_f1(make_rng(62), size=1_000_000)
        grid = np.logspace(2, 4, 15)
        survival = np.array([(x > g).mean() for g in grid])
        slope = np.polyfit(np.log(grid), np.log(survival), 1)[0]
        assert -0.6 <= slope <= -0.4


class TestOuStable:
    def test_zero_noise_contraction(self):
        path = _ar1_path(1.0, 1.0 - 1.0 * 0.01, np.zeros(1))
        assert path[0] == pytest.approx(0.99, abs=1e-15)

    def test_zero_noise_decay(self):
        path = _ar1_path(1.0, 0.99, np.zeros(300))
        assert np.allclose(path, 0.99 ** np.arange(1, 301))

    def test_instability_rejected(self):
        with pytest.raises(ValueError):
            simulate_ou_stable(make_rng(0), 1.0, 150.0, 10, substeps=100)

    def test_lag_one_autocorrelation_gaussian_case(self):
        series = simulate_ou_stable(make_rng(46), 2.0, 1.0, 100_000)
        v = series.values
        ac1 = float(np.corrcoef(v[:-1], v[1:])[0, 1])
        assert ac1 == pytest.approx(math.exp(-1.0), abs=0.05)

    def test_stationarity_halves(self):
        series = simulate_ou_stable(make_rng(99), 2.0, 1.0, 40_000)
        v = series.values
        half = v.size // 2
        a, b = v[:half], v[half:]
        # mean and variance of halves agree within 3 standard errors; the
        # effective sample size accounts for the lag-1 correlation
        rho = math.exp(-1.0)
        n_eff = half * (1 - rho) / (1 + rho)
        se_mean = math.sqrt(np.var(v) / n_eff)
        assert abs(a.mean() - b.mean()) < 3 * math.sqrt(2) * se_mean
        se_var = np.var(v) * math.sqrt(2.0 / n_eff)
        assert abs(a.var() - b.var()) < 3 * math.sqrt(2) * se_var

    def test_length_and_burn_in(self):
        series = simulate_ou_stable(make_rng(3), 1.0, 1.0, 500, substeps=10, burn_in=7)
        assert series.n == 500

    def test_determinism(self):
        a = simulate_ou_stable(make_rng(8, 1), 1.0, 1.0, 200)
        b = simulate_ou_stable(make_rng(8, 1), 1.0, 1.0, 200)
        assert np.array_equal(a.values, b.values)


def _student_cdf(x, nu=3.0, delta=1.0, mu=0.0):
    return stats.t.cdf(math.sqrt(nu) * (np.asarray(x) - mu) / delta, nu)


class TestStudentDiffusion:
    def test_zero_noise_fixed_point(self):
        path = _student_diffusion_steps(0.0, np.zeros(50), 0.01, 2.0, 0.0, 1.0, 3.0)
        assert np.all(path == 0.0)

    def test_zero_noise_drift_decay(self):
        # with z = 0 the Milstein correction -(c/2)*d*dt remains active
        theta, dt, nu, delta, mu = 2.0, 0.01, 3.0, 1.0, 0.0
        c = 2.0 * theta / (nu - 1.0)
        x0 = 1.5
        path = _student_diffusion_steps(x0, np.zeros(1), dt, theta, mu, delta, nu)
        want = x0 - theta * x0 * dt + 0.5 * c * dt * x0 * (0.0 - 1.0)
        assert path[0] == pytest.approx(want, abs=1e-15)

    def test_single_step_formula(self):
        theta, dt, nu, delta, mu, x0, z = 2.0, 0.01, 3.0, 1.0, 0.5, 2.0, 0.7
        c = 2.0 * theta / (nu - 1.0)
        d = x0 - mu
        sigma = math.sqrt(c * (delta ** 2 + d ** 2))
        want = x0 - theta * d * dt + sigma * math.sqrt(dt) * z + 0.5 * c * d * dt * (z * z - 1.0)
        path = _student_diffusion_steps(x0, np.array([z]), dt, theta, mu, delta, nu)
        assert path[0] == pytest.approx(want, abs=1e-15)

    def test_milstein_correction_wired(self):
        dt = 1e-3
        z = make_rng(123).standard_normal((64, 1000))
        diffs = []
        for row in z:
            mil = _student_diffusion_steps(2.0, row, dt, 2.0, 0.0, 1.0, 3.0)
            eul = _student_diffusion_steps(2.0, row, dt, 2.0, 0.0, 1.0, 3.0, milstein=False)
            diffs.append(mil[-1] - eul[-1])
        rms = float(np.sqrt(np.mean(np.square(diffs))))
        assert 0.0 < rms < math.sqrt(dt)

    def test_marginal_distribution(self):
        series = simulate_student_diffusion(make_rng(47), 3.0, 1.0, 0.0, 2.0, 20_000)
        ks = stats.kstest(series.values, _student_cdf).statistic
        assert ks < 0.03

    def test_instability_rejected(self):
        with pytest.raises(ValueError):
            simulate_student_diffusion(make_rng(0), 3.0, 1.0, 0.0, 150.0, 10, substeps=100)

    def test_validation(self):
        with pytest.raises(ValueError):
            simulate_student_diffusion(make_rng(0), 0.9, 1.0, 0.0, 1.0, 10)
        with pytest.raises(ValueError):
            simulate_student_diffusion(make_rng(0), 3.0, -1.0, 0.0, 1.0, 10)

    def test_determinism(self):
        a = simulate_student_diffusion(make_rng(9, 2), 3.0, 1.0, 0.0, 2.0, 100)
        b = simulate_student_diffusion(make_rng(9, 2), 3.0, 1.0, 0.0, 2.0, 100)
        assert np.array_equal(a.values, b.values)


class TestIidWrapper:
    def test_matches_direct_sampler(self):
        a = simulate_iid(make_rng(70, 1), "stable", 100, alpha=1.5)
        b = sample_stable(make_rng(70, 1), 1.5, size=100)
        assert np.array_equal(a.values, b)

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            simulate_iid(make_rng(0), "normal", 0)

    def test_unknown_law(self):
        with pytest.raises(ValueError):
            simulate_iid(make_rng(0), "pareto", 10)

    def test_normal_params(self):
        x = simulate_iid(make_rng(71), "normal", 50_000, location=2.0, scale=3.0)
        assert float(np.mean(x.values)) == pytest.approx(2.0, abs=0.05)
        assert float(np.std(x.values)) == pytest.approx(3.0, rel=0.02)
        with pytest.raises(ValueError):
            simulate_iid(make_rng(0), "normal", 5, scale=-1.0)
        with pytest.raises(ValueError):
            simulate_iid(make_rng(0), "normal", 5, nonsense=2.0)

    def test_same_stream_twice_identical(self):
        a = simulate_iid(make_rng(72, 9), "f2", 50)
        b = simulate_iid(make_rng(72, 9), "f2", 50)
        assert np.array_equal(a.values, b.values)


class TestSimulationSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimulationSpec("unknown", 10)
        with pytest.raises(ValueError):
            SimulationSpec("iid_normal", 0)
        with pytest.raises(ValueError):
            SimulationSpec("iid_normal", 10, substeps=0)
        with pytest.raises(ValueError):
            SimulationSpec("iid_normal", 10, burn_in=-1)

    def test_dispatch_determinism(self):
        spec = SimulationSpec("student_diffusion", 50,
                              {"nu": 3.0, "delta": 1.0, "mu": 0.0, "theta": 2.0})
        a = run_simulation(spec, 11, 4)
        b = run_simulation(spec, 11, 4)
        assert np.array_equal(a.values, b.values)
        assert a.source.startswith("student_diffusion")

    def test_all_processes_run(self):
        specs = [
            SimulationSpec("iid_stable", 16, {"alpha": 1.0}),
            SimulationSpec("iid_student", 16, {"nu": 3.0}),
            SimulationSpec("iid_normal", 16),
            SimulationSpec("pareto_f1", 16),
            SimulationSpec("f2", 16),
            SimulationSpec("ou_stable", 16, {"alpha": 1.0, "lam": 1.0}, substeps=10),
            SimulationSpec("student_diffusion", 16,
                           {"nu": 3.0, "delta": 1.0, "mu": 0.0, "theta": 2.0}, substeps=10),
        ]
        for spec in specs:
            out = run_simulation(spec, 1, 0)
            assert out.n == 16
