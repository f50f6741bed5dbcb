"""Tests for the multilevel Gibbs sampler.

Correctness rests on: exact-moment agreement for several array shapes,
bit-for-bit reproducibility of the counter-based stream, equality of the
jitted and interpreted kernels, and a direct check of one site conditional
against its analytic law.
"""

import math

import numpy as np
import pytest
import scipy.stats

from jacobi_corners.densities import level_coefficients
from jacobi_corners.errors import DomainError, NumericError
from jacobi_corners.operators import expectation_e, expectation_p
from jacobi_corners.params import CornersArray, EnsembleParams, ObservableSpec
from jacobi_corners import sampler as smp


class TestRandomStream:
    def test_uniform_range_and_mean(self):
        with np.errstate(over="ignore"):
            vals = np.array([
                smp._u01(np.uint64(9), np.uint64(c)) for c in range(20000)
            ])
        assert vals.min() > 0.0
        assert vals.max() < 1.0
        assert abs(vals.mean() - 0.5) < 0.01
        assert abs(np.corrcoef(vals[:-1], vals[1:])[0, 1]) < 0.02

    def test_counter_is_pure_function(self):
        with np.errstate(over="ignore"):
            a = smp._u01(np.uint64(3), np.uint64(41))
            b = smp._u01(np.uint64(3), np.uint64(41))
            c = smp._u01(np.uint64(4), np.uint64(41))
        assert a == b
        assert a != c


class TestInitialArray:
    @pytest.mark.parametrize("theta,alpha,m,big_n", [
        (1, 2, 3, 3), (0.5, 1.0, 2, 5), (2, 1, 4, 1), (1, 1, 1, 4),
    ])
    def test_valid_interlacing(self, theta, alpha, m, big_n):
        params = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        corners = smp.init_corners(params, big_n)
        assert corners.big_n == big_n
        for n in range(1, big_n + 1):
            assert len(corners.level(n)) == min(n, m)

    def test_deterministic(self):
        params = EnsembleParams(theta=1, alpha=1, m_param=3)
        a = smp.init_corners(params, 4)
        b = smp.init_corners(params, 4)
        for n in range(1, 5):
            assert np.array_equal(a.level(n), b.level(n))


class TestReproducibility:
    def test_same_seed_bitwise(self):
        params = EnsembleParams(theta=0.7, alpha=1.5, m_param=3)
        cfg = smp.SamplerConfig(burn_in=100)
        a = smp.run_chain(params, 3, 500, seed=21, config=cfg, collect_levels=(3,))
        b = smp.run_chain(params, 3, 500, seed=21, config=cfg, collect_levels=(3,))
        assert np.array_equal(a.level_rows[3], b.level_rows[3])
        assert a.final_state.counter == b.final_state.counter

    def test_different_seed_differs(self):
        params = EnsembleParams(theta=0.7, alpha=1.5, m_param=3)
        cfg = smp.SamplerConfig(burn_in=100)
        a = smp.run_chain(params, 3, 200, seed=21, config=cfg, collect_levels=(3,))
        b = smp.run_chain(params, 3, 200, seed=22, config=cfg, collect_levels=(3,))
        assert not np.array_equal(a.level_rows[3], b.level_rows[3])

    def test_continuation_matches_single_run(self):
        params = EnsembleParams(theta=1.3, alpha=0.8, m_param=2)
        state0 = smp.ChainState(
            corners=smp.init_corners(params, 3), counter=0, sweeps=0
        )
        mid = smp.gibbs_sweeps(params, state0, 150, seed=8)
        end = smp.gibbs_sweeps(params, mid, 150, seed=8)
        direct = smp.gibbs_sweeps(params, state0, 300, seed=8)
        assert end.counter == direct.counter
        for n in range(1, 4):
            assert np.array_equal(end.corners.level(n), direct.corners.level(n))


class TestKernelTwins:
    def test_jitted_equals_interpreted(self):
        params = EnsembleParams(theta=0.7, alpha=1.5, m_param=3)
        cfg_nb = smp.SamplerConfig(burn_in=50, use_numba=True)
        cfg_py = smp.SamplerConfig(burn_in=50, use_numba=False)
        a = smp.run_chain(params, 3, 200, seed=3, config=cfg_nb,
                          collect_levels=(1, 2, 3))
        b = smp.run_chain(params, 3, 200, seed=3, config=cfg_py,
                          collect_levels=(1, 2, 3))
        for n in (1, 2, 3):
            assert np.array_equal(a.level_rows[n], b.level_rows[n])
        assert a.final_state.counter == b.final_state.counter


class TestSingleSiteConditional:
    def test_middle_coordinate_law(self):
        # N = M = 2, theta = 1: the middle coordinate given the top row
        # (a, b) has density proportional to x^-2 on (a, b)
        params = EnsembleParams(theta=1, alpha=2, m_param=2)
        coef = level_coefficients(params, 2)
        cx = np.ascontiguousarray(coef["pow_x"][1:])
        c1m = np.ascontiguousarray(coef["pow_1mx"][1:])
        cv = np.ascontiguousarray(coef["vand"][1:])
        cross = float(coef["cross"])
        flat = np.array([0.5, 0.3, 0.8])
        offsets = np.array([0, 1], dtype=np.int64)
        lengths = np.array([1, 2], dtype=np.int64)
        ctr = np.uint64(0)
        seed = np.uint64(77)
        out = np.empty(4000)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            for it in range(len(out)):
                status, ctr = smp._slice_update(
                    flat, offsets, lengths, 2, cx, c1m, cv, cross,
                    0, 0, seed, ctr, 1000,
                )
                assert status == 0
                out[it] = flat[0]
        assert out.min() > 0.3
        assert out.max() < 0.8
        target = math.log(0.8 / 0.3) / (1.0 / 0.3 - 1.0 / 0.8)
        assert abs(out.mean() - target) < 4.0 * out.std() / math.sqrt(len(out) / 8)


class TestMomentAgreement:
    def test_square_array(self):
        params = EnsembleParams(theta=1, alpha=2, m_param=3)
        specs = [
            ObservableSpec("power", 1, 1),
            ObservableSpec("power", 1, 3),
            ObservableSpec("elementary", 2, 3),
        ]
        _, ests = smp.estimate_observables(params, 3, specs,
                                           num_samples=30000, seed=11)
        for est, spec in zip(ests, specs):
            if spec.kind == "power":
                exact = expectation_p(params, [spec]).as_float
            else:
                exact = expectation_e(params, [spec]).as_float
            assert abs(est.value - exact) < 4.0 * est.stderr

    def test_saturated_array_fractional_theta(self):
        params = EnsembleParams(theta=0.5, alpha=1.0, m_param=2)
        spec = ObservableSpec("power", 1, 4)
        _, ests = smp.estimate_observables(params, 4, [spec],
                                           num_samples=30000, seed=5)
        exact = expectation_p(params, [spec]).as_float
        assert abs(ests[0].value - exact) < 4.0 * ests[0].stderr

    def test_level_one_projection_is_beta(self):
        # level-1 marginal of any array is Beta(theta*alpha, theta*M)
        params = EnsembleParams(theta=2.0, alpha=3.0, m_param=2)
        run = smp.run_chain(params, 5, 30000, seed=6, collect_levels=(1,))
        z1 = run.level_rows[1][:, 0]
        mean = 3.0 / (3.0 + 2.0)
        est = smp.batch_mean_estimate(z1)
        assert abs(est.value - mean) < 4.0 * est.stderr


class TestFailureModes:
    def test_slice_step_budget(self):
        params = EnsembleParams(theta=5.0, alpha=2.0, m_param=3)
        cfg = smp.SamplerConfig(burn_in=200, max_slice_steps=1)
        with pytest.raises(NumericError, match="level"):
            smp.run_chain(params, 3, 10, seed=1, config=cfg)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            smp.SamplerConfig(burn_in=-1)
        with pytest.raises(DomainError):
            smp.SamplerConfig(thin=0)
        with pytest.raises(DomainError):
            smp.SamplerConfig(max_slice_steps=0)

    def test_run_chain_validation(self):
        params = EnsembleParams(theta=1, alpha=1, m_param=2)
        with pytest.raises(DomainError):
            smp.run_chain(params, 2, 0, seed=1)
        with pytest.raises(DomainError):
            smp.run_chain(params, 2, 10, seed=1, collect_levels=(3,))
        with pytest.raises(DomainError):
            smp.run_chain(params, 2, 10, seed=1,
                          specs=[ObservableSpec("power", 1, 5)])


class TestInterlacingPreserved:
    def test_final_state_valid_and_rows_inside(self):
        params = EnsembleParams(theta=0.6, alpha=0.9, m_param=2)
        run = smp.run_chain(params, 4, 500, seed=9, collect_levels=(1, 2, 3, 4))
        final = run.final_state.corners
        assert isinstance(final, CornersArray)
        for n in (1, 2, 3, 4):
            rows = run.level_rows[n]
            assert rows.min() > 0.0
            assert rows.max() < 1.0
            assert np.all(np.diff(rows, axis=1) > 0.0) or rows.shape[1] == 1
        lo, hi = smp.empirical_support(run.level_rows[4])
        assert 0.0 < lo < hi < 1.0


class TestCumulantHelpers:
    def test_k_statistics_against_scipy(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            x = rng.gamma(2.0, size=400)
            ks = smp._k_statistics(x, 4)
            for order in (1, 2, 3, 4):
                ref = float(scipy.stats.kstat(x, order))
                assert ks[order] == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_gaussian_shape(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=40000)
        shape = smp.empirical_shape(x)
        skew, skew_se = shape["skewness"]
        kurt, kurt_se = shape["kurtosis"]
        assert abs(skew) < 4.0 * skew_se
        assert abs(kurt) < 4.0 * kurt_se

    def test_cumulants_of_known_distribution(self):
        rng = np.random.default_rng(7)
        lam = 3.0
        x = rng.poisson(lam, size=60000).astype(float)
        cum = smp.empirical_cumulants(x, max_order=4)
        for order in (1, 2, 3, 4):
            value, stderr = cum[order]
            assert abs(value - lam) < 5.0 * stderr

    def test_validation(self):
        with pytest.raises(DomainError):
            smp.empirical_cumulants(np.arange(4), max_order=4)
        with pytest.raises(DomainError):
            smp.empirical_cumulants(np.arange(100), max_order=5)
        with pytest.raises(DomainError):
            smp.batch_mean_estimate(np.array([1.0]))
        with pytest.raises(DomainError):
            smp.empirical_support(np.array([]))
