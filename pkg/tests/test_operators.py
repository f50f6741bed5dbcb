"""Moment-engine oracles: closed forms, quadrature, and cross-path checks."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from jacobi_corners import DomainError, EnsembleParams, ObservableSpec
from jacobi_corners.densities import log_backward_density, log_level_density
from jacobi_corners.operators import (
    ExactScalar,
    OperatorChain,
    apply_operator_chain,
    covariance_p,
    expectation_e,
    expectation_p,
    h_ratio,
    pe_coefficients,
)


def chain(*entries):
    return OperatorChain(entries=tuple(entries))


def beta_moment(a: Fraction, b: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for r in range(k):
        out *= (a + r) / (a + b + r)
    return out


class TestHRatio:
    def test_pinned_value(self):
        p = EnsembleParams(theta=1, alpha=1, m_param=2)  # theta*alpha=1, M*theta=2
        assert h_ratio(p, 0.0) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_pole(self):
        p = EnsembleParams(theta=1, alpha=1, m_param=2)
        with pytest.raises(DomainError):
            h_ratio(p, 3.0)


class TestAnchors:
    @pytest.mark.parametrize(
        "theta,alpha,m",
        [
            (Fraction(1, 2), Fraction(3, 2), 2),
            (Fraction(2), Fraction(1), 3),
            (Fraction(5, 3), Fraction(7, 4), 1),
        ],
    )
    def test_first_moment_level_one(self, theta, alpha, m):
        p = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        out = apply_operator_chain(p, chain((1, 1)))
        assert out.exact
        assert out.value == alpha / (alpha + m)

    def test_second_moment_level_one(self):
        theta, alpha, m = Fraction(3, 4), Fraction(6, 5), 2
        p = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        out = apply_operator_chain(p, chain((1, 1), (1, 1)))
        a, b = theta * alpha, theta * m
        assert out.value == a * (a + 1) / ((a + b) * (a + b + 1))

    @pytest.mark.parametrize("big_n,m", [(2, 3), (3, 3), (4, 2)])
    def test_full_elementary(self, big_n, m):
        alpha = Fraction(7, 5)
        p = EnsembleParams(theta=Fraction(1, 2), alpha=alpha, m_param=m)
        out = apply_operator_chain(p, chain((big_n, big_n)))
        expect = Fraction(1)
        for j in range(big_n):
            expect *= (alpha + j) / (alpha + m + j)
        assert out.value == expect

    def test_power_expectation_is_beta_moment(self):
        theta, alpha, m = Fraction(4, 3), Fraction(1, 2), 3
        p = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        out = expectation_p(p, [ObservableSpec(kind="power", degree=2, level=1)])
        assert out.value == beta_moment(theta * alpha, theta * m, 2)

    def test_variance_anchor(self):
        theta, alpha, m = Fraction(1, 2), Fraction(2), 2
        p = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        spec = ObservableSpec(kind="power", degree=1, level=1)
        out = covariance_p(p, spec, spec)
        a, b = theta * alpha, theta * m
        assert out.value == a * b / ((a + b) ** 2 * (a + b + 1))


class TestQuadratureOracle:
    def test_cross_level_product_moment(self):
        # E[e_1(2) e_1(1)] against direct integration over the two-level array;
        # theta = 1 drives the evaluation through the regularized path
        theta, alpha, m = 1, Fraction(3, 2), 2
        p = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        out = expectation_e(
            p,
            [
                ObservableSpec(kind="elementary", degree=1, level=2),
                ObservableSpec(kind="elementary", degree=1, level=1),
            ],
        )
        # at theta = 1, alpha = 3/2, M = 2 the joint density of
        # (z1 < z2, w in (z1, z2)) is proportional to
        # (z2 - z1) (z1 z2)^(3/2) / w^2; the w-integrals are elementary:
        # int w^-1 dw = log(z2/z1), int w^-2 dw = (z2 - z1)/(z1 z2)
        num, _ = integrate.dblquad(
            lambda z1, z2: (z2 - z1) * (z1 * z2) ** 1.5 * (z1 + z2)
            * (math.log(z2) - math.log(z1)),
            0.0, 1.0, 0.0, lambda z2: z2, epsabs=1e-11, epsrel=1e-10,
        )
        den, _ = integrate.dblquad(
            lambda z1, z2: (z2 - z1) ** 2 * math.sqrt(z1 * z2),
            0.0, 1.0, 0.0, lambda z2: z2, epsabs=1e-11, epsrel=1e-10,
        )
        oracle = num / den
        assert out.as_float == pytest.approx(oracle, abs=1e-7)
        assert out.mode == "exact-laurent"


class TestRegularizedPaths:
    def test_laurent_engages_at_half(self):
        p = EnsembleParams(theta=Fraction(1, 2), alpha=Fraction(1), m_param=3)
        spec = ObservableSpec(kind="power", degree=1, level=3)
        out = covariance_p(p, spec, spec)
        assert out.exact
        assert 0 < out.value < 1

    def test_laurent_vs_richardson(self):
        # same moment, exact rational path vs float Richardson path
        exact_p = EnsembleParams(theta=Fraction(1, 2), alpha=Fraction(5, 4), m_param=2)
        float_p = EnsembleParams(theta=0.5, alpha=1.25, m_param=2)
        specs = [ObservableSpec(kind="power", degree=2, level=3)]
        a = expectation_p(exact_p, specs)
        b = expectation_p(float_p, specs)
        assert a.exact and not b.exact
        assert b.value == pytest.approx(float(a.value), abs=1e-12)

    def test_near_pole_float64_stability(self):
        # theta just off 1/2: machine path must stay close to the exact
        # value at 1/2 (the moment is continuous in theta)
        exact_p = EnsembleParams(theta=Fraction(1, 2), alpha=Fraction(1), m_param=2)
        near_p = EnsembleParams(theta=0.5 + 1e-6, alpha=1.0, m_param=2)
        specs = [ObservableSpec(kind="power", degree=2, level=3)]
        a = expectation_p(exact_p, specs)
        b = expectation_p(near_p, specs, precision=53)
        assert b.value == pytest.approx(float(a.value), abs=1e-4)

    def test_direction_independence(self):
        from jacobi_corners.operators import _chain_value

        p = EnsembleParams(theta=Fraction(1, 2), alpha=Fraction(1), m_param=3)
        entries = ((3, 1), (3, 1))
        default = _chain_value(p, entries, "exact", 256)
        n1 = 3
        other = _chain_value(
            p, entries, "exact", 256,
            _direction=[Fraction(i**3, n1**3) for i in range(1, n1 + 1)],
        )
        assert default.value == other.value

    def test_commutativity_same_level(self):
        p = EnsembleParams(theta=Fraction(1, 2), alpha=Fraction(2), m_param=4)
        a = apply_operator_chain(p, chain((3, 2), (3, 1)))
        b = apply_operator_chain(p, chain((3, 1), (3, 2)))
        assert a.value == b.value

    def test_mode_agreement(self):
        p = EnsembleParams(theta=Fraction(3, 4), alpha=Fraction(5, 4), m_param=3)
        c = chain((4, 2), (2, 1))
        ex = apply_operator_chain(p, c, mode="exact")
        f64 = apply_operator_chain(p, c, mode="float", precision=53)
        mp = apply_operator_chain(p, c, mode="float", precision=200)
        assert ex.exact and ex.mode == "exact"
        assert f64.mode == "float64" and mp.mode == "mpf"
        assert f64.value == pytest.approx(float(ex.value), abs=1e-10)
        assert mp.value == pytest.approx(float(ex.value), abs=1e-14)


class TestPECoefficients:
    def test_small_degrees(self):
        assert pe_coefficients(1) == {(1,): 1}
        assert pe_coefficients(2) == {(2,): -2, (1, 1): 1}
        assert pe_coefficients(3) == {(3,): 3, (2, 1): -3, (1, 1, 1): 1}
        assert pe_coefficients(4) == {
            (4,): -4, (3, 1): 4, (2, 2): 2, (2, 1, 1): -4, (1, 1, 1, 1): 1
        }

    @given(st.integers(min_value=1, max_value=8))
    @settings(max_examples=8, deadline=None)
    def test_numeric_identity(self, k):
        # evaluate both sides on a random point
        rng = np.random.default_rng(k)
        x = rng.uniform(0.1, 2.0, size=5)
        p_val = float(np.sum(x**k))
        coeffs = np.array([1.0])
        for xi in x:
            coeffs = np.convolve(coeffs, [1.0, xi])
        e_val = 0.0
        for part, c in pe_coefficients(k).items():
            term = float(c)
            for j in part:
                term *= coeffs[j] if j < len(coeffs) else 0.0
            e_val += term
        assert p_val == pytest.approx(e_val, rel=1e-10)

    def test_bounds(self):
        with pytest.raises(DomainError):
            pe_coefficients(13)
        with pytest.raises(DomainError):
            pe_coefficients(0)


class TestValidation:
    def test_chain_rules(self):
        with pytest.raises(DomainError):
            chain((2, 1), (3, 1))  # increasing levels
        with pytest.raises(DomainError):
            chain((2, 3))  # degree above level
        with pytest.raises(DomainError):
            chain((8, 7))  # degree above cap
        with pytest.raises(DomainError):
            chain(*([(2, 1)] * 5))  # too long

    def test_covariance_precondition(self):
        p = EnsembleParams(theta=1, alpha=1, m_param=2)
        lo = ObservableSpec(kind="power", degree=1, level=1)
        hi = ObservableSpec(kind="power", degree=1, level=2)
        with pytest.raises(DomainError):
            covariance_p(p, lo, hi)

    def test_covariance_symmetric_in_degree(self):
        p = EnsembleParams(theta=Fraction(1, 2), alpha=Fraction(1), m_param=2)
        s1 = ObservableSpec(kind="power", degree=1, level=2)
        s2 = ObservableSpec(kind="power", degree=2, level=2)
        assert covariance_p(p, s1, s2).value == covariance_p(p, s2, s1).value

    def test_kind_mismatch(self):
        p = EnsembleParams(theta=1, alpha=1, m_param=2)
        with pytest.raises(DomainError):
            expectation_e(p, [ObservableSpec(kind="power", degree=1, level=1)])


class TestBounds:
    @given(
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=1, max_value=4),
        st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(2, 3)]),
        st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(9, 4)]),
        st.integers(min_value=1, max_value=4),
    )
    @settings(max_examples=30, deadline=None)
    def test_elementary_moment_in_range(self, level, degree, theta, alpha, m):
        # 0 <= E e_k(N) <= C(N, k); exercises the Laurent path whenever
        # theta*(j-i) collides with an integer shift
        if degree > level:
            return
        p = EnsembleParams(theta=theta, alpha=alpha, m_param=m)
        out = expectation_e(
            p, [ObservableSpec(kind="elementary", degree=degree, level=level)]
        )
        assert out.exact
        assert 0 <= out.value <= math.comb(level, degree)
