"""Tests for the hypergeometric-function evaluator: closed-form
specializations, symmetry and homogeneity, the bilinear pairing identity,
the difference-operator eigenrelation, and the Schrodinger-operator
residual."""

import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from jacobi_corners.errors import DomainError, NumericError
from jacobi_corners.hypergeom import (
    HOPoint,
    QuadSpec,
    calogero_residual,
    cauchy_check,
    eigen_check,
    ho_dual_eval,
    ho_eval,
    shift_coefficient,
)


def principal_value(r, theta, n_args):
    """Closed form of F at the geometric argument ladder 0, -theta, ..."""
    n = len(r)
    out = 1.0
    for i in range(1, n + 1):
        for j in range(i + 1, n_args + 1):
            out *= gamma_fn(theta * (j - i)) / gamma_fn(theta * (j - i + 1))
    for i in range(n):
        for j in range(i + 1, n):
            out *= (math.exp(-r[j]) - math.exp(-r[i])) ** theta
    for ri in r:
        out *= (1.0 - math.exp(-ri)) ** (theta * (n_args - n))
    return out


def ladder(theta, n_args):
    return tuple(-theta * k for k in range(n_args))


class TestValidation:
    def test_point_accepts_valid(self):
        p = HOPoint((1.5, 0.4), (0.3, -0.9), 0.7)
        assert p.r == (1.5, 0.4)

    def test_rejects_increasing_r(self):
        with pytest.raises(DomainError):
            HOPoint((0.5, 1.5), (0.1, 0.2), 1.0)

    def test_rejects_near_equal_r(self):
        with pytest.raises(DomainError):
            HOPoint((1.0, 1.0 - 1e-9), (0.1, 0.2), 1.0)

    def test_rejects_nonpositive_r(self):
        with pytest.raises(DomainError):
            HOPoint((1.0, -0.5), (0.1, 0.2), 1.0)

    def test_rejects_short_y(self):
        with pytest.raises(DomainError):
            HOPoint((1.5, 0.4), (0.1,), 1.0)

    def test_rejects_dimension_cap(self):
        with pytest.raises(DomainError):
            HOPoint((1.0,), (0.1, 0.2, 0.3, 0.4), 1.0)

    def test_rejects_bad_theta(self):
        with pytest.raises(DomainError):
            HOPoint((1.0,), (0.1,), 0.0)

    def test_quad_spec_bounds(self):
        with pytest.raises(DomainError):
            QuadSpec(nodes_per_interval=4)
        with pytest.raises(DomainError):
            QuadSpec(scheme="monte_carlo")


class TestBaseAndSchemes:
    def test_single_entry_is_exponential(self):
        assert ho_eval(HOPoint((1.3,), (0.7,), 0.9)) == math.exp(0.7 * 1.3)

    def test_schemes_agree_at_integer_theta(self):
        p = HOPoint((1.5, 0.4), (0.3, -0.9), 2.0)
        gl = ho_eval(p, QuadSpec(scheme="gauss_legendre"))
        gj = ho_eval(p, QuadSpec(scheme="gauss_jacobi_endpoint"))
        assert gl == pytest.approx(gj, rel=1e-12)

    def test_plain_rule_rejected_below_one(self):
        p = HOPoint((1.5, 0.4), (0.3, -0.9), 0.5)
        with pytest.raises(NumericError):
            ho_eval(p, QuadSpec(scheme="gauss_legendre"))


class TestPrincipalSpecialization:
    @pytest.mark.parametrize("theta", [0.5, 1.0, 1.5, 2.5])
    @pytest.mark.parametrize(
        "r,n_args",
        [((1.3,), 1), ((1.3,), 2), ((1.7, 0.6), 2), ((1.7, 0.6), 3)],
    )
    def test_matches_closed_form(self, theta, r, n_args):
        got = ho_eval(HOPoint(r, ladder(theta, n_args), theta))
        want = principal_value(r, theta, n_args)
        assert got == pytest.approx(want, rel=1e-8)

    def test_three_by_three(self):
        r = (2.0, 1.1, 0.4)
        got = ho_eval(HOPoint(r, ladder(0.8, 3), 0.8))
        assert got == pytest.approx(principal_value(r, 0.8, 3), rel=1e-8)

    def test_two_entry_closed_form(self):
        # F_(r1,r2)(0, -theta) = Gamma(theta)/Gamma(2 theta) (e^-r2 - e^-r1)^theta
        r1, r2, theta = 1.7, 0.6, 1.3
        got = ho_eval(HOPoint((r1, r2), (0.0, -theta), theta))
        want = (
            gamma_fn(theta)
            / gamma_fn(2 * theta)
            * (math.exp(-r2) - math.exp(-r1)) ** theta
        )
        assert got == pytest.approx(want, rel=1e-10)

    def test_dual_principal(self):
        r = (1.7, 0.6)
        theta = 0.7
        got = ho_dual_eval(HOPoint(r, ladder(theta, 2), theta))
        want = principal_value(r, theta, 2) / gamma_fn(theta) ** 2
        for ri in r:
            want *= (1.0 - math.exp(-ri)) ** (theta - 1.0)
        assert got == pytest.approx(want, rel=1e-8)


class TestSymmetryHomogeneity:
    @pytest.mark.parametrize(
        "r,y,theta",
        [
            ((1.4, 0.5), (0.3, -0.9), 0.7),
            ((1.4, 0.5), (0.3, -0.9, 0.1), 1.3),
            ((0.9,), (0.25, -1.2, 0.6), 0.6),
        ],
    )
    def test_symmetric_in_arguments(self, r, y, theta):
        base = ho_eval(HOPoint(r, y, theta))
        rolled = tuple(np.roll(y, 1))
        assert ho_eval(HOPoint(r, rolled, theta)) == pytest.approx(base, rel=1e-10)
        swapped = (y[1], y[0]) + tuple(y[2:])
        assert ho_eval(HOPoint(r, swapped, theta)) == pytest.approx(base, rel=1e-10)

    def test_homogeneity_random_shifts(self):
        rng = np.random.default_rng(7)
        r = (1.4, 0.5)
        y = (0.3, -0.9)
        theta = 0.7
        base = ho_eval(HOPoint(r, y, theta))
        for shift in rng.uniform(-1.0, 1.0, size=5):
            moved = ho_eval(HOPoint(r, (y[0] + shift, y[1] + shift), theta))
            assert moved == pytest.approx(
                math.exp(shift * sum(r)) * base, rel=1e-10
            )


class TestDual:
    def test_single_entry_closed_form(self):
        for theta in (0.6, 1.0, 1.7):
            got = ho_dual_eval(HOPoint((1.2,), (0.0,), theta))
            want = (1.0 - math.exp(-1.2)) ** (theta - 1.0) / gamma_fn(theta)
            assert got == pytest.approx(want, rel=1e-12)

    def test_collapses_at_theta_one(self):
        p = HOPoint((1.4, 0.5), (0.3, -0.9), 1.0)
        assert ho_dual_eval(p) == pytest.approx(ho_eval(p), rel=1e-14)


class TestShiftCoefficient:
    def test_hand_value(self):
        assert shift_coefficient((2.0, 0.0), (0,), 0.5) == pytest.approx(0.75)
        assert shift_coefficient((2.0, 0.0), (1,), 0.5) == pytest.approx(1.25)

    def test_full_subset_is_one(self):
        assert shift_coefficient((2.0, 0.0), (0, 1), 0.5) == 1.0

    def test_tied_entries_raise(self):
        with pytest.raises(DomainError):
            shift_coefficient((1.0, 1.0), (0,), 0.5)


class TestEigenRelation:
    def test_single_variable_exact(self):
        applied, expected = eigen_check((1.1,), 0.8, 1, 1, (0.4,))
        assert applied == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("theta", [0.6, 1.0, 2.3])
    @pytest.mark.parametrize("k", [1, 2])
    def test_two_variables(self, theta, k):
        applied, expected = eigen_check(
            (1.5, 0.4), theta, 2, k, (0.31, -0.76)
        )
        assert applied == pytest.approx(expected, rel=1e-6)

    def test_full_shift_factor(self):
        # k = N: B_I = 1 and the eigenvalue is exp(-r_1 - ... - r_n).
        r = (1.5, 0.4)
        theta = 1.4
        base = ho_eval(HOPoint(r, (0.31, -0.76), theta))
        shifted = ho_eval(HOPoint(r, (0.31 - 1.0, -0.76 - 1.0), theta))
        assert shifted == pytest.approx(
            math.exp(-sum(r)) * base, rel=1e-10
        )

    def test_padded_variables(self):
        applied, expected = eigen_check(
            (0.9,), 0.7, 2, 1, (0.25, -0.83)
        )
        assert applied == pytest.approx(expected, rel=1e-6)
        applied, expected = eigen_check(
            (1.5, 0.4), 1.4, 3, 2, (0.31, -0.76, -1.9)
        )
        assert applied == pytest.approx(expected, rel=1e-6)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            eigen_check((1.1,), 0.8, 1, 2, (0.4,))
        with pytest.raises(DomainError):
            eigen_check((1.1,), 0.8, 2, 1, (0.4,))


class TestCauchyPairing:
    def test_random_single_parameters(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            theta = rng.uniform(0.4, 2.5)
            a = -rng.uniform(0.15, 1.5)
            b = -rng.uniform(0.15, 1.5)
            lhs, rhs = cauchy_check((a,), (b,), theta)
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_near_divergence_tracks(self):
        # As a + b -> 0- both sides blow up together.
        theta = 0.9
        ratios = []
        for gap in (0.2, 0.1, 0.05):
            lhs, rhs = cauchy_check((-gap / 2,), (-gap / 2,), theta)
            ratios.append(lhs / rhs)
            assert rhs > 1.0
        assert all(abs(q - 1.0) < 1e-6 for q in ratios)

    def test_mixed_lengths_smoke(self):
        lhs, rhs = cauchy_check((-0.8,), (-0.6, -1.1), 0.9)
        assert lhs == pytest.approx(rhs, rel=1e-5)

    def test_two_by_two_smoke(self):
        q = QuadSpec(nodes_per_interval=24)
        lhs, rhs = cauchy_check((-0.9, -1.4), (-0.7, -1.2), 0.6, q)
        assert lhs == pytest.approx(rhs, rel=1e-4)

    def test_rejects_nonnegative_sum(self):
        with pytest.raises(DomainError):
            cauchy_check((0.3,), (-0.2,), 1.0)
        with pytest.raises(DomainError):
            cauchy_check((-0.8, 0.7), (-0.6,), 1.0)

    def test_rejects_long_sides(self):
        with pytest.raises(DomainError):
            cauchy_check((-0.5, -0.6, -0.7), (-0.5,), 1.0)


class TestSchrodingerResidual:
    def test_single_variable_analogue(self):
        # Second derivative check of the base case, step 1e-3.
        y, r, h = 0.7, 1.3, 1e-3
        f = lambda t: math.exp(y * t)
        d2 = (f(r + h) - 2 * f(r) + f(r - h)) / h**2
        assert d2 == pytest.approx(y**2 * f(r), rel=1e-5)

    def test_potential_free_case(self):
        res = calogero_residual((1.6, 0.7), (0.4, -0.8), 1.0, 1e-3)
        assert res < 1e-4

    def test_second_order_in_step(self):
        r = (1.6, 0.7)
        y = (0.4, -0.8)
        res = [
            calogero_residual(r, y, 0.5, h) for h in (0.02, 0.01, 0.005)
        ]
        assert 3.0 < res[0] / res[1] < 5.0
        assert 3.0 < res[1] / res[2] < 5.0

    def test_noise_detected(self):
        with pytest.raises(NumericError):
            calogero_residual((1.6, 0.7), (0.4, -0.8), 0.5, 1e-7)

    def test_rejects_bad_input(self):
        with pytest.raises(DomainError):
            calogero_residual((1.0, 0.95), (0.4, -0.8), 0.5, 1e-3)
        with pytest.raises(DomainError):
            calogero_residual((1.6, 0.7), (0.4, -0.8), 0.5, 0.5)
