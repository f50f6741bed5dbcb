"""Type validation and observable evaluation."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_corners import (
    CornersArray,
    DomainError,
    EnsembleParams,
    ObservableSpec,
    elementary_symmetric,
    observable_value,
)

from conftest import random_corners


class TestEnsembleParams:
    def test_exactness_detection(self):
        assert EnsembleParams(theta=Fraction(1, 2), alpha=2, m_param=3).is_exact
        assert not EnsembleParams(theta=0.5, alpha=2, m_param=3).is_exact

    def test_rejects_bad_values(self):
        for kwargs in (
            dict(theta=0.0, alpha=1.0, m_param=1),
            dict(theta=1.0, alpha=-2.0, m_param=1),
            dict(theta=1.0, alpha=1.0, m_param=0),
            dict(theta=float("nan"), alpha=1.0, m_param=1),
        ):
            with pytest.raises(DomainError):
                EnsembleParams(**kwargs)


class TestCornersArray:
    def test_row_length_rule(self):
        ca = CornersArray(
            levels=(np.array([0.4]), np.array([0.2, 0.6]), np.array([0.1, 0.5])),
            m_param=2,
        )
        assert ca.big_n == 3
        assert len(ca.level(3)) == 2

    def test_rejects_broken_interlacing(self):
        with pytest.raises(DomainError):
            CornersArray(levels=(np.array([0.2]), np.array([0.3, 0.6])), m_param=5)
        with pytest.raises(DomainError):
            CornersArray(levels=(np.array([0.5]), np.array([0.1, 0.4])), m_param=5)

    def test_rejects_boundary_points(self):
        with pytest.raises(DomainError):
            CornersArray(levels=(np.array([1.0]),), m_param=1)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_random_arrays_validate(self, seed):
        rng = np.random.default_rng(seed)
        p = EnsembleParams(theta=1.0, alpha=1.0, m_param=int(rng.integers(1, 4)))
        big_n = int(rng.integers(1, 5))
        ca = random_corners(p, big_n, rng)
        assert ca.big_n == big_n  # construction already ran the validator


class TestObservables:
    def test_power_with_padding(self):
        spec = ObservableSpec(kind="power", degree=2, level=3, pad_ones=True)
        assert observable_value(spec, [0.5], m_param=1) == pytest.approx(2.25)

    def test_power_without_padding(self):
        spec = ObservableSpec(kind="power", degree=2, level=3, pad_ones=False)
        assert observable_value(spec, [0.5], m_param=1) == pytest.approx(0.25)

    def test_elementary_full_degree(self):
        spec = ObservableSpec(kind="elementary", degree=3, level=3, pad_ones=True)
        # e_3(x, 1, 1) = x for a single real entry padded to length 3
        assert observable_value(spec, [0.37], m_param=1) == pytest.approx(0.37)

    def test_elementary_degree_overflow(self):
        spec = ObservableSpec(kind="elementary", degree=3, level=2)
        with pytest.raises(DomainError):
            observable_value(spec, [0.2, 0.5], m_param=2)

    def test_wrong_vector_length(self):
        spec = ObservableSpec(kind="power", degree=1, level=2)
        with pytest.raises(DomainError):
            observable_value(spec, [0.2, 0.5, 0.7], m_param=2)

    @given(
        st.lists(st.floats(min_value=0.01, max_value=0.99), min_size=1, max_size=6),
    )
    @settings(max_examples=50, deadline=None)
    def test_elementary_matches_poly_expansion(self, values):
        # coefficients of prod (1 + x t) are the elementary symmetric functions
        coeffs = np.array([1.0])
        for x in values:
            coeffs = np.convolve(coeffs, [1.0, x])
        for k in range(len(values) + 1):
            assert elementary_symmetric(np.array(values), k) == pytest.approx(
                coeffs[k], rel=1e-12, abs=1e-12
            )

    def test_p1_equals_e1(self):
        vec = [0.2, 0.4, 0.9]
        p1 = ObservableSpec(kind="power", degree=1, level=3)
        e1 = ObservableSpec(kind="elementary", degree=1, level=3)
        assert observable_value(p1, vec, 3) == pytest.approx(observable_value(e1, vec, 3))

    def test_kind_validation(self):
        with pytest.raises(DomainError):
            ObservableSpec(kind="moment", degree=1, level=1)
