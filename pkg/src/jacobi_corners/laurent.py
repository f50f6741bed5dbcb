"""Truncated Laurent series in one small parameter, with exact coefficients.

Used by the moment engine when a difference-operator chain hits a vanishing
denominator at its canonical base point: every scalar is replaced by a
series in the regularization parameter eps, divisions happen only through
explicitly linear factors, and the finite answer is the eps^0 coefficient
after all pole terms cancel.

A series carries ``cut``: coefficients at exponents >= cut are unknown
(truncated); ``cut = None`` means the representation is exact.  Arithmetic
propagates the tightest valid cut.  Coefficients are Fractions (or any
exact field elements supporting +,-,*,/ and equality with 0).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Optional, Union

from .errors import NumericError

_INF = float("inf")


class WindowExhausted(NumericError):
    """The truncation window was too small to certify the eps^0 coefficient."""


class EpsSeries:
    __slots__ = ("coeffs", "cut")

    def __init__(self, coeffs: Dict[int, Fraction], cut: Optional[int] = None):
        self.coeffs = {e: c for e, c in coeffs.items() if c != 0}
        self.cut = cut
        if cut is not None:
            self.coeffs = {e: c for e, c in self.coeffs.items() if e < cut}

    # -- constructors ---------------------------------------------------
    @classmethod
    def const(cls, value) -> "EpsSeries":
        return cls({0: value})

    @classmethod
    def linear(cls, c0, c1) -> "EpsSeries":
        return cls({0: c0, 1: c1})

    # -- helpers --------------------------------------------------------
    def _cut_val(self) -> float:
        return _INF if self.cut is None else self.cut

    def min_exp(self) -> float:
        return min(self.coeffs) if self.coeffs else _INF

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- ring operations ------------------------------------------------
    def __add__(self, other: "EpsSeries") -> "EpsSeries":
        cut = min(self._cut_val(), other._cut_val())
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return EpsSeries(out, None if cut == _INF else int(cut))

    def __sub__(self, other: "EpsSeries") -> "EpsSeries":
        return self + (-other)

    def __neg__(self) -> "EpsSeries":
        return EpsSeries({e: -c for e, c in self.coeffs.items()}, self.cut)

    def __mul__(self, other: "EpsSeries") -> "EpsSeries":
        if self.is_zero() or other.is_zero():
            return EpsSeries({}, None)
        cut = min(self._cut_val() + other.min_exp(), other._cut_val() + self.min_exp())
        out: Dict[int, Fraction] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e < cut:
                    out[e] = out.get(e, 0) + c1 * c2
        return EpsSeries(out, None if cut == _INF else int(cut))

    def inverse_linear(self, window: int) -> "EpsSeries":
        """Inverse of a series supported on exponents {0, 1}."""
        if any(e not in (0, 1) for e in self.coeffs):
            raise ValueError("inverse_linear needs a polynomial c0 + c1*eps")
        c0 = self.coeffs.get(0, 0)
        c1 = self.coeffs.get(1, 0)
        if c0 == 0:
            if c1 == 0:
                raise ZeroDivisionError("inverting the zero series")
            return EpsSeries({-1: 1 / Fraction(c1) if isinstance(c1, int) else 1 / c1})
        ratio = -c1 / c0
        out: Dict[int, Fraction] = {}
        term = 1 / Fraction(c0) if isinstance(c0, int) else 1 / c0
        for t in range(window):
            out[t] = term
            term = term * ratio
        return EpsSeries(out, cut=window)

    def __truediv__(self, other: "EpsSeries") -> "EpsSeries":
        window = 64
        if other.cut is not None:
            window = other.cut
        return self * other.inverse_linear(window)

    # -- extraction -----------------------------------------------------
    def value_at_zero(self):
        """The eps^0 coefficient, certified by the cut and pole cancellation."""
        for e, c in self.coeffs.items():
            if e < 0 and c != 0:
                raise NumericError(
                    f"eps expansion retains a pole term at exponent {e}: {c}"
                )
        if self.cut is not None and self.cut < 1:
            raise WindowExhausted(
                f"truncation window ended at exponent {self.cut}; eps^0 not certified"
            )
        return self.coeffs.get(0, 0)

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*eps^{e}" for e, c in sorted(self.coeffs.items()))
        return f"EpsSeries({body or '0'}, cut={self.cut})"
