"""Multivariate hypergeometric functions of Heckman-Opdam type, evaluated
by nested quadrature of their branching integral.

For a strictly decreasing positive index vector r = (r_1 > ... > r_n > 0)
and argument vector y of length N >= n, the function F_r(y; theta) is
defined recursively: F_{(r_1)}(y_1) = exp(y_1 r_1), and one argument is
peeled off at a time through

    F_r(y_1, ..., y_N) = int_{m interlacing r'} g_{r'/m}(y_N)
                         F_m(y_1, ..., y_{N-1}) dm,

where r' = r when N equals n and r' = (r, 0) when N > n (virtual zero
coordinate), m interlaces r' coordinatewise, and the branching kernel is

    g_{r'/m}(y) = exp(y (|r'| - |m|)) / Gamma(theta)^{K-1}
        * prod_{i<j} (1 - e^{-(m_i - m_j)})^(1-theta)
        * prod_{i<=j} [ (1 - e^{-(r'_i - r'_{j+1})})
            / ((1 - e^{-(m_i - r'_{j+1})}) (1 - e^{-(r'_i - m_j)})) ]^(1-theta)

with K = len(r').  Each integration variable m_i lives on the interval
(r'_{i+1}, r'_i) and carries endpoint factors (distance)^(theta-1) at
both ends, so Gauss-Jacobi rules with exponents (theta-1, theta-1)
resolve every theta > 0 uniformly; plain Gauss-Legendre is exposed as an
alternative for integer theta.  The nested integral has dimension
n(n-1)/2 + n(N-n), so arguments are capped at length 3.

These functions diagonalize the same difference operators that drive the
exact-moment engine and are eigenfunctions of a two-body Sutherland type
Schrodinger operator; both facts are checkable numerically and serve as
independent cross-validations of the operator definitions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import roots_jacobi

from .errors import DomainError, NumericError
from .params import elementary_symmetric

_SCHEMES = ("gauss_legendre", "gauss_jacobi_endpoint")
_MIN_GAP = 1e-8
_MAX_VARS = 3


@dataclass(frozen=True)
class HOPoint:
    """Evaluation point: index vector r, argument vector y, and theta."""

    r: Tuple[float, ...]
    y: Tuple[float, ...]
    theta: float

    def __post_init__(self) -> None:
        r = tuple(float(v) for v in self.r)
        y = tuple(float(v) for v in self.y)
        if len(r) == 0:
            raise DomainError("r must be nonempty")
        if any(v <= 0.0 for v in r):
            raise DomainError("r entries must be positive")
        if any(a - b < _MIN_GAP for a, b in zip(r, r[1:])):
            raise DomainError(
                f"r must be strictly decreasing with gaps > {_MIN_GAP}"
            )
        if len(y) < len(r):
            raise DomainError("y must be at least as long as r")
        if len(y) > _MAX_VARS:
            raise DomainError(
                f"quadrature dimension cap: at most {_MAX_VARS} arguments"
            )
        if not self.theta > 0:
            raise DomainError("theta must be positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "theta", float(self.theta))


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature control: nodes per interlacing interval and rule family."""

    nodes_per_interval: int = 48
    scheme: str = "gauss_jacobi_endpoint"

    def __post_init__(self) -> None:
        if self.nodes_per_interval < 8:
            raise DomainError("nodes_per_interval must be >= 8")
        if self.scheme not in _SCHEMES:
            raise DomainError(f"scheme must be one of {_SCHEMES}")


@lru_cache(maxsize=256)
def _rule(nodes: int, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    x, w = roots_jacobi(nodes, a, b)
    return x, w


def _ratio(d: np.ndarray) -> np.ndarray:
    """(1 - e^{-d}) / d, the smooth part of the endpoint factors."""
    return -np.expm1(-d) / d


def _g_values(
    r_ext: Tuple[float, ...],
    ms: np.ndarray,
    y_last: float,
    theta: float,
    reduced: bool,
) -> np.ndarray:
    """Branching kernel over a batch of interlacing vectors ms (B, K-1).

    With reduced=True the two endpoint-singular factors of each variable
    are replaced by their smooth ratios; the removed powers are absorbed
    into the Gauss-Jacobi weight and interval prefactor.
    """
    k_ext = len(r_ext)
    dims = k_ext - 1
    expo = 1.0 - theta
    acc = np.exp(y_last * (sum(r_ext) - ms.sum(axis=1)))
    acc /= gamma_fn(theta) ** dims
    for i in range(dims):
        for j in range(i + 1, dims):
            acc *= (-np.expm1(-(ms[:, i] - ms[:, j]))) ** expo
    for i in range(dims):
        for j in range(i, dims):
            acc *= (-math.expm1(-(r_ext[i] - r_ext[j + 1]))) ** expo
            d_left = ms[:, i] - r_ext[j + 1]
            d_right = r_ext[i] - ms[:, j]
            if reduced and i == j:
                acc *= (_ratio(d_left) * _ratio(d_right)) ** -expo
            else:
                acc *= ((-np.expm1(-d_left)) * (-np.expm1(-d_right))) ** -expo
    return acc


def _interval_rule(
    lo: float, hi: float, a_left: float, a_right: float, q: QuadSpec
) -> Tuple[np.ndarray, np.ndarray, float, bool]:
    """Nodes on (lo, hi), weights, prefactor, and whether the kernel is
    evaluated in endpoint-reduced form.

    a_left and a_right are the algebraic endpoint exponents absorbed into
    the weight; the integrand handed to the rule must have those powers
    divided out.
    """
    s = 0.5 * (hi - lo)
    c = 0.5 * (hi + lo)
    if q.scheme == "gauss_jacobi_endpoint":
        x, w = _rule(q.nodes_per_interval, a_right, a_left)
        return c + s * x, w, s ** (a_left + a_right + 1.0), True
    x, w = _rule(q.nodes_per_interval, 0.0, 0.0)
    return c + s * x, w, s, False


def _eval(
    r: Tuple[float, ...], y: Tuple[float, ...], theta: float, q: QuadSpec
) -> float:
    nv = len(y)
    if nv == 1:
        return math.exp(y[0] * r[0])
    r_ext = r + (0.0,) if len(r) < nv else r
    dims = len(r_ext) - 1
    # At a padded level the recursed function itself vanishes like
    # m_last^(theta * inner_pad) at the virtual zero; fold that power into
    # the endpoint weight of the last variable for spectral accuracy.
    inner_pad = (nv - 1) - dims if len(r) < nv else 0
    extra = theta * inner_pad
    expo = theta - 1.0
    if dims == 1:
        m, w, pref, reduced = _interval_rule(
            r_ext[1], r_ext[0], expo + extra, expo, q
        )
        if nv == 2:
            inner = np.exp(y[0] * m)
        else:
            inner = np.array([_eval((mi,), y[:-1], theta, q) for mi in m])
        if reduced and extra > 0.0:
            inner = inner * m**-extra
        g = _g_values(r_ext, m[:, None], y[-1], theta, reduced)
        return pref * float(np.dot(w, g * inner))
    m1, w1, pref1, reduced = _interval_rule(r_ext[1], r_ext[0], expo, expo, q)
    m2, w2, pref2, _ = _interval_rule(
        r_ext[2], r_ext[1], expo + extra, expo, q
    )
    total = 0.0
    for a, mv1 in enumerate(m1):
        ms = np.column_stack([np.full(len(m2), mv1), m2])
        g = _g_values(r_ext, ms, y[-1], theta, reduced)
        inner = np.array([_eval((mv1, mv2), y[:-1], theta, q) for mv2 in m2])
        if reduced and extra > 0.0:
            inner = inner * m2**-extra
        total += w1[a] * float(np.dot(w2, g * inner))
    return pref1 * pref2 * total


def ho_eval(p: HOPoint, q: Optional[QuadSpec] = None) -> float:
    """F_r(y; theta) by nested quadrature of the branching recursion."""
    quad = q or QuadSpec()
    if quad.scheme == "gauss_legendre" and p.theta < 1.0:
        raise NumericError(
            "endpoint singularities at theta < 1 need the weighted scheme"
        )
    val = _eval(p.r, p.y, p.theta, quad)
    if not math.isfinite(val):
        raise NumericError("quadrature produced a non-finite value")
    return val


def ho_dual_eval(p: HOPoint, q: Optional[QuadSpec] = None) -> float:
    """Dual function: Gamma(theta)^{-n} prod_i (1-e^{-r_i})^{theta-1} F_r(y)."""
    pref = gamma_fn(p.theta) ** (-len(p.r))
    for ri in p.r:
        pref *= (-math.expm1(-ri)) ** (p.theta - 1.0)
    return pref * ho_eval(p, q)


def shift_coefficient(y: Sequence[float], subset: Sequence[int], theta: float) -> float:
    """B_I(y) = prod_{i in I, j not in I} (y_i - y_j - theta)/(y_i - y_j).

    Indices in subset are 0-based positions into y.
    """
    inside = set(subset)
    out = 1.0
    for i in inside:
        for j in range(len(y)):
            if j in inside:
                continue
            diff = y[i] - y[j]
            if diff == 0.0:
                raise DomainError("coefficient pole: tied argument entries")
            out *= (diff - theta) / diff
    return out


def eigen_check(
    r: Sequence[float],
    theta: float,
    n_vars: int,
    k: int,
    base_y: Sequence[float],
    q: Optional[QuadSpec] = None,
) -> Tuple[float, float]:
    """Both sides of the difference-operator eigenrelation.

    applied = sum over k-subsets I of B_I(y) F_r(y - 1_I); expected =
    e_k(e^{-r_1}, ..., e^{-r_n}, 1, ..., 1) F_r(y) with N - n padded ones.
    """
    y0 = tuple(float(v) for v in base_y)
    if len(y0) != n_vars:
        raise DomainError("base_y must have length n_vars")
    if not 1 <= k <= n_vars:
        raise DomainError("k must be between 1 and n_vars")
    center = HOPoint(tuple(r), y0, theta)
    f0 = ho_eval(center, q)
    applied = 0.0
    for subset in itertools.combinations(range(n_vars), k):
        coeff = shift_coefficient(y0, subset, theta)
        shifted = tuple(
            v - 1.0 if i in subset else v for i, v in enumerate(y0)
        )
        applied += coeff * ho_eval(HOPoint(center.r, shifted, theta), q)
    padded = np.concatenate([np.exp(-np.asarray(center.r)), np.ones(n_vars - len(center.r))])
    expected = elementary_symmetric(padded, k) * f0
    return applied, expected


def calogero_residual(
    r: Sequence[float],
    y: Sequence[float],
    theta: float,
    fd_step: float,
    q: Optional[QuadSpec] = None,
) -> float:
    """Relative residual of the two-body Schrodinger eigenequation.

    Second derivatives in r_1, r_2 are taken by central differences of
    the quadrature evaluator; the potential term is
    theta(1-theta) / (2 sinh^2((r_1-r_2)/2)) and the eigenvalue is
    y_1^2 + y_2^2.  Raises when halving the step fails to reduce an
    above-noise residual.
    """
    if len(r) != 2 or len(y) != 2:
        raise DomainError("needs exactly two index and two argument entries")
    r1, r2 = float(r[0]), float(r[1])
    if not r1 - r2 > 0.1:
        raise DomainError("index entries must be separated by more than 0.1")
    if not 0.0 < fd_step < min((r1 - r2) / 4.0, r2 / 2.0):
        raise DomainError("fd_step must be positive and small vs the gaps")
    yt = (float(y[0]), float(y[1]))

    def f_at(a: float, b: float) -> float:
        return ho_eval(HOPoint((a, b), yt, theta), q)

    f0 = f_at(r1, r2)
    if f0 == 0.0:
        raise NumericError("function value vanished; residual undefined")
    pot = theta * (1.0 - theta) / (2.0 * math.sinh((r1 - r2) / 2.0) ** 2)
    eig = yt[0] ** 2 + yt[1] ** 2

    def residual(h: float) -> float:
        d2a = (f_at(r1 + h, r2) - 2.0 * f0 + f_at(r1 - h, r2)) / h**2
        d2b = (f_at(r1, r2 + h) - 2.0 * f0 + f_at(r1, r2 - h)) / h**2
        return abs(d2a + d2b + pot * f0 - eig * f0) / abs(f0)

    res_full = residual(fd_step)
    res_half = residual(fd_step / 2.0)
    if res_half > res_full and res_full > 1e-7:
        raise NumericError(
            "residual does not decrease under step halving; "
            "finite-difference noise dominates"
        )
    return res_full


def _truncation_radius(integrand, peak: float) -> float:
    radius = 1.0
    for _ in range(40):
        if abs(integrand(radius)) < 1e-14 * peak:
            return radius
        radius *= 2.0
    raise NumericError("integrand tail does not decay; truncation failed")


def _half_line_quad(
    integrand, sing_expo: float, radius: float, nodes: int
) -> float:
    """integral_0^radius x^sing_expo * smooth(x) dx with smooth(x) =
    integrand(x) * x^{-sing_expo}; first panel Gauss-Jacobi, geometric
    Gauss-Legendre panels beyond."""
    first = min(1.0, radius)
    xj, wj = _rule(nodes, 0.0, sing_expo)
    half = first / 2.0
    pts = half * (1.0 + xj)
    vals = np.array([integrand(p) * p ** (-sing_expo) for p in pts])
    total = half ** (sing_expo + 1.0) * float(np.dot(wj, vals))
    xl, wl = _rule(nodes, 0.0, 0.0)
    lo = first
    while lo < radius:
        hi = min(2.0 * lo, radius)
        s, c = 0.5 * (hi - lo), 0.5 * (hi + lo)
        vals = np.array([integrand(c + s * t) for t in xl])
        total += s * float(np.dot(wl, vals))
        lo = hi
    return total


def cauchy_check(
    a: Sequence[float],
    b: Sequence[float],
    theta: float,
    q: Optional[QuadSpec] = None,
) -> Tuple[float, float]:
    """Both sides of the bilinear pairing identity.

    lhs integrates dual(r; a) * primal(r; b) over decreasing positive r of
    length min(len(a), len(b)); rhs is the product of gamma ratios
    Gamma(-a_i-b_j)/Gamma(theta-a_i-b_j).  Quantitative for single entries;
    length-2 cases are coarse smoke checks (outer grid resolution limits
    accuracy there).
    """
    quad = q or QuadSpec()
    av = [float(v) for v in a]
    bv = [float(v) for v in b]
    n, m = len(av), len(bv)
    if not (1 <= n <= 2 and 1 <= m <= 2):
        raise DomainError("supports one or two parameters per side")
    if not theta > 0:
        raise DomainError("theta must be positive")
    for ai in av:
        for bj in bv:
            if not ai + bj < 0:
                raise DomainError("every pairwise sum a_i + b_j must be negative")
    rhs = 1.0
    for ai in av:
        for bj in bv:
            rhs *= gamma_fn(-ai - bj) / gamma_fn(theta - ai - bj)
    d = min(n, m)
    if d == 1:

        def integrand(rv: float) -> float:
            return ho_dual_eval(HOPoint((rv,), tuple(av), theta), quad) * ho_eval(
                HOPoint((rv,), tuple(bv), theta), quad
            )

        peak = max(abs(integrand(rv)) for rv in np.geomspace(1e-3, 8.0, 25))
        radius = _truncation_radius(integrand, peak)
        lhs = _half_line_quad(integrand, theta - 1.0, radius, quad.nodes_per_interval)
        check = _half_line_quad(
            integrand, theta - 1.0, radius, 2 * quad.nodes_per_interval
        )
        if n == 1 and m == 1 and abs(lhs - check) > 1e-10 * max(1.0, abs(lhs)):
            raise NumericError("pairing integral did not converge under node doubling")
        return check, rhs

    # Two-dimensional outer integral in (gap, base) coordinates
    # r = (base + gap, base); the integrand vanishes like gap^(2 theta) at
    # coinciding entries and carries base^(theta-1) at the hard edge.
    def pair_val(r1: float, r2: float) -> float:
        return ho_dual_eval(HOPoint((r1, r2), tuple(av), theta), quad) * ho_eval(
            HOPoint((r1, r2), tuple(bv), theta), quad
        )

    probe = [
        abs(pair_val(s + t, s))
        for s in np.geomspace(0.05, 4.0, 7)
        for t in np.geomspace(0.05, 4.0, 7)
    ]
    peak = max(probe)
    r_base = _truncation_radius(lambda s: pair_val(s + 0.5, s), peak)
    r_gap = _truncation_radius(lambda t: pair_val(0.5 + t, 0.5), peak)

    def base_slice(t: float) -> float:
        return _half_line_quad(
            lambda s: pair_val(s + t, s), theta - 1.0, r_base,
            quad.nodes_per_interval,
        )

    lhs = _half_line_quad(
        base_slice, 2.0 * theta, r_gap, quad.nodes_per_interval
    )
    return lhs, rhs
