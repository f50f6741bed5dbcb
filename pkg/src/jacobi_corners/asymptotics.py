"""Large-size limits: covariances of global fluctuations, frozen boundary,
and the pullback to a planar Gaussian field.

Setting: levels and the matrix dimension grow proportionally, level/L ->
n_hat, M/L -> m_hat, theta*alpha stays alpha_hat (hat parameters).  The
centered power sums p_k at macroscopic levels converge to a Gaussian
family with covariances given by a double contour integral

    Cov(p_{k1}(n1_hat), p_{k2}(n2_hat))
      = 1/theta * (2 pi i)^-2 oint oint du1 du2 / (u1 - u2)^2
        * prod_r [ u_r (u_r - alpha_hat) /
                   ((u_r + n_hat_r)(u_r - alpha_hat - m_hat)) ]^{k_r},

with the u_r contour enclosing -n_hat_r but not alpha_hat + m_hat, and the
u2 contour inside u1 for the same level.  The natural contour for level
n_hat is a circle through the support of the limit density (a vertical
line when n_hat = m_hat).

Quadrature strategy: the Moebius change of variable

    v = A (u + n_hat)/(u - alpha_hat - m_hat),
    A = sqrt(m_hat (m_hat + alpha_hat) / (n_hat (n_hat + alpha_hat)))

maps that contour onto the unit circle for every level (the line case
closes up through v(infinity) = 1, so no truncation is needed), sends
-n_hat to v = 0 and the forbidden pole to v = infinity, and turns the
integrand into a trapezoid-friendly smooth function:

    du1 du2 / (u1 - u2)^2 = A1 A2 (B1 + C)(B2 + C) / D^2 dv1 dv2,
    D = v2 A1 (B1 + C) - v1 A2 (B2 + C) + A1 A2 (B2 - B1),

with B_r = n_hat_r, C = alpha_hat + m_hat, and the statistic becomes a
Laurent polynomial through x(v) = C1 + sqrt(C2) (v + 1/v),

    C1 = (n m + (n + a)(m + a)) / (n + a + m)^2,
    C2 = n m (n + a)(m + a) / (n + a + m)^4     (n = n_hat, m = m_hat,
                                                 a = alpha_hat).

The support of the limit level density is [C1 - 2 sqrt(C2),
C1 + 2 sqrt(C2)], and x(v) restricted to |v| = 1 parameterizes it; the
degree-n Chebyshev polynomial of the rescaled variable becomes
(v^n + v^-n)/2 exactly.  The inner contour always runs on radius
1 - delta, which realizes the nesting prescription at equal levels and
deforms nothing through a pole at distinct ones; the known geometric
aliasing rate is removed by a two-point extrapolation in delta, and node
doubling guards every returned value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import chebyshev as ncheb
from scipy import integrate

from .errors import DomainError, NumericError

_LEVEL_TOL = 1e-12
_MIN_NODES = 64


@dataclass(frozen=True)
class HatParams:
    """Scaled ensemble parameters: M/L -> m_hat, theta*alpha -> alpha_hat."""

    m_hat: float
    alpha_hat: float

    def __post_init__(self) -> None:
        if not (self.m_hat > 0 and math.isfinite(self.m_hat)):
            raise DomainError(f"m_hat must be positive, got {self.m_hat}")
        if not (self.alpha_hat > 0 and math.isfinite(self.alpha_hat)):
            raise DomainError(f"alpha_hat must be positive, got {self.alpha_hat}")


@dataclass(frozen=True)
class LevelHeight:
    """A macroscopic level height n_hat = level/L > 0."""

    n_hat: float

    def __post_init__(self) -> None:
        if not (self.n_hat > 0 and math.isfinite(self.n_hat)):
            raise DomainError(f"n_hat must be positive, got {self.n_hat}")


@dataclass(frozen=True)
class ContourSpec:
    """Geometry of the level contour used for the covariance quadrature.

    Circle case: ``center`` and ``radius`` in the u-plane.  Line case
    (n_hat = m_hat): ``is_line`` with ``abscissa`` = Re u; the quadrature
    itself runs on the compactified image, so nothing is dropped;
    ``truncation_height`` reports the largest |Im u| represented by the
    node set and ``tail_bound`` the mass beyond it (zero here).
    """

    nodes: int
    is_line: bool
    center: Optional[float] = None
    radius: Optional[float] = None
    abscissa: Optional[float] = None
    truncation_height: Optional[float] = None
    tail_bound: float = 0.0

    def __post_init__(self) -> None:
        if self.nodes < _MIN_NODES:
            raise DomainError(f"nodes must be >= {_MIN_NODES}, got {self.nodes}")


def _chart(hp: HatParams, n_hat: float):
    """Constants of the v-chart for one level: (A, B, C, C1, sqrt_C2)."""
    m, a = hp.m_hat, hp.alpha_hat
    A = math.sqrt(m * (m + a) / (n_hat * (n_hat + a)))
    B = n_hat
    C = a + m
    s = n_hat + a + m
    c1 = (n_hat * m + (n_hat + a) * (m + a)) / s**2
    c2 = m * (m + a) * n_hat * (n_hat + a) / s**4
    return A, B, C, c1, math.sqrt(c2)


def f_limit(hp: HatParams, n_hat: float, k: int, u: complex) -> complex:
    """The integrand factor f(u)^k for one level."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if n_hat <= 0:
        raise DomainError("n_hat must be positive")
    den1 = u + n_hat
    den2 = u - hp.alpha_hat - hp.m_hat
    if den1 == 0 or den2 == 0:
        raise DomainError(f"u = {u} sits on a pole of the integrand")
    f = u * (u - hp.alpha_hat) / (den1 * den2)
    return f**k


def level_contour(hp: HatParams, n_hat: float, nodes: int = 512) -> ContourSpec:
    """Contour in the u-plane used for the given level."""
    if n_hat <= 0:
        raise DomainError("n_hat must be positive")
    m, a = hp.m_hat, hp.alpha_hat
    if abs(n_hat - m) <= _LEVEL_TOL * max(1.0, m):
        height = (n_hat + a + m) / (2.0 * math.sin(math.pi / (2 * nodes)))
        return ContourSpec(
            nodes=nodes, is_line=True, abscissa=a / 2.0,
            truncation_height=height, tail_bound=0.0,
        )
    center = n_hat * (a + m) / (n_hat - m)
    radius = math.sqrt(m * (m + a) * n_hat * (n_hat + a)) / abs(n_hat - m)
    return ContourSpec(nodes=nodes, is_line=False, center=center, radius=radius)


def frozen_boundary(hp: HatParams, n_hat: float) -> Tuple[float, float]:
    """Support [l, r] of the limit density of level-height n_hat."""
    if n_hat <= 0:
        raise DomainError("n_hat must be positive")
    _, _, _, c1, sq = _chart(hp, n_hat)
    l = max(c1 - 2.0 * sq, 0.0)
    r = min(c1 + 2.0 * sq, 1.0)
    return l, r


def omega(hp: HatParams, n_hat: float, x: float) -> complex:
    """Upper-half-plane coordinate of the point (x, n_hat) in the rescaled
    array; lies on the level contour, real exactly at the support edges."""
    l, r = frozen_boundary(hp, n_hat)
    if not l - 1e-12 <= x <= r + 1e-12:
        raise DomainError(f"x = {x} outside the support [{l}, {r}]")
    m, a = hp.m_hat, hp.alpha_hat
    qa = x - 1.0
    qb = x * (n_hat - a - m) + a
    qc = -x * n_hat * (a + m)
    if abs(qa) < 1e-13:
        return complex(-qc / qb, 0.0)
    disc = qb * qb - 4.0 * qa * qc
    root = math.sqrt(max(-disc, 0.0))
    u = complex(-qb / (2.0 * qa), root / (2.0 * qa))
    if u.imag < 0:
        u = u.conjugate()
    return u


# ---------------------------------------------------------------------------
# double contour quadrature
# ---------------------------------------------------------------------------


def _grid(nodes: int) -> np.ndarray:
    phi = 2.0 * math.pi * (np.arange(nodes) + 0.5) / nodes
    return np.exp(1j * phi)


def _double_sum(
    fn1: Callable[[np.ndarray], np.ndarray],
    fn2: Callable[[np.ndarray], np.ndarray],
    chart1, chart2,
    nodes: int,
    rho2: float,
) -> complex:
    """Trapezoid value of (2 pi i)^-2 oint oint K fn1 fn2 dv1 dv2.

    v1 runs over the unit circle, v2 over the circle of radius rho2.  The
    kernel reduces to 1/(v1 - v2)^2 when the charts coincide.
    """
    A1, B1, C, _, _ = chart1
    A2, B2, _, _, _ = chart2
    v1 = _grid(nodes)
    v2 = rho2 * _grid(nodes)
    w1 = fn1(v1) * v1
    w2 = fn2(v2) * v2
    scale = A1 * A2 * (B1 + C) * (B2 + C)
    total = 0.0 + 0.0j
    for i in range(nodes):
        d = v2 * A1 * (B1 + C) - v1[i] * A2 * (B2 + C) + A1 * A2 * (B2 - B1)
        if np.min(np.abs(d)) < 1e-9 * math.sqrt(scale):
            raise NumericError("level contours pinch; quadrature invalid")
        total += w1[i] * np.sum(w2 * scale / (d * d))
    return total / (nodes * nodes)


def _covariance_quadrature(
    hp: HatParams,
    theta: float,
    level1: float, fn1,
    level2: float, fn2,
    nodes: int,
    delta: float,
) -> float:
    if theta <= 0:
        raise DomainError("theta must be positive")
    if level1 < level2 - _LEVEL_TOL:
        raise DomainError("the first level must be the larger one")
    chart1 = _chart(hp, level1)
    chart2 = _chart(hp, level2)

    def once(n: int) -> complex:
        # The inner contour is shrunk off the outer one; this realizes the
        # nesting prescription for equal levels and is a legal deformation
        # for distinct ones (no pole sits in the swept annulus).  The
        # aliasing error is C*rho^n to leading order; eliminate it by a
        # two-point extrapolation with the rate known exactly.
        d_eff = max(delta, 36.0 / n)
        rho1, rho2 = 1.0 - d_eff, 1.0 - d_eff / 2.0
        q1 = _double_sum(fn1, fn2, chart1, chart2, n, rho1)
        q2 = _double_sum(fn1, fn2, chart1, chart2, n, rho2)
        r1, r2 = rho1**n, rho2**n
        return (q2 * r1 - q1 * r2) / (r1 - r2)

    coarse = once(nodes)
    fine = once(2 * nodes)
    if abs(fine - coarse) > 1e-9 * max(1.0, abs(fine)):
        raise NumericError(
            f"node doubling unstable: {coarse} vs {fine} at {nodes} nodes"
        )
    if abs(fine.imag) > 1e-10 * max(1.0, abs(fine.real)):
        raise NumericError(f"imaginary residue {fine.imag} exceeds tolerance")
    return float(fine.real) / theta


def _power_statistic(chart, k: int):
    _, _, _, c1, sq = chart

    def fn(v: np.ndarray) -> np.ndarray:
        return (c1 + sq * (v + 1.0 / v)) ** k

    return fn


def _cheb_statistic(n: int):
    def fn(v: np.ndarray) -> np.ndarray:
        return 0.5 * (v**n + v ** (-n))

    return fn


def limit_covariance_p(
    hp: HatParams,
    theta: float,
    a: Tuple[float, int],
    b: Tuple[float, int],
    nodes: int = 512,
    delta: float = 1e-3,
) -> float:
    """Limit covariance of centered power sums p_{k} at two level heights.

    ``a = (n1_hat, k1)``, ``b = (n2_hat, k2)`` with n1_hat >= n2_hat.
    """
    (n1, k1), (n2, k2) = a, b
    for k in (k1, k2):
        if not isinstance(k, int) or k < 1:
            raise DomainError(f"degree must be a positive integer, got {k!r}")
    for n in (n1, n2):
        if n <= 0:
            raise DomainError("level heights must be positive")
    if nodes < _MIN_NODES:
        raise DomainError(f"nodes must be >= {_MIN_NODES}")
    c1 = _chart(hp, n1)
    c2 = _chart(hp, n2)
    return _covariance_quadrature(
        hp, theta, n1, _power_statistic(c1, k1), n2, _power_statistic(c2, k2),
        nodes, delta,
    )


def chebyshev_cov_contour(
    hp: HatParams,
    theta: float,
    a: Tuple[float, int],
    b: Tuple[float, int],
    nodes: int = 512,
    delta: float = 1e-3,
) -> float:
    """Quadrature value of the covariance of rescaled Chebyshev statistics."""
    (n1, d1), (n2, d2) = a, b
    for d in (d1, d2):
        if not isinstance(d, int) or d < 1:
            raise DomainError("Chebyshev degree must be a positive integer")
    return _covariance_quadrature(
        hp, theta, n1, _cheb_statistic(d1), n2, _cheb_statistic(d2), nodes, delta
    )


def chebyshev_cov(
    hp: HatParams, theta: float, a: Tuple[float, int], b: Tuple[float, int]
) -> float:
    """Closed form for the covariance of rescaled Chebyshev statistics.

    ``a = (n1_hat, d1)``, ``b = (n2_hat, d2)`` with n1_hat >= n2_hat; the
    value vanishes for d1 < d2, and equal levels give d1/(4 theta) times
    the Kronecker delta.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    (n1, d1), (n2, d2) = a, b
    if n1 < n2 - _LEVEL_TOL:
        raise DomainError("the first level must be the larger one")
    for d in (d1, d2):
        if not isinstance(d, int) or d < 1:
            raise DomainError("Chebyshev degree must be a positive integer")
    if d1 < d2:
        return 0.0
    m, al = hp.m_hat, hp.alpha_hat
    if abs(n1 - n2) <= _LEVEL_TOL * max(1.0, n1):
        return d1 / (4.0 * theta) if d1 == d2 else 0.0
    s1, s2 = n1 + al + m, n2 + al + m
    g1 = math.sqrt(n1 * (al + n1))
    g2 = math.sqrt(n2 * (al + n2))
    fac1 = (n2 - n1) / s2 * math.sqrt(m * (al + m)) / g1
    fac2 = s1 * g2 / (s2 * g1)
    comb = math.factorial(d1) / (
        4.0 * theta * math.factorial(d2 - 1) * math.factorial(d1 - d2)
    )
    return comb * fac1 ** (d1 - d2) * fac2**d2


def monomial_in_chebyshev(hp: HatParams, n_hat: float, m: int) -> np.ndarray:
    """Coefficients of x^m in the rescaled Chebyshev basis of the level.

    Returns c with x^m = sum_j c[j] * T_j((x - C1)/(2 sqrt(C2))).
    """
    if not isinstance(m, int) or m < 0:
        raise DomainError("monomial degree must be a nonnegative integer")
    _, _, _, c1, sq = _chart(hp, n_hat)
    poly = np.zeros(m + 1)
    for j in range(m + 1):
        poly[j] = math.comb(m, j) * c1 ** (m - j) * (2.0 * sq) ** j
    return ncheb.poly2cheb(poly)


def power_cov_via_chebyshev(
    hp: HatParams, theta: float, a: Tuple[float, int], b: Tuple[float, int]
) -> float:
    """Covariance of power sums assembled from the Chebyshev closed form."""
    (n1, k1), (n2, k2) = a, b
    c_a = monomial_in_chebyshev(hp, n1, k1)
    c_b = monomial_in_chebyshev(hp, n2, k2)
    out = 0.0
    for j1 in range(1, len(c_a)):
        for j2 in range(1, len(c_b)):
            out += c_a[j1] * c_b[j2] * chebyshev_cov(hp, theta, (n1, j1), (n2, j2))
    return out


# ---------------------------------------------------------------------------
# Gaussian field pullback
# ---------------------------------------------------------------------------


def gff_cov(z: complex, w: complex) -> float:
    """Whole-plane field covariance -(1/2 pi) log |(z-w)/(z - conj(w))|.

    Both points must lie strictly in the open upper half plane and differ.
    """
    z, w = complex(z), complex(w)
    if z.imag <= 0 or w.imag <= 0:
        raise DomainError("both points must lie in the open upper half plane")
    if z == w:
        raise DomainError("points must be distinct")
    return -math.log(abs((z - w) / (z - w.conjugate()))) / (2.0 * math.pi)


def _gff_kernel(z: complex, w: complex) -> float:
    """Quadrature-tolerant version: zero on the boundary, no exceptions."""
    if z.imag <= 1e-14 or w.imag <= 1e-14:
        return 0.0
    d = abs(z - w)
    if d == 0.0:
        return 0.0
    return -math.log(d / abs(z - w.conjugate())) / (2.0 * math.pi)


def _poly_log_integral(m: int, lo: float, hi: float, c: float) -> float:
    """Closed form of int_lo^hi x^m log|x - c| dx (c may sit inside)."""

    def anti(x: float) -> float:
        diff = x - c
        if diff == 0.0:
            lead = 0.0
        else:
            lead = (x ** (m + 1) - c ** (m + 1)) / (m + 1) * math.log(abs(diff))
        tail = sum(c ** (m - j) * x ** (j + 1) / (j + 1) for j in range(m + 1))
        return lead - tail / (m + 1)

    return anti(hi) - anti(lo)


def height_cov(
    hp: HatParams,
    theta: float,
    a: Tuple[float, int],
    b: Tuple[float, int],
) -> float:
    """Covariance of height-function moments via the field pullback.

    ``a = (n1_hat, m1)``: the observable is the integral of the centered
    height function against x^m1 along the level-n1_hat slice.  Equals the
    double slice integral of the field covariance evaluated at the
    upper-half-plane images of the two slices.  The value does not depend
    on theta; the argument is kept for symmetry with the other covariance
    routines and must still be positive.
    """
    if theta <= 0:
        raise DomainError("theta must be positive")
    (n1, m1), (n2, m2) = a, b
    for m in (m1, m2):
        if not isinstance(m, int) or m < 0:
            raise DomainError("moment powers must be nonnegative integers")
    l1, r1 = frozen_boundary(hp, n1)
    l2, r2 = frozen_boundary(hp, n2)
    equal = abs(n1 - n2) <= _LEVEL_TOL * max(1.0, n1)

    if not equal:
        def inner(x1: float) -> float:
            z = omega(hp, n1, x1)
            if z.imag <= 1e-14:
                return 0.0
            val, _ = integrate.quad(
                lambda x2: _gff_kernel(z, omega(hp, n2, x2)) * x2**m2,
                l2, r2, epsabs=1e-10, epsrel=1e-8, limit=100,
            )
            return val

        total, _ = integrate.quad(
            lambda x1: inner(x1) * x1**m1, l1, r1,
            epsabs=1e-9, epsrel=1e-7, limit=100,
        )
        return total

    def inner_equal(x1: float) -> float:
        z = omega(hp, n1, x1)
        if z.imag <= 1e-14:
            return 0.0
        two_pi = 2.0 * math.pi

        def remainder(x2: float) -> float:
            dx = x1 - x2
            if abs(dx) < 1e-12:
                x2 = x1 - 1e-9 if x1 - 1e-9 > l2 else x1 + 1e-9
                dx = x1 - x2
            w = omega(hp, n2, x2)
            ratio = abs((z - w) / dx)
            return (-math.log(ratio) + math.log(abs(z - w.conjugate()))) / two_pi * x2**m2

        smooth, _ = integrate.quad(
            remainder, l2, r2, points=[x1], epsabs=1e-10, epsrel=1e-8, limit=120,
        )
        return smooth - _poly_log_integral(m2, l2, r2, x1) / two_pi

    total, _ = integrate.quad(
        lambda x1: inner_equal(x1) * x1**m1, l1, r1,
        epsabs=1e-9, epsrel=1e-7, limit=120,
    )
    return total
