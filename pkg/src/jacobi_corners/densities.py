"""Finite-size densities of the multilevel Jacobi ensemble, all in log space.

Layout of the law implemented here, for top level N, matrix dimension M,
theta = beta/2, and L = min(N, M):

* Single-level marginal at level n (normalized): with l = min(n, M),

      l! / S_l(theta*alpha, theta*|M-n| + theta, theta)
        * prod_{i<j} (z_j - z_i)^{2 theta}
        * prod_i z_i^{theta*alpha - 1} (1 - z_i)^{theta*|M-n| + theta - 1},

  where S_l is the Selberg product of gamma functions.
* Backward transition from a level-n row to a level-(n-1) row, normalized
  in the lower row; two regimes depending on whether rows still grow
  (n <= M) or have saturated at length M (n > M).
* Joint law of the whole array: top-row Jacobi-type weight with a single
  Vandermonde, times interaction factors per intermediate level.  Only the
  shape is implemented (the multilevel normalization constant is not
  derived anywhere usable); see log_joint_density.

Every function validates open-interval, strictly interlaced inputs and
raises DomainError otherwise.  The convention 0 * log(0) = 0 is realized
by skipping terms whose exponent vanishes; since closed-boundary inputs
are rejected, logs below are always finite.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import DomainError
from .params import CornersArray, EnsembleParams, check_interlacing, open_unit_row


def log_selberg(n: int, a0: float, a1: float, gamma: float) -> float:
    """Log of the Selberg integral S_n(a0, a1, gamma).

    S_n = prod_{j=0}^{n-1} G(a0+j*g) G(a1+j*g) G(1+(j+1)*g)
          / (G(a0+a1+(n+j-1)*g) G(1+g)),  G = Gamma.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    a0, a1, gamma = float(a0), float(a1), float(gamma)
    if a0 <= 0 or a1 <= 0:
        raise DomainError("a0 and a1 must be positive")
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    j = np.arange(n)
    total = (
        gammaln(a0 + j * gamma)
        + gammaln(a1 + j * gamma)
        + gammaln(1.0 + (j + 1) * gamma)
        - gammaln(a0 + a1 + (n + j - 1) * gamma)
        - gammaln(1.0 + gamma)
    )
    return float(np.sum(total))


def _log_vandermonde(z: np.ndarray) -> float:
    if len(z) < 2:
        return 0.0
    diff = z[None, :] - z[:, None]
    return float(np.sum(np.log(diff[np.triu_indices(len(z), k=1)])))


def _log_cross(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(np.log(np.abs(a[:, None] - b[None, :]))))


def log_level_density(params: EnsembleParams, n: int, z: Sequence[float]) -> float:
    """Normalized log-density of the level-n row at the point z."""
    if n < 1:
        raise DomainError("level must be >= 1")
    theta = float(params.theta)
    alpha = float(params.alpha)
    m = params.m_param
    length = min(n, m)
    arr = open_unit_row("z", z)
    if len(arr) != length:
        raise DomainError(f"level {n} row must have length {length}, got {len(arr)}")
    a0 = theta * alpha
    a1 = theta * abs(m - n) + theta
    out = gammaln(length + 1.0) - log_selberg(length, a0, a1, theta)
    out += 2.0 * theta * _log_vandermonde(arr)
    if a0 != 1.0:
        out += (a0 - 1.0) * float(np.sum(np.log(arr)))
    if a1 != 1.0:
        out += (a1 - 1.0) * float(np.sum(np.log1p(-arr)))
    return float(out)


def level_coefficients(params: EnsembleParams, big_n: int) -> dict:
    """Per-level exponents of the joint law, shared with the Gibbs sampler.

    Returns arrays indexed by level k = 1..big_n (index 0 unused):
    ``pow_x[k]`` multiplies log x, ``pow_1mx[k]`` multiplies log(1-x),
    ``vand[k]`` multiplies the within-row log-Vandermonde; the coupling
    between adjacent rows always carries exponent theta - 1.
    """
    if big_n < 1:
        raise DomainError("big_n must be >= 1")
    theta = float(params.theta)
    alpha = float(params.alpha)
    m = params.m_param
    pow_x = np.zeros(big_n + 1)
    pow_1mx = np.zeros(big_n + 1)
    vand = np.zeros(big_n + 1)
    for k in range(1, big_n + 1):
        if k == big_n:
            pow_x[k] = theta * (alpha + big_n - 1.0) - 1.0
            vand[k] = 1.0
        else:
            pow_x[k] = -2.0 * theta
            vand[k] = 2.0 - 2.0 * theta
    pow_1mx[min(big_n, m)] = theta * max(m - big_n, 0) + theta - 1.0
    return {"pow_x": pow_x, "pow_1mx": pow_1mx, "vand": vand, "cross": theta - 1.0}


def log_joint_density(params: EnsembleParams, big_n: int, corners: CornersArray) -> float:
    """Unnormalized log-density of the full interlacing array.

    The value is the log of the product of all interaction and weight
    factors; the (unknown) multilevel constant is omitted, so only
    differences of this function at fixed (params, big_n) are meaningful.
    """
    if corners.big_n != big_n:
        raise DomainError(f"corners has {corners.big_n} levels, expected {big_n}")
    if corners.m_param != params.m_param:
        raise DomainError("corners and params disagree on m_param")
    coef = level_coefficients(params, big_n)
    out = 0.0
    for k in range(1, big_n + 1):
        row = corners.level(k)
        if coef["pow_x"][k] != 0.0:
            out += coef["pow_x"][k] * float(np.sum(np.log(row)))
        if coef["pow_1mx"][k] != 0.0:
            out += coef["pow_1mx"][k] * float(np.sum(np.log1p(-row)))
        if coef["vand"][k] != 0.0 and len(row) > 1:
            out += coef["vand"][k] * _log_vandermonde(row)
        if k < big_n and coef["cross"] != 0.0:
            out += coef["cross"] * _log_cross(row, corners.level(k + 1))
    return out


def log_backward_density(
    params: EnsembleParams, n: int, y: Sequence[float], z: Sequence[float]
) -> float:
    """Normalized log-density of the level-(n-1) row z given the level-n row y."""
    if n < 2:
        raise DomainError("backward transition needs n >= 2")
    theta = float(params.theta)
    m = params.m_param
    y_arr = open_unit_row("y", y)
    z_arr = open_unit_row("z", z)
    if len(y_arr) != min(n, m) or len(z_arr) != min(n - 1, m):
        raise DomainError("row lengths do not match the requested levels")
    check_interlacing(z_arr, y_arr)
    out = 0.0
    if n <= m:
        out += gammaln(n * theta) - n * gammaln(theta)
        out += (n - 1.0) * theta * float(np.sum(np.log(y_arr)))
        out += _log_vandermonde(z_arr)
        if theta != 0.5:
            out += (1.0 - 2.0 * theta) * _log_vandermonde(y_arr)
        if theta != 1.0:
            out += (theta - 1.0) * _log_cross(y_arr, z_arr)
        out += -n * theta * float(np.sum(np.log(z_arr)))
    else:
        out += gammaln(n * theta) - m * gammaln(theta) - gammaln((n - m) * theta)
        out += _log_vandermonde(z_arr)
        if theta != 0.5:
            out += (1.0 - 2.0 * theta) * _log_vandermonde(y_arr)
        out += (n - 1.0) * theta * float(np.sum(np.log(y_arr)))
        e_y = theta * (m - n - 1.0) + 1.0
        if e_y != 0.0:
            out += e_y * float(np.sum(np.log1p(-y_arr)))
        if theta != 1.0:
            out += (theta - 1.0) * _log_cross(y_arr, z_arr)
        e_z = theta * (n - m) - 1.0
        if e_z != 0.0:
            out += e_z * float(np.sum(np.log1p(-z_arr)))
        out += -n * theta * float(np.sum(np.log(z_arr)))
    return float(out)


def log_forward_density(
    params: EnsembleParams, n: int, z: Sequence[float], y: Sequence[float]
) -> float:
    """Normalized log-density of the level-n row y given the level-(n-1) row z.

    Obtained from the backward kernel and the two level marginals by Bayes,
    which fixes the normalization without any extra constant.
    """
    return (
        log_backward_density(params, n, y, z)
        + log_level_density(params, n, y)
        - log_level_density(params, n - 1, z)
    )


def _dixon_rhs(alphas: np.ndarray, a: np.ndarray, b: Optional[float]) -> float:
    total = float(np.sum(alphas))
    log_out = float(np.sum(gammaln(alphas))) - gammaln(total)
    npts = len(a)
    for i in range(npts):
        for j in range(i + 1, npts):
            log_out += (alphas[i] + alphas[j] - 1.0) * math.log(abs(a[i] - a[j]))
    if b is not None:
        for i in range(npts):
            log_out += (alphas[i] - total) * math.log(abs(b - a[i]))
    return math.exp(log_out)


def dixon_check(
    alphas: Sequence[float], a: Sequence[float], b: Optional[float] = None
) -> Tuple[float, float]:
    """Evaluate both sides of the interlacing beta-integral identity.

    Left side: integral over a_1 < t_1 < a_2 < ... < t_n < a_{n+1} of
    prod_{i<j} |t_j - t_i| * prod_{i,j} |t_i - a_j|^{alphas_j - 1},
    divided by prod_i |b - t_i|^{sum(alphas)} when b is finite.
    Right side: the closed gamma-product form.  Both sides use absolute
    values of the node differences, i.e. the decreasing-order convention.

    Supports n = len(a) - 1 in {1, 2}; b, when given, must lie outside
    [a_1, a_{n+1}].  Returns (lhs, rhs) with lhs from adaptive quadrature.
    """
    alphas = np.asarray(alphas, dtype=float)
    a = np.asarray(a, dtype=float)
    n = len(a) - 1
    if n not in (1, 2):
        raise DomainError("only n = 1 or n = 2 interior nodes are supported")
    if len(alphas) != n + 1:
        raise DomainError(f"alphas must have length {n + 1}")
    if np.any(alphas <= 0):
        raise DomainError("all alphas must be positive")
    if np.any(np.diff(a) <= 0):
        raise DomainError("a must be strictly increasing")
    total = float(np.sum(alphas))
    if b is not None:
        b = float(b)
        if a[0] <= b <= a[-1]:
            raise DomainError("b must lie outside [a_1, a_{n+1}]")

    def bfac(t: float) -> float:
        return abs(b - t) ** (-total) if b is not None else 1.0

    if n == 1:
        lhs, _ = integrate.quad(
            bfac, a[0], a[1], weight="alg", wvar=(alphas[0] - 1.0, alphas[1] - 1.0),
            epsabs=1e-13, epsrel=1e-11, limit=200,
        )
    else:
        def inner(t1: float) -> float:
            val, _ = integrate.quad(
                lambda t2: abs(t2 - t1) * abs(t2 - a[0]) ** (alphas[0] - 1.0) * bfac(t2),
                a[1], a[2], weight="alg", wvar=(alphas[1] - 1.0, alphas[2] - 1.0),
                epsabs=1e-13, epsrel=1e-11, limit=200,
            )
            return val * abs(t1 - a[2]) ** (alphas[2] - 1.0) * bfac(t1)

        lhs, _ = integrate.quad(
            inner, a[0], a[1], weight="alg", wvar=(alphas[0] - 1.0, alphas[1] - 1.0),
            epsabs=1e-13, epsrel=1e-11, limit=200,
        )
    return float(lhs), _dixon_rhs(alphas, a, b)
