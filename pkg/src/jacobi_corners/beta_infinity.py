"""Zero-temperature (theta -> infinity) limit: crystallization onto Jacobi
polynomial roots and Gaussian fluctuation checks.

As theta grows with (alpha, M, N) fixed, the level-N row concentrates on
the roots of the degree-min(N, M) orthogonal polynomial for the weight
x^(alpha-1) (1-x)^|M-N| on (0, 1); these roots are the unique maximizer
of the electrostatic energy

    2 sum_{i<j} log(z_j - z_i)
      + sum_i [alpha log z_i + (|M-N| + 1) log(1 - z_i)],

and sqrt(theta)-scaled fluctuations around them are asymptotically
Gaussian.  Expectations of the elementary symmetric polynomials e_k of
the (padded) rows do not depend on theta at all, which pins the centering
exactly; the map from roots to elementary values is linearized by the
Jacobian matrix d e_k / d x_i = e_{k-1}(x without x_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericError
from .operators import covariance_e, expectation_e
from .params import EnsembleParams, ObservableSpec
from .sampler import SamplerConfig, run_chain


@dataclass(frozen=True)
class RootTarget:
    """Deterministic limit of a level: strictly increasing roots in (0, 1)."""

    level: int
    roots: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.roots, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("roots must be a nonempty vector")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise DomainError("roots must lie strictly inside (0, 1)")
        if np.any(np.diff(arr) <= 0.0):
            raise DomainError("roots must be strictly increasing")
        object.__setattr__(self, "roots", arr)


def jacobi_roots(n_level: int, m_param: int, alpha: float) -> RootTarget:
    """Roots of the orthogonal polynomial for x^(alpha-1)(1-x)^|M-N| on (0,1).

    Degree min(n_level, m_param); computed from the symmetric tridiagonal
    recurrence matrix of the classical Jacobi weight transported to (0, 1).
    """
    if n_level < 1 or m_param < 1:
        raise DomainError("n_level and m_param must be >= 1")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    degree = min(n_level, m_param)
    a = float(abs(m_param - n_level))
    b = float(alpha) - 1.0
    diag = np.empty(degree)
    diag[0] = (b - a) / (a + b + 2.0)
    for k in range(1, degree):
        s = 2.0 * k + a + b
        diag[k] = (b * b - a * a) / (s * (s + 2.0))
    off = np.empty(max(degree - 1, 0))
    for k in range(1, degree):
        s = 2.0 * k + a + b
        off[k - 1] = math.sqrt(
            4.0 * k * (k + a) * (k + b) * (k + a + b)
            / (s * s * (s + 1.0) * (s - 1.0))
        )
    try:
        t_vals = eigh_tridiagonal(diag, off, eigvals_only=True)
    except Exception as exc:
        raise NumericError(f"tridiagonal eigensolve failed: {exc}") from exc
    return RootTarget(level=n_level, roots=(1.0 + t_vals) / 2.0)


def electrostatic_residual(
    n_level: int, m_param: int, alpha: float, roots: Optional[np.ndarray] = None
) -> float:
    """Largest component of the energy gradient at the given points.

    Zero exactly at the crystallized configuration; the default evaluates
    the computed roots themselves.
    """
    if roots is None:
        roots = jacobi_roots(n_level, m_param, alpha).roots
    z = np.asarray(roots, dtype=float)
    rate1 = abs(m_param - n_level) + 1.0
    worst = 0.0
    for i in range(len(z)):
        g = float(alpha) / z[i] - rate1 / (1.0 - z[i])
        for j in range(len(z)):
            if j != i:
                g += 2.0 / (z[i] - z[j])
        worst = max(worst, abs(g))
    return worst


def esym_values(x: Sequence[float]) -> np.ndarray:
    """All elementary symmetric values (e_1, ..., e_K) of the vector."""
    arr = np.asarray(x, dtype=float)
    k = len(arr)
    e = np.zeros(k + 1)
    e[0] = 1.0
    for v in arr:
        for d in range(k, 0, -1):
            e[d] += v * e[d - 1]
    return e[1:]


def esym_jacobian(x: Sequence[float]) -> np.ndarray:
    """Matrix with entry (k, i) = d e_{k+1} / d x_i = e_k(x with x_i removed).

    Computed by synthetic division of the full generating polynomial by
    (1 + t x_i); requires distinct entries.
    """
    arr = np.asarray(x, dtype=float)
    k = len(arr)
    if k == 0:
        raise DomainError("need at least one coordinate")
    if len(np.unique(arr)) != k:
        raise DomainError("coordinates must be distinct")
    full = np.concatenate([[1.0], esym_values(arr)])
    jac = np.empty((k, k))
    for i in range(k):
        reduced = np.empty(k)
        reduced[0] = 1.0
        for d in range(1, k):
            reduced[d] = full[d] - arr[i] * reduced[d - 1]
        jac[:, i] = reduced
    return jac


def esym_jacobian_solve(x: Sequence[float], rhs: np.ndarray) -> np.ndarray:
    """Apply the inverse of the linearization matrix to rhs."""
    jac = esym_jacobian(x)
    try:
        return np.linalg.solve(jac, np.asarray(rhs, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"linearization matrix is singular: {exc}") from exc


def theta_scaled_cov_sequence(
    alpha,
    m_param: int,
    levels: Tuple[int, int],
    degrees: Tuple[int, int],
    theta_grid: Sequence,
) -> list:
    """theta * Cov(e_{k1}(n1), e_{k2}(n2)) along an increasing theta grid.

    The sequence converges as theta grows; its limit is the covariance of
    the Gaussian fluctuation field of the elementary values.
    """
    grid = list(theta_grid)
    if len(grid) == 0:
        raise DomainError("theta_grid must be nonempty")
    if any(not t > 0 for t in grid):
        raise DomainError("theta_grid must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("theta_grid must be strictly increasing")
    n1, n2 = levels
    k1, k2 = degrees
    if n1 < n2:
        raise DomainError("levels must come larger first")
    out = []
    for theta in grid:
        params = EnsembleParams(theta=theta, alpha=alpha, m_param=m_param)
        cov = covariance_e(
            params,
            ObservableSpec("elementary", k1, n1),
            ObservableSpec("elementary", k2, n2),
        )
        out.append(theta * cov.value if cov.exact else float(theta) * cov.value)
    return out


def esym_expectation_is_theta_free(
    alpha, m_param: int, level: int, degree: int, thetas: Sequence = (1, 2, 10)
) -> bool:
    """Exact check that E e_degree(level) is the same at every given theta."""
    values = []
    for theta in thetas:
        params = EnsembleParams(theta=theta, alpha=alpha, m_param=m_param)
        values.append(expectation_e(
            params, [ObservableSpec("elementary", degree, level)]
        ).value)
    return all(v == values[0] for v in values[1:])


def fluctuation_samples(
    params: EnsembleParams,
    big_n: int,
    count: int,
    seed: int = 0,
    config: Optional[SamplerConfig] = None,
) -> np.ndarray:
    """Matrix of sqrt(theta)-scaled deviations of sampled top rows from the
    crystallized roots; one row per retained sample."""
    if count < 1:
        raise DomainError("count must be >= 1")
    target = jacobi_roots(big_n, params.m_param, float(params.alpha))
    run = run_chain(
        params, big_n, count, seed=seed, config=config, collect_levels=(big_n,)
    )
    rows = run.level_rows[big_n]
    return math.sqrt(float(params.theta)) * (rows - target.roots[None, :])
