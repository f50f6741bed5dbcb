"""Core parameter and state types for the multilevel Jacobi corners ensemble.

Conventions used throughout the package:

* ``theta`` is the inverse-temperature parameter (beta = 2*theta), strictly
  positive.  ``alpha`` is the left-edge weight parameter, strictly positive.
  ``m_param`` is the integer matrix dimension M controlling both the
  right-edge weight and the level where row lengths saturate.
* An interlacing array with top level N stores one row per level
  n = 1..N; row n has length min(n, m_param) and lives in the open
  interval (0, 1).  Rows are kept strictly increasing, and consecutive
  rows interlace strictly: with z the longer-or-equal upper row and y the
  row below it, y_1 < z_1 < y_2 < z_2 < ...  whenever both rows have the
  same length the pattern truncates accordingly.
* Exact (rational) arithmetic is available whenever ``theta`` and
  ``alpha`` are given as int or fractions.Fraction; float inputs select
  floating-point code paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import DomainError

Scalar = Union[int, float, Fraction]


def _check_positive_scalar(name: str, value: Scalar) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float, Fraction)):
        raise DomainError(f"{name} must be int, float, or Fraction, got {type(value)!r}")
    if not value > 0:
        raise DomainError(f"{name} must be positive, got {value!r}")
    if isinstance(value, float) and not np.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class EnsembleParams:
    """Ensemble parameters (theta, alpha, M)."""

    theta: Scalar
    alpha: Scalar
    m_param: int

    def __post_init__(self) -> None:
        _check_positive_scalar("theta", self.theta)
        _check_positive_scalar("alpha", self.alpha)
        if isinstance(self.m_param, bool) or not isinstance(self.m_param, (int, np.integer)):
            raise DomainError(f"m_param must be an integer, got {type(self.m_param)!r}")
        if self.m_param < 1:
            raise DomainError(f"m_param must be >= 1, got {self.m_param}")
        object.__setattr__(self, "m_param", int(self.m_param))

    @property
    def is_exact(self) -> bool:
        """True when theta and alpha are stored as exact rationals."""
        return not (isinstance(self.theta, float) or isinstance(self.alpha, float))

    @property
    def theta_fraction(self) -> Fraction:
        if isinstance(self.theta, float):
            raise DomainError("theta was given as float; exact arithmetic unavailable")
        return Fraction(self.theta)

    @property
    def alpha_fraction(self) -> Fraction:
        if isinstance(self.alpha, float):
            raise DomainError("alpha was given as float; exact arithmetic unavailable")
        return Fraction(self.alpha)

    def row_length(self, n: int) -> int:
        return min(int(n), self.m_param)


def open_unit_row(name: str, row: Sequence[float]) -> np.ndarray:
    arr = np.asarray(row, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a nonempty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError(f"{name} must lie strictly inside (0, 1)")
    if np.any(np.diff(arr) <= 0.0):
        raise DomainError(f"{name} must be strictly increasing")
    return arr


def check_interlacing(lower: np.ndarray, upper: np.ndarray) -> None:
    """Require strict interlacing between a row and the row one level up.

    ``lower`` is the shorter-or-equal row (level n), ``upper`` the row at
    level n+1.  Pattern: upper_1 < lower_1 < upper_2 < lower_2 < ...
    """
    nl, nu = len(lower), len(upper)
    if nu < nl or nu > nl + 1:
        raise DomainError(f"row lengths {nl} and {nu} cannot interlace")
    for i in range(nl):
        if not upper[i] < lower[i]:
            raise DomainError(f"interlacing violated: upper[{i}] >= lower[{i}]")
        if i + 1 < nu and not lower[i] < upper[i + 1]:
            raise DomainError(f"interlacing violated: lower[{i}] >= upper[{i + 1}]")


@dataclass(frozen=True)
class CornersArray:
    """A full interlacing array: rows for levels 1..N, strictly interlaced.

    ``levels[n-1]`` is the row at level n, length min(n, m_param).
    """

    levels: tuple
    m_param: int

    def __post_init__(self) -> None:
        if self.m_param < 1:
            raise DomainError("m_param must be >= 1")
        if len(self.levels) == 0:
            raise DomainError("corners array needs at least one level")
        rows = []
        for idx, row in enumerate(self.levels):
            n = idx + 1
            arr = open_unit_row(f"level {n}", row)
            if len(arr) != min(n, self.m_param):
                raise DomainError(
                    f"level {n} must have {min(n, self.m_param)} entries, got {len(arr)}"
                )
            rows.append(arr)
        for idx in range(len(rows) - 1):
            check_interlacing(rows[idx], rows[idx + 1])
        object.__setattr__(self, "levels", tuple(rows))

    @property
    def big_n(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.big_n:
            raise DomainError(f"level {n} outside 1..{self.big_n}")
        return self.levels[n - 1]


_OBSERVABLE_KINDS = ("power", "elementary")


@dataclass(frozen=True)
class ObservableSpec:
    """A single-level symmetric observable: p_degree or e_degree at a level.

    With pad_ones set and level > m_param, the length-m_param row is padded
    with (level - m_param) virtual particles at 1 before the symmetric
    function is evaluated, matching the eigenvalue count of the underlying
    matrix minor.
    """

    kind: str
    degree: int
    level: int
    pad_ones: bool = True

    def __post_init__(self) -> None:
        if self.kind not in _OBSERVABLE_KINDS:
            raise DomainError(f"kind must be one of {_OBSERVABLE_KINDS}, got {self.kind!r}")
        if not isinstance(self.degree, (int, np.integer)) or self.degree < 1:
            raise DomainError(f"degree must be a positive integer, got {self.degree!r}")
        if not isinstance(self.level, (int, np.integer)) or self.level < 1:
            raise DomainError(f"level must be a positive integer, got {self.level!r}")
        object.__setattr__(self, "degree", int(self.degree))
        object.__setattr__(self, "level", int(self.level))

    def padded_length(self, m_param: int) -> int:
        base = min(self.level, m_param)
        if self.pad_ones and self.level > m_param:
            return self.level
        return base


def elementary_symmetric(values: np.ndarray, degree: int) -> float:
    """e_degree of the given values via the stable product recurrence."""
    n = len(values)
    if degree < 0 or degree > n:
        raise DomainError(f"elementary degree {degree} outside 0..{n}")
    e = np.zeros(degree + 1)
    e[0] = 1.0
    for x in values:
        for k in range(degree, 0, -1):
            e[k] += x * e[k - 1]
    return float(e[degree])


def observable_value(spec: ObservableSpec, level_vector: Sequence[float], m_param: int) -> float:
    """Evaluate one observable on a single row, honoring pad_ones.

    ``level_vector`` must have length min(spec.level, m_param).
    """
    if m_param < 1:
        raise DomainError("m_param must be >= 1")
    vec = np.asarray(level_vector, dtype=float)
    expect = min(spec.level, m_param)
    if vec.ndim != 1 or len(vec) != expect:
        raise DomainError(f"level_vector must have length {expect}, got shape {vec.shape}")
    pad = spec.level - m_param if (spec.pad_ones and spec.level > m_param) else 0
    if spec.kind == "power":
        return float(np.sum(vec ** spec.degree)) + pad
    full = np.concatenate([vec, np.ones(pad)]) if pad else vec
    if spec.degree > len(full):
        raise DomainError(
            f"elementary degree {spec.degree} exceeds padded length {len(full)}"
        )
    return elementary_symmetric(full, spec.degree)
