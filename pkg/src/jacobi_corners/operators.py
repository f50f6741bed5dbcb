"""Exact finite-size moments through shift-operator chains.

The joint elementary-symmetric moments of the ensemble are values of
difference operators applied to a product of gamma-ratio functions.  With
Phi(y) = prod_{i=1}^{N1} H(y_i), H(y) = Gamma(-y + t*a) / Gamma(-y + t*a + M*t)
(t = theta, a = alpha), and the degree-k operator at level N

    D_N^k = sum_{|I|=k, I subset {1..N}} prod_{i in I, j in {1..N}\\I}
            (y_i - y_j - t)/(y_i - y_j) * prod_{i in I} (y_i -> y_i - 1),

one has, for levels N_1 >= N_2 >= ... >= N_m and the base point
y_i0 = t*(1 - i):

    E prod_j e_{k_j}(N_j) = [D^{k_m}_{N_m} ... D^{k_1}_{N_1} Phi](y0) / Phi(y0),

where e_k(N) is the k-th elementary symmetric function of the level-N row
padded with ones up to length N.  Only the ratio h(y) = H(y-1)/H(y)
= (y - t*a)/(y - t*a - M*t) ever enters the evaluation.

Degenerate denominators (possible whenever theta*(j - i) is a small
integer, e.g. theta = 1/2 or 1) are removable singularities of the total
sum; they are resolved by shifting the base point along the direction
u_i = i^2 / N1^2 with a small parameter eps, either exactly (truncated
Laurent series over Fraction, exact mode) or numerically (high-precision
evaluation at eps = 2^-j, j = 10..20, followed by Neville extrapolation
to eps = 0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath

from .errors import DomainError, NumericError
from .laurent import EpsSeries, WindowExhausted
from .params import EnsembleParams, ObservableSpec

MAX_DEGREE = 6
MAX_CHAIN_LEN = 4
MAX_EXACT_LEVEL = 12
MAX_PE_DEGREE = 12

_RICHARDSON_JS = tuple(range(10, 21))


@dataclass(frozen=True)
class OperatorChain:
    """A product of level observables E prod_j e_{degree_j}(level_j).

    Entries are (level, degree) pairs; levels must be nonincreasing and
    1 <= degree <= level.  At most MAX_CHAIN_LEN entries, degrees at most
    MAX_DEGREE.
    """

    entries: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        entries = tuple((int(n), int(k)) for n, k in self.entries)
        if not entries:
            raise DomainError("operator chain must be nonempty")
        if len(entries) > MAX_CHAIN_LEN:
            raise DomainError(
                f"chain length {len(entries)} exceeds the supported maximum "
                f"{MAX_CHAIN_LEN}"
            )
        for n, k in entries:
            if n < 1:
                raise DomainError(f"level must be >= 1, got {n}")
            if not 1 <= k <= n:
                raise DomainError(f"degree must satisfy 1 <= k <= level, got k={k}, level={n}")
            if k > MAX_DEGREE:
                raise DomainError(
                    f"degree {k} exceeds the supported maximum {MAX_DEGREE}"
                )
        levels = [n for n, _ in entries]
        if any(levels[i] < levels[i + 1] for i in range(len(levels) - 1)):
            raise DomainError("levels must be nonincreasing along the chain")
        object.__setattr__(self, "entries", entries)

    @property
    def top_level(self) -> int:
        return self.entries[0][0]

    @property
    def total_degree(self) -> int:
        return sum(k for _, k in self.entries)


@dataclass(frozen=True)
class ExactScalar:
    """A moment value together with how it was obtained.

    ``value`` is a Fraction when ``exact`` is True, otherwise a float.
    ``mode`` records the evaluation path ("exact", "exact-laurent", "mpf",
    "mpf-richardson", "float64").
    """

    value: Union[Fraction, float]
    exact: bool
    mode: str

    @property
    def as_float(self) -> float:
        return float(self.value)


def h_ratio(params: EnsembleParams, y: float) -> float:
    """The one-step gamma ratio h(y) = H(y-1)/H(y) = (y - t*a)/(y - t*a - M*t)."""
    t = float(params.theta)
    a = float(params.alpha)
    m = params.m_param
    den = y - t * a - m * t
    if den == 0.0:
        raise DomainError(f"h_ratio pole: y = theta*alpha + m_param*theta = {y}")
    return (y - t * a) / den


# ---------------------------------------------------------------------------
# chain evaluation over a generic scalar field
# ---------------------------------------------------------------------------


class _Field:
    """Adapter bundling the arithmetic used by the recursion."""

    def __init__(self, theta, alpha, m, n1, one, from_int, eps_dir=None, window=None):
        self.theta = theta
        self.alpha = alpha
        self.m = m
        self.n1 = n1
        self.one = one
        self.from_int = from_int
        self.window = window
        # base point y0_i = theta*(1-i), optionally shifted by eps*u_i
        self.base = []
        for i in range(1, n1 + 1):
            c0 = theta * from_int(1 - i)
            if eps_dir is None:
                self.base.append(c0)
            else:
                self.base.append(EpsSeries.linear(c0, eps_dir[i - 1]))
        self.is_series = eps_dir is not None
        ta = theta * alpha
        tm = theta * from_int(m)
        self.h_num_shift = ta          # h numerator: y - theta*alpha
        self.h_den_shift = ta + tm     # h denominator: y - theta*alpha - m*theta

    def y_at(self, i: int, shift: int):
        """Value of variable i (1-based) after an integer downward shift."""
        if self.is_series:
            return self.base[i - 1] - EpsSeries.const(self.from_int(shift))
        return self.base[i - 1] - self.from_int(shift)

    def h_of(self, yval):
        if self.is_series:
            num = yval - EpsSeries.const(self.h_num_shift)
            den = yval - EpsSeries.const(self.h_den_shift)
            return num * den.inverse_linear(self.window)
        num = yval - self.h_num_shift
        den = yval - self.h_den_shift
        return num / den

    def divide(self, num, den):
        if self.is_series:
            return num * den.inverse_linear(self.window)
        return num / den


def _b_subset_direct(field: _Field, yv: list, subset: Tuple[int, ...], n: int):
    """B_I from its definition; indices in yv are 0-based, subset 1-based."""
    theta = field.theta
    out = field.one
    inside = set(subset)
    th = EpsSeries.const(theta) if field.is_series else theta
    for i in subset:
        yi = yv[i - 1]
        for j in range(1, n + 1):
            if j in inside:
                continue
            diff = yi - yv[j - 1]
            out = field.divide(out * (diff - th), diff)
    return out


def _b_coefficients(field: _Field, yv: list, n: int, k: int):
    """All (subset, B_I) pairs for D_n^k at the current point.

    Scalar modes use the singles-with-pair-corrections factorization; if a
    within-level difference vanishes exactly, falls back to the direct
    definition per subset (finite unless the pole is genuine, in which case
    ZeroDivisionError propagates to trigger the eps path).
    """
    subsets = list(itertools.combinations(range(1, n + 1), k))
    if field.is_series:
        return [(I, _b_subset_direct(field, yv, I, n)) for I in subsets]
    theta = field.theta
    try:
        diffs = [[None] * (n + 1) for _ in range(n + 1)]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    d = yv[i - 1] - yv[j - 1]
                    if d == 0:
                        raise ZeroDivisionError
                    diffs[i][j] = d
        singles = [None] * (n + 1)
        for i in range(1, n + 1):
            acc = field.one
            for j in range(1, n + 1):
                if j != i:
                    acc = acc * (diffs[i][j] - theta) / diffs[i][j]
            singles[i] = acc
        out = []
        for I in subsets:
            b = field.one
            for i in I:
                b = b * singles[i]
            for a, c in itertools.combinations(I, 2):
                num = diffs[a][c] * diffs[c][a]
                den = (diffs[a][c] - theta) * (diffs[c][a] - theta)
                b = b * num / den
            out.append((I, b))
        return out
    except ZeroDivisionError:
        # a within-subset factor degenerated (0/0 in the factorized form);
        # the direct definition stays finite unless the pole is genuine
        return [(I, _b_subset_direct(field, yv, I, n)) for I in subsets]


def _eval_chain(field: _Field, ops: Sequence[Tuple[int, int]]):
    """Apply the operator chain; ops sorted by level descending.

    ops[t-1] is the t-th operator in application order (t = 1 innermost,
    acting on the largest level); recursion runs outermost-first.
    """
    memo: Dict[Tuple[int, Tuple[int, ...]], object] = {}
    m_ops = len(ops)

    def base_value(shift: Tuple[int, ...]):
        out = field.one
        for i in range(1, field.n1 + 1):
            for r in range(shift[i - 1]):
                out = out * field.h_of(field.y_at(i, r))
        return out

    def rec(t: int, shift: Tuple[int, ...]):
        if t == 0:
            return base_value(shift)
        key = (t, shift)
        hit = memo.get(key)
        if hit is not None:
            return hit
        n, k = ops[t - 1]
        yv = [field.y_at(i, shift[i - 1]) for i in range(1, n + 1)]
        total = None
        for subset, b in _b_coefficients(field, yv, n, k):
            child = list(shift)
            for i in subset:
                child[i - 1] += 1
            term = b * rec(t - 1, tuple(child))
            total = term if total is None else total + term
        memo[key] = total
        return total

    return rec(m_ops, tuple([0] * field.n1))


def _pole_risk(theta: float, n1: int, total_degree: int) -> bool:
    """Can theta*(j-i) equal a reachable integer shift difference?"""
    for d in range(1, n1):
        t = round(theta * d)
        if t != 0 and abs(t) <= total_degree and abs(theta * d - t) < 1e-9:
            return True
    return False


def _mpf_richardson(chain_entries, theta_f, alpha_f, m, n1, prec: int):
    """Evaluate with an eps-shifted base at eps = 2^-j and extrapolate."""
    with mpmath.workprec(prec):
        values = []
        nodes = []
        u = [mpmath.mpf(i * i) / (n1 * n1) for i in range(1, n1 + 1)]
        t_mp = mpmath.mpf(theta_f.numerator) / theta_f.denominator
        a_mp = mpmath.mpf(alpha_f.numerator) / alpha_f.denominator
        for j in _RICHARDSON_JS:
            eps = mpmath.mpf(1) / (1 << j)
            field = _Field(
                theta=t_mp, alpha=a_mp, m=m, n1=n1,
                one=mpmath.mpf(1), from_int=mpmath.mpf,
            )
            field.base = [t_mp * (1 - i) + eps * u[i - 1] for i in range(1, n1 + 1)]
            values.append(_eval_chain(field, chain_entries))
            nodes.append(eps)
        # Neville polynomial extrapolation to eps = 0
        tab = list(values)
        for level in range(1, len(tab)):
            for i in range(len(tab) - level):
                x0, x1 = nodes[i], nodes[i + level]
                tab[i] = (x0 * tab[i + 1] - x1 * tab[i]) / (x0 - x1)
        return tab[0]


def _chain_value(
    params: EnsembleParams,
    raw_entries: Sequence[Tuple[int, int]],
    mode: str,
    precision: int,
    _direction: Optional[Sequence[Fraction]] = None,
) -> ExactScalar:
    entries = tuple(sorted(raw_entries, key=lambda e: -e[0]))
    n1 = entries[0][0]
    total_degree = sum(k for _, k in entries)
    m = params.m_param

    if mode == "auto":
        mode = "exact" if (params.is_exact and n1 <= MAX_EXACT_LEVEL) else "float"

    if mode == "exact":
        if not params.is_exact:
            raise DomainError("exact mode needs rational theta and alpha")
        theta_f = params.theta_fraction
        alpha_f = params.alpha_fraction
        try:
            field = _Field(
                theta=theta_f, alpha=alpha_f, m=m, n1=n1,
                one=Fraction(1), from_int=Fraction,
            )
            value = _eval_chain(field, entries)
            return ExactScalar(value=value, exact=True, mode="exact")
        except ZeroDivisionError:
            pass
        direction = _direction
        if direction is None:
            direction = [Fraction(i * i, n1 * n1) for i in range(1, n1 + 1)]
        for window in (16, 64):
            try:
                field = _Field(
                    theta=theta_f, alpha=alpha_f, m=m, n1=n1,
                    one=EpsSeries.const(Fraction(1)), from_int=Fraction,
                    eps_dir=list(direction), window=window,
                )
                series = _eval_chain(field, entries)
                value = series.value_at_zero()
                return ExactScalar(value=value, exact=True, mode="exact-laurent")
            except WindowExhausted:
                continue
        raise NumericError("Laurent window exhausted at size 64")

    if mode == "float":
        theta_f = float(params.theta)
        alpha_f = float(params.alpha)
        risky = _pole_risk(theta_f, n1, total_degree)
        if not risky and precision <= 53:
            field = _Field(
                theta=theta_f, alpha=alpha_f, m=m, n1=n1, one=1.0, from_int=float
            )
            value = _eval_chain(field, entries)
            return ExactScalar(value=value, exact=False, mode="float64")
        prec = max(precision, 192)
        if risky:
            # snap to the nearby pole-causing rational; the moment is
            # analytic in theta, so this moves the value by O(snap error)
            theta_q = (
                params.theta_fraction if params.is_exact
                else Fraction(theta_f).limit_denominator(10**9)
            )
            alpha_q = (
                params.alpha_fraction if params.is_exact else Fraction(alpha_f)
            )
            value = _mpf_richardson(entries, theta_q, alpha_q, m, n1, prec)
            return ExactScalar(value=float(value), exact=False, mode="mpf-richardson")
        with mpmath.workprec(prec):
            field = _Field(
                theta=mpmath.mpf(theta_f), alpha=mpmath.mpf(alpha_f), m=m, n1=n1,
                one=mpmath.mpf(1), from_int=mpmath.mpf,
            )
            value = _eval_chain(field, entries)
            return ExactScalar(value=float(value), exact=False, mode="mpf")

    raise DomainError(f"unknown mode {mode!r}; use 'auto', 'exact', or 'float'")


def apply_operator_chain(
    params: EnsembleParams,
    chain: OperatorChain,
    mode: str = "auto",
    precision: int = 256,
) -> ExactScalar:
    """E prod_j e_{degree_j}(level_j) for the given chain.

    mode "auto" picks exact rational arithmetic when theta and alpha are
    rational and the top level is at most MAX_EXACT_LEVEL, otherwise
    floating point at the given binary precision (<= 53 bits runs in
    machine arithmetic when no denominator degeneracy is possible).
    """
    return _chain_value(params, chain.entries, mode, precision)


# ---------------------------------------------------------------------------
# power sums through Newton's identity
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _pe_table(k: int) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    if k == 1:
        return (((1,), 1),)
    # p_k = (-1)^(k-1) k e_k + sum_{i<k} (-1)^(k-1-i) e_{k-i} p_i
    acc: Dict[Tuple[int, ...], int] = {(k,): (-1) ** (k - 1) * k}
    for i in range(1, k):
        sign = (-1) ** (k - 1 - i)
        for part, coef in _pe_table(i):
            merged = tuple(sorted(part + (k - i,), reverse=True))
            acc[merged] = acc.get(merged, 0) + sign * coef
    return tuple(sorted((p, c) for p, c in acc.items() if c != 0))


def pe_coefficients(k: int) -> Dict[Tuple[int, ...], int]:
    """Expansion of the power sum p_k in elementary symmetric monomials.

    Returns {partition: integer coefficient} with partitions sorted
    descending, so that p_k = sum coeff * prod_j e_{partition_j}.
    """
    if not isinstance(k, int) or not 1 <= k <= MAX_PE_DEGREE:
        raise DomainError(f"degree must be an integer in 1..{MAX_PE_DEGREE}, got {k!r}")
    return dict(_pe_table(k))


def _validate_specs(specs: Sequence[ObservableSpec], kind: str) -> List[ObservableSpec]:
    if not specs:
        raise DomainError("at least one observable is required")
    if len(specs) > MAX_CHAIN_LEN:
        raise DomainError(f"at most {MAX_CHAIN_LEN} observables per query")
    out = []
    for spec in specs:
        if spec.kind != kind:
            raise DomainError(f"expected kind {kind!r}, got {spec.kind!r}")
        if spec.degree > MAX_DEGREE:
            raise DomainError(f"degree {spec.degree} exceeds {MAX_DEGREE}")
        if not spec.pad_ones:
            raise DomainError("the moment engine computes padded observables only")
        out.append(spec)
    return sorted(out, key=lambda s: -s.level)


def expectation_e(
    params: EnsembleParams,
    specs: Sequence[ObservableSpec],
    mode: str = "auto",
    precision: int = 256,
) -> ExactScalar:
    """E prod_j e_{degree_j}(level_j), padded elementary observables."""
    ordered = _validate_specs(specs, "elementary")
    for spec in ordered:
        if spec.degree > spec.level:
            raise DomainError(
                f"elementary degree {spec.degree} exceeds level {spec.level}"
            )
    chain = OperatorChain(entries=tuple((s.level, s.degree) for s in ordered))
    return _chain_value(params, chain.entries, mode, precision)


def _zero_like(params: EnsembleParams, mode: str) -> ExactScalar:
    if mode == "exact" or (mode == "auto" and params.is_exact):
        return ExactScalar(value=Fraction(0), exact=True, mode="exact")
    return ExactScalar(value=0.0, exact=False, mode="float64")


def expectation_p(
    params: EnsembleParams,
    specs: Sequence[ObservableSpec],
    mode: str = "auto",
    precision: int = 256,
) -> ExactScalar:
    """E prod_j p_{degree_j}(level_j), padded power-sum observables.

    Each power sum is expanded in elementary monomials; elementary factors
    of degree above their level vanish identically and are dropped.
    """
    ordered = _validate_specs(specs, "power")
    tables = [pe_coefficients(s.degree) for s in ordered]
    exactness = []
    total = None
    for combo in itertools.product(*(t.items() for t in tables)):
        coef = 1
        entries: List[Tuple[int, int]] = []
        skip = False
        for spec, (partition, c) in zip(ordered, combo):
            coef *= c
            for part in partition:
                if part > spec.level:
                    skip = True
                    break
                entries.append((spec.level, part))
            if skip:
                break
        if skip:
            continue
        entries.sort(key=lambda e: -e[0])
        term = _chain_value(params, tuple(entries), mode, precision)
        exactness.append(term)
        contrib = coef * term.value
        total = contrib if total is None else total + contrib
    if total is None:
        return _zero_like(params, mode)
    all_exact = all(t.exact for t in exactness)
    modes = {t.mode for t in exactness}
    mode_out = modes.pop() if len(modes) == 1 else "mixed"
    if not all_exact:
        total = float(total)
    return ExactScalar(value=total, exact=all_exact, mode=mode_out)


def covariance_p(
    params: EnsembleParams,
    a: ObservableSpec,
    b: ObservableSpec,
    mode: str = "auto",
    precision: int = 256,
) -> ExactScalar:
    """Cov(p_{a.degree}(a.level), p_{b.degree}(b.level)).

    Requires a.level >= b.level (reorder the arguments otherwise).
    """
    if a.level < b.level:
        raise DomainError("covariance_p needs a.level >= b.level")
    joint = expectation_p(params, [a, b], mode, precision)
    ea = expectation_p(params, [a], mode, precision)
    eb = expectation_p(params, [b], mode, precision)
    exact = joint.exact and ea.exact and eb.exact
    value = joint.value - ea.value * eb.value
    if not exact:
        value = float(value)
    mode_out = joint.mode if joint.mode == ea.mode == eb.mode else "mixed"
    return ExactScalar(value=value, exact=exact, mode=mode_out)


def covariance_e(
    params: EnsembleParams,
    a: ObservableSpec,
    b: ObservableSpec,
    mode: str = "auto",
    precision: int = 256,
) -> ExactScalar:
    """Cov(e_{a.degree}(a.level), e_{b.degree}(b.level)).

    Requires a.level >= b.level (reorder the arguments otherwise).
    """
    if a.level < b.level:
        raise DomainError("covariance_e needs a.level >= b.level")
    joint = expectation_e(params, [a, b], mode, precision)
    ea = expectation_e(params, [a], mode, precision)
    eb = expectation_e(params, [b], mode, precision)
    exact = joint.exact and ea.exact and eb.exact
    value = joint.value - ea.value * eb.value
    if not exact:
        value = float(value)
    mode_out = joint.mode if joint.mode == ea.mode == eb.mode else "mixed"
    return ExactScalar(value=value, exact=exact, mode=mode_out)
