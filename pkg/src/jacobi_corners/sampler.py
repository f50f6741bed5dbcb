"""Multilevel Gibbs sampler for the Jacobi corners ensemble.

One sweep updates every coordinate of the interlacing array with a
slice-sampling step for its full conditional law.  The conditional of the
coordinate z^(n)_i keeps the factors of the joint density that contain it:

    x^{a_n} (1-x)^{b_n} prod_{j != i} |x - z^(n)_j|^{v_n}
      * prod_{j} |x - z^(n-1)_j|^{theta-1} prod_{j} |x - z^(n+1)_j|^{theta-1}

with the per-level exponents shared with the density module, restricted to
the interval allowed by interlacing.  The support is bounded, so the
shrinkage variant of slice sampling needs no stepping out; endpoint
singularities are integrable for every admissible parameter choice.

Randomness is a counter-based splitmix64 stream: draw t is a pure function
of (seed, t), so runs are reproducible bit for bit, continuation of a
stored chain state reproduces the longer run exactly, and the jitted and
interpreted kernels walk through identical states.  All kernel code is
written once and registered with numba, then driven either through an
njit entry point (default) or as plain Python (the verification twin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numba
import numpy as np
from numba.extending import register_jitable

from .densities import level_coefficients
from .errors import DomainError, NumericError
from .params import CornersArray, EnsembleParams, ObservableSpec

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_P53 = 1.0 / 9007199254740992.0
_ONE = np.uint64(1)


@register_jitable
def _u01(seed, ctr):
    """Uniform in (0, 1) as a pure function of (seed, counter)."""
    z = seed + (ctr + _ONE) * _GOLD
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (np.float64(z >> np.uint64(11)) + 0.5) * _P53


@register_jitable
def _site_bounds(flat, offsets, lengths, nlev, lev, i):
    """Open interval allowed for coordinate i of level lev by interlacing."""
    lo = 0.0
    hi = 1.0
    off = offsets[lev]
    if i > 0:
        lo = max(lo, flat[off + i - 1])
    if i < lengths[lev] - 1:
        hi = min(hi, flat[off + i + 1])
    if lev + 1 < nlev:
        up_off = offsets[lev + 1]
        up_len = lengths[lev + 1]
        lo = max(lo, flat[up_off + i])
        if i + 1 < up_len:
            hi = min(hi, flat[up_off + i + 1])
    if lev > 0:
        dn_off = offsets[lev - 1]
        dn_len = lengths[lev - 1]
        if i < dn_len:
            hi = min(hi, flat[dn_off + i])
        if 0 <= i - 1 < dn_len:
            lo = max(lo, flat[dn_off + i - 1])
    return lo, hi


@register_jitable
def _site_logpdf(flat, offsets, lengths, nlev, cx, c1m, cv, cross, lev, i, x):
    s = cx[lev] * np.log(x) + c1m[lev] * np.log1p(-x)
    off = offsets[lev]
    for j in range(lengths[lev]):
        if j != i:
            s += cv[lev] * np.log(np.abs(x - flat[off + j]))
    if lev > 0:
        dn_off = offsets[lev - 1]
        for j in range(lengths[lev - 1]):
            s += cross * np.log(np.abs(x - flat[dn_off + j]))
    if lev + 1 < nlev:
        up_off = offsets[lev + 1]
        for j in range(lengths[lev + 1]):
            s += cross * np.log(np.abs(x - flat[up_off + j]))
    return s


@register_jitable
def _slice_update(flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                  lev, i, seed, ctr, max_steps):
    x0 = flat[offsets[lev] + i]
    lo, hi = _site_bounds(flat, offsets, lengths, nlev, lev, i)
    f0 = _site_logpdf(flat, offsets, lengths, nlev, cx, c1m, cv, cross, lev, i, x0)
    height = f0 + np.log(_u01(seed, ctr))
    ctr = ctr + _ONE
    left = lo
    right = hi
    for _ in range(max_steps):
        x1 = left + _u01(seed, ctr) * (right - left)
        ctr = ctr + _ONE
        f1 = _site_logpdf(flat, offsets, lengths, nlev, cx, c1m, cv, cross, lev, i, x1)
        if np.isfinite(f1) and f1 > height and lo < x1 < hi:
            flat[offsets[lev] + i] = x1
            return 0, ctr
        if x1 < x0:
            left = x1
        else:
            right = x1
    return (lev + 1) * 1000000 + i + 1, ctr


@register_jitable
def _sweeps(flat, offsets, lengths, nlev, cx, c1m, cv, cross,
            seed, ctr, n_sweeps, max_steps):
    for _ in range(n_sweeps):
        for lev in range(nlev):
            for i in range(lengths[lev]):
                status, ctr = _slice_update(
                    flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                    lev, i, seed, ctr, max_steps,
                )
                if status != 0:
                    return status, ctr
    return 0, ctr


@numba.njit(cache=True)
def _sweeps_njit(flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                 seed, ctr, n_sweeps, max_steps):
    return _sweeps(flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                   seed, ctr, n_sweeps, max_steps)


def _sweeps_python(flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                   seed, ctr, n_sweeps, max_steps):
    """Interpreted twin of the jitted kernel; identical arithmetic."""
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return _sweeps(flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                       seed, ctr, n_sweeps, max_steps)


def _run_kernel(use_numba, flat, offsets, lengths, nlev, cx, c1m, cv, cross,
                seed, ctr, n_sweeps, max_steps):
    """Dispatch to a kernel with the RNG arguments pinned to uint64.

    The jitted kernel hands its counter back as a plain integer; feeding
    that into the next call unchanged would select an int64 signature
    whose shifts sign-extend, corrupting the stream.  All callers go
    through here so the types stay fixed.
    """
    runner = _sweeps_njit if use_numba else _sweeps_python
    status, out_ctr = runner(
        flat, offsets, lengths, nlev, cx, c1m, cv, cross,
        np.uint64(seed), np.uint64(ctr), int(n_sweeps), int(max_steps),
    )
    return int(status), int(out_ctr)


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs of the Gibbs chain; defaults suit the verification runs."""

    burn_in: int = 500
    thin: int = 1
    max_slice_steps: int = 1000
    use_numba: bool = True

    def __post_init__(self) -> None:
        if self.burn_in < 0:
            raise DomainError("burn_in must be >= 0")
        if self.thin < 1:
            raise DomainError("thin must be >= 1")
        if self.max_slice_steps < 1:
            raise DomainError("max_slice_steps must be >= 1")


@dataclass(frozen=True)
class ChainState:
    """Current array plus the position in the random stream."""

    corners: CornersArray
    counter: int
    sweeps: int


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo estimate with a batch-means standard error."""

    value: float
    stderr: float
    n_samples: int
    batches: int


@dataclass(frozen=True)
class ChainRun:
    """Collected output of a sampling run."""

    level_rows: Dict[int, np.ndarray]
    observables: np.ndarray
    final_state: ChainState


def init_corners(params: EnsembleParams, big_n: int) -> CornersArray:
    """Deterministic valid starting array: equispaced top row, midpoints below."""
    if big_n < 1:
        raise DomainError("big_n must be >= 1")
    m = params.m_param
    top_len = min(big_n, m)
    rows = [None] * big_n
    rows[big_n - 1] = np.arange(1, top_len + 1, dtype=float) / (top_len + 1)
    for n in range(big_n - 1, 0, -1):
        upper = rows[n]
        length = min(n, m)
        row = np.empty(length)
        for i in range(length):
            right = upper[i + 1] if i + 1 < len(upper) else 1.0
            row[i] = 0.5 * (upper[i] + right)
        rows[n - 1] = row
    return CornersArray(levels=tuple(rows), m_param=m)


def _flatten(corners: CornersArray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    lengths = np.array([len(row) for row in corners.levels], dtype=np.int64)
    offsets = np.zeros(len(lengths), dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)[:-1]
    flat = np.concatenate(corners.levels).astype(np.float64)
    return flat, offsets, lengths


def _unflatten(flat: np.ndarray, offsets: np.ndarray, lengths: np.ndarray,
               m_param: int) -> CornersArray:
    rows = tuple(
        flat[offsets[k]:offsets[k] + lengths[k]].copy() for k in range(len(lengths))
    )
    return CornersArray(levels=rows, m_param=m_param)


def _coefficient_arrays(params: EnsembleParams, big_n: int):
    coef = level_coefficients(params, big_n)
    cx = np.ascontiguousarray(coef["pow_x"][1:])
    c1m = np.ascontiguousarray(coef["pow_1mx"][1:])
    cv = np.ascontiguousarray(coef["vand"][1:])
    return cx, c1m, cv, float(coef["cross"])


def gibbs_sweeps(
    params: EnsembleParams,
    state: ChainState,
    n_sweeps: int,
    seed: int,
    config: Optional[SamplerConfig] = None,
) -> ChainState:
    """Advance the chain by n_sweeps full Gibbs sweeps."""
    cfg = config or SamplerConfig()
    if n_sweeps < 0:
        raise DomainError("n_sweeps must be >= 0")
    corners = state.corners
    flat, offsets, lengths = _flatten(corners)
    cx, c1m, cv, cross = _coefficient_arrays(params, corners.big_n)
    status, ctr = _run_kernel(
        cfg.use_numba, flat, offsets, lengths, corners.big_n, cx, c1m, cv, cross,
        seed, state.counter, n_sweeps, cfg.max_slice_steps,
    )
    if status != 0:
        lev = status // 1000000
        idx = status % 1000000
        raise NumericError(
            f"slice sampler exhausted max_slice_steps={cfg.max_slice_steps} "
            f"at level {lev}, coordinate {idx}"
        )
    new_corners = _unflatten(flat, offsets, lengths, corners.m_param)
    return ChainState(corners=new_corners, counter=ctr, sweeps=state.sweeps + n_sweeps)


def _batch_observable(spec: ObservableSpec, rows: np.ndarray, m_param: int) -> np.ndarray:
    """Vectorized observable over a (samples, row_length) matrix."""
    pad = spec.level - m_param if (spec.pad_ones and spec.level > m_param) else 0
    if spec.kind == "power":
        return np.sum(rows ** spec.degree, axis=1) + pad
    width = rows.shape[1] + pad
    if spec.degree > width:
        raise DomainError(
            f"elementary degree {spec.degree} exceeds padded length {width}"
        )
    e = np.zeros((rows.shape[0], spec.degree + 1))
    e[:, 0] = 1.0
    for col in range(width):
        x = rows[:, col] if col < rows.shape[1] else 1.0
        for k in range(spec.degree, 0, -1):
            e[:, k] += x * e[:, k - 1]
    return e[:, spec.degree]


def run_chain(
    params: EnsembleParams,
    big_n: int,
    num_samples: int,
    seed: int = 0,
    config: Optional[SamplerConfig] = None,
    collect_levels: Sequence[int] = (),
    specs: Sequence[ObservableSpec] = (),
) -> ChainRun:
    """Run burn-in plus num_samples thinned sweeps, collecting rows and
    observable values along the way."""
    cfg = config or SamplerConfig()
    if num_samples < 1:
        raise DomainError("num_samples must be >= 1")
    for spec in specs:
        if spec.level > big_n:
            raise DomainError(f"observable level {spec.level} exceeds big_n={big_n}")
    for lev in collect_levels:
        if not 1 <= lev <= big_n:
            raise DomainError(f"collect level {lev} outside 1..{big_n}")
    needed = sorted(set(collect_levels) | {s.level for s in specs})
    state = ChainState(corners=init_corners(params, big_n), counter=0, sweeps=0)

    flat, offsets, lengths = _flatten(state.corners)
    cx, c1m, cv, cross = _coefficient_arrays(params, big_n)
    ctr = 0

    store = {
        lev: np.empty((num_samples, int(lengths[lev - 1]))) for lev in needed
    }

    def advance(n_sweeps: int) -> None:
        nonlocal ctr
        status, ctr = _run_kernel(
            cfg.use_numba, flat, offsets, lengths, big_n, cx, c1m, cv, cross,
            seed, ctr, n_sweeps, cfg.max_slice_steps,
        )
        if status != 0:
            lev = status // 1000000
            idx = status % 1000000
            raise NumericError(
                f"slice sampler exhausted max_slice_steps={cfg.max_slice_steps} "
                f"at level {lev}, coordinate {idx}"
            )

    advance(cfg.burn_in)
    for s in range(num_samples):
        advance(cfg.thin)
        for lev in needed:
            off = offsets[lev - 1]
            store[lev][s, :] = flat[off:off + lengths[lev - 1]]

    obs = np.empty((num_samples, len(specs)))
    for j, spec in enumerate(specs):
        obs[:, j] = _batch_observable(spec, store[spec.level], params.m_param)
    final = ChainState(
        corners=_unflatten(flat, offsets, lengths, params.m_param),
        counter=int(ctr),
        sweeps=cfg.burn_in + num_samples * cfg.thin,
    )
    keep = {lev: store[lev] for lev in collect_levels}
    return ChainRun(level_rows=keep, observables=obs, final_state=final)


def batch_mean_estimate(values: np.ndarray, batches: int = 64) -> MomentEstimate:
    """Mean with a batch-means standard error (autocorrelation robust)."""
    n = len(values)
    if n < 2:
        raise DomainError("need at least 2 values")
    b = max(2, min(batches, n // 8)) if n >= 16 else 2
    usable = (n // b) * b
    means = np.asarray(values[:usable], dtype=float).reshape(b, -1).mean(axis=1)
    stderr = float(np.std(means, ddof=1) / math.sqrt(b))
    return MomentEstimate(
        value=float(np.mean(values)), stderr=stderr, n_samples=n, batches=b
    )


def estimate_observables(
    params: EnsembleParams,
    big_n: int,
    specs: Sequence[ObservableSpec],
    num_samples: int,
    seed: int = 0,
    config: Optional[SamplerConfig] = None,
) -> Tuple[ChainRun, list]:
    """Sample the chain and estimate each observable with its standard error."""
    run = run_chain(params, big_n, num_samples, seed=seed, config=config, specs=specs)
    estimates = [
        batch_mean_estimate(run.observables[:, j]) for j in range(len(specs))
    ]
    return run, estimates


def _k_statistics(x: np.ndarray, max_order: int) -> Dict[int, float]:
    n = len(x)
    out = {1: float(np.mean(x))}
    if max_order >= 2:
        d = x - np.mean(x)
        m2 = float(np.mean(d * d))
        out[2] = m2 * n / (n - 1)
    if max_order >= 3:
        m3 = float(np.mean(d**3))
        out[3] = m3 * n * n / ((n - 1) * (n - 2))
    if max_order >= 4:
        m4 = float(np.mean(d**4))
        out[4] = (
            n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2)
            / ((n - 1) * (n - 2) * (n - 3))
        )
    return out


def empirical_cumulants(
    values: np.ndarray, max_order: int = 4, batches: int = 32
) -> Dict[int, Tuple[float, float]]:
    """Unbiased cumulant estimates (k-statistics) with batch standard errors."""
    if not 1 <= max_order <= 4:
        raise DomainError("max_order must be in 1..4")
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 8 * batches:
        batches = max(2, n // 8)
    if n < 16:
        raise DomainError("need at least 16 values")
    full = _k_statistics(x, max_order)
    usable = (n // batches) * batches
    chunks = x[:usable].reshape(batches, -1)
    per_batch = {order: np.empty(batches) for order in full}
    for b in range(batches):
        kb = _k_statistics(chunks[b], max_order)
        for order, val in kb.items():
            per_batch[order][b] = val
    return {
        order: (full[order],
                float(np.std(per_batch[order], ddof=1) / math.sqrt(batches)))
        for order in full
    }


def empirical_shape(
    values: np.ndarray, batches: int = 32
) -> Dict[str, Tuple[float, float]]:
    """Skewness and excess kurtosis with batch standard errors."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 8 * batches:
        batches = max(2, n // 8)
    if n < 16:
        raise DomainError("need at least 16 values")

    def shape(sample: np.ndarray) -> Tuple[float, float]:
        k = _k_statistics(sample, 4)
        return k[3] / k[2] ** 1.5, k[4] / k[2] ** 2

    skew, kurt = shape(x)
    usable = (n // batches) * batches
    chunks = x[:usable].reshape(batches, -1)
    per = np.array([shape(chunks[b]) for b in range(batches)])
    return {
        "skewness": (skew, float(np.std(per[:, 0], ddof=1) / math.sqrt(batches))),
        "kurtosis": (kurt, float(np.std(per[:, 1], ddof=1) / math.sqrt(batches))),
    }


def empirical_support(rows: np.ndarray) -> Tuple[float, float]:
    """Smallest and largest coordinate observed in a batch of rows."""
    arr = np.asarray(rows, dtype=float)
    if arr.size == 0:
        raise DomainError("empty sample")
    return float(arr.min()), float(arr.max())
