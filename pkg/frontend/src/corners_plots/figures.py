"""Figure construction for corners-ensemble tables.

Each figure kind consumes one or two documented tables and renders a
static PNG through the Agg canvas, bypassing pyplot state so the output
is a pure function of the input files and style options.  No quantity is
recomputed here: support edges, covariances, roots, and samples arrive
ready-made in the tables.

Kinds:
  frozen-boundary  boundary table (n_hat, l, r) -> closed support curve
  cov-agreement    agreement table -> per-pair discrepancy bars with
                   tolerance lines
  hist             samples table -> histogram of one standardized
                   coordinate with a unit Gaussian overlay
  qq               samples table -> normal quantile-quantile plot of one
                   standardized coordinate
  root-scatter     roots table, optional samples table -> crystallization
                   targets per level with sampled points behind them
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Sequence, Tuple

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure
from scipy.special import ndtri

from .io import PlotInputError, SchemaError, load_rows, numeric_column, text_column

KINDS = ("frozen-boundary", "cov-agreement", "hist", "qq", "root-scatter")

_STYLE_DEFAULTS = {
    "dpi": 150,
    "title": None,
    "bins": 40,
    "level": None,
    "index": 1,
}

_PNG_METADATA = {"Software": "corners-plots"}

_SQRT_2PI = float(np.sqrt(2.0 * np.pi))


@dataclass(frozen=True)
class FigureJob:
    """One render request: figure kind, input tables, output image, style."""

    kind: str
    inputs: Tuple[str, ...]
    out_path: str
    style: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotInputError(
                f"unknown figure kind {self.kind!r}; expected one of {', '.join(KINDS)}"
            )
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        lo, hi = (1, 2) if self.kind == "root-scatter" else (1, 1)
        if not lo <= len(self.inputs) <= hi:
            raise PlotInputError(
                f"{self.kind} takes {lo if lo == hi else f'{lo} or {hi}'} "
                f"input file(s), got {len(self.inputs)}"
            )
        if Path(self.out_path).suffix.lower() != ".png":
            raise PlotInputError(
                f"output must be a .png path, got {self.out_path!r}"
            )
        unknown = set(self.style) - set(_STYLE_DEFAULTS)
        if unknown:
            raise PlotInputError(
                f"unknown style option(s): {', '.join(sorted(unknown))}"
            )

    def option(self, name: str):
        return self.style.get(name, _STYLE_DEFAULTS[name])


# ---------------------------------------------------------------------------
# geometry helpers (exposed for tests)
# ---------------------------------------------------------------------------


def boundary_polygon(
    n_hat: np.ndarray, left: np.ndarray, right: np.ndarray
) -> np.ndarray:
    """Closed polygon tracing the support region: up the right edge, down
    the left edge, back to the start.  Rows are (x, n_hat) points."""
    order = np.argsort(n_hat)
    n_s, l_s, r_s = n_hat[order], left[order], right[order]
    xs = np.concatenate([r_s, l_s[::-1], r_s[:1]])
    ys = np.concatenate([n_s, n_s[::-1], n_s[:1]])
    return np.column_stack([xs, ys])


def qq_points(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Normal quantiles vs ordered standardized values."""
    v = np.asarray(values, dtype=float)
    if v.size < 8:
        raise SchemaError("need at least 8 values for a quantile plot")
    sd = v.std(ddof=1)
    if sd == 0:
        raise SchemaError("values are constant; cannot standardize")
    z = np.sort((v - v.mean()) / sd)
    theoretical = ndtri((np.arange(v.size) + 0.5) / v.size)
    return theoretical, z


def _standardized_coordinate(job: FigureJob, rows, path) -> Tuple[np.ndarray, str]:
    levels = numeric_column(rows, "level", path).astype(int)
    indices = numeric_column(rows, "index", path).astype(int)
    values = numeric_column(rows, "value", path)
    level = job.option("level")
    level = int(level) if level is not None else int(levels.max())
    index = int(job.option("index"))
    mask = (levels == level) & (indices == index)
    if not mask.any():
        raise SchemaError(
            f"{path} has no rows with level={level}, index={index}"
        )
    v = values[mask]
    sd = v.std(ddof=1)
    if sd == 0:
        raise SchemaError("selected coordinate is constant; cannot standardize")
    return (v - v.mean()) / sd, f"level {level}, index {index}"


# ---------------------------------------------------------------------------
# per-kind builders
# ---------------------------------------------------------------------------


def _new_axes(job: FigureJob, figsize):
    fig = Figure(figsize=figsize, dpi=int(job.option("dpi")))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot()
    return fig, ax


def _draw_frozen_boundary(job: FigureJob):
    path = job.inputs[0]
    rows = load_rows(path)
    n_hat = numeric_column(rows, "n_hat", path)
    left = numeric_column(rows, "l", path)
    right = numeric_column(rows, "r", path)
    poly = boundary_polygon(n_hat, left, right)
    fig, ax = _new_axes(job, (4.2, 4.2))
    ax.fill(poly[:, 0], poly[:, 1], color="#c7d9f0", zorder=1)
    ax.plot(poly[:, 0], poly[:, 1], color="#1f4e8c", linewidth=1.4, zorder=2)
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, float(n_hat.max()))
    ax.set_xlabel("x")
    ax.set_ylabel("level height")
    ax.set_title(job.option("title") or "support region")
    return fig


def _draw_cov_agreement(job: FigureJob):
    path = job.inputs[0]
    rows = load_rows(path)
    diffs = numeric_column(rows, "max_abs_diff", path)
    tols = numeric_column(rows, "tolerance", path)
    stats = text_column(rows, "statistic", path)
    k1 = numeric_column(rows, "k1", path).astype(int)
    k2 = numeric_column(rows, "k2", path).astype(int)
    passed = [str(v).lower() in ("true", "1") for v in text_column(rows, "passed", path)]
    floor = 1e-18
    heights = np.maximum(diffs, floor)
    pos = np.arange(len(rows))
    colors = ["#2e7d32" if ok else "#c62828" for ok in passed]
    fig, ax = _new_axes(job, (max(4.5, 0.45 * len(rows)), 3.6))
    ax.bar(pos, heights, color=colors, width=0.7, zorder=2)
    for tol in sorted(set(tols)):
        ax.axhline(tol, linestyle="--", linewidth=0.9, color="#555555", zorder=1)
    ax.set_yscale("log")
    ax.set_xticks(pos)
    ax.set_xticklabels(
        [f"{s} {a},{b}" for s, a, b in zip(stats, k1, k2)],
        rotation=60, ha="right", fontsize=7,
    )
    ax.set_ylabel("max path discrepancy")
    ax.set_title(job.option("title") or "covariance path agreement")
    return fig


def _draw_hist(job: FigureJob):
    path = job.inputs[0]
    rows = load_rows(path)
    z, label = _standardized_coordinate(job, rows, path)
    fig, ax = _new_axes(job, (4.5, 3.4))
    ax.hist(
        z, bins=int(job.option("bins")), density=True,
        color="#c7d9f0", edgecolor="#1f4e8c", linewidth=0.6,
    )
    grid = np.linspace(-4.0, 4.0, 401)
    ax.plot(
        grid, np.exp(-grid**2 / 2.0) / _SQRT_2PI, color="#c62828",
        linewidth=1.2,
    )
    ax.set_xlabel(f"standardized value ({label})")
    ax.set_ylabel("density")
    ax.set_title(job.option("title") or "standardized fluctuations")
    return fig


def _draw_qq(job: FigureJob):
    path = job.inputs[0]
    rows = load_rows(path)
    z, label = _standardized_coordinate(job, rows, path)
    theo, ordered = qq_points(z)
    fig, ax = _new_axes(job, (4.0, 4.0))
    lim = float(max(np.abs(theo).max(), np.abs(ordered).max())) * 1.05
    ax.plot([-lim, lim], [-lim, lim], color="#555555", linewidth=0.9)
    ax.plot(theo, ordered, ".", markersize=2.5, color="#1f4e8c")
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_xlabel("normal quantile")
    ax.set_ylabel(f"sample quantile ({label})")
    ax.set_title(job.option("title") or "normal quantile comparison")
    return fig


def _draw_root_scatter(job: FigureJob):
    roots_path = job.inputs[0]
    rows = load_rows(roots_path)
    levels = numeric_column(rows, "level", roots_path).astype(int)
    roots = numeric_column(rows, "root", roots_path)
    fig, ax = _new_axes(job, (4.5, 3.4))
    if len(job.inputs) == 2:
        samples_path = job.inputs[1]
        srows = load_rows(samples_path)
        s_levels = numeric_column(srows, "level", samples_path).astype(int)
        s_values = numeric_column(srows, "value", samples_path)
        ax.plot(
            s_values, s_levels, ".", markersize=2.0, color="#9e9e9e",
            alpha=0.25, zorder=1,
        )
    ax.plot(
        roots, levels, "x", markersize=7.0, color="#c62828",
        markeredgewidth=1.6, zorder=2,
    )
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.5, float(levels.max()) + 0.5)
    ax.set_yticks(sorted(set(int(v) for v in levels)))
    ax.set_xlabel("coordinate")
    ax.set_ylabel("level")
    ax.set_title(job.option("title") or "crystallization targets")
    return fig


_BUILDERS = {
    "frozen-boundary": _draw_frozen_boundary,
    "cov-agreement": _draw_cov_agreement,
    "hist": _draw_hist,
    "qq": _draw_qq,
    "root-scatter": _draw_root_scatter,
}


def render(job: FigureJob) -> Path:
    """Render the job to its PNG path and return the path written."""
    fig = _BUILDERS[job.kind](job)
    out = Path(job.out_path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="png", metadata=dict(_PNG_METADATA))
    return out
