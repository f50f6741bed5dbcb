"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from jacobi_corners.params import CornersArray, EnsembleParams


def random_corners(params: EnsembleParams, big_n: int, rng: np.random.Generator) -> CornersArray:
    """Draw a strictly interlacing array with uniform slot positions.

    Not the ensemble law; used only to get valid points of the state space.
    """
    m = params.m_param
    top = np.sort(rng.uniform(0.05, 0.95, size=min(big_n, m)))
    while np.min(np.diff(top), initial=1.0) < 1e-3:
        top = np.sort(rng.uniform(0.05, 0.95, size=min(big_n, m)))
    rows = [top]
    for k in range(big_n - 1, 0, -1):
        upper = rows[-1]
        length = min(k, m)
        lower = np.empty(length)
        for i in range(length):
            lo = upper[i]
            hi = upper[i + 1] if i + 1 < len(upper) else 1.0 - 1e-4
            lower[i] = rng.uniform(lo + 1e-5 * (hi - lo), hi - 1e-5 * (hi - lo))
        rows.append(lower)
    rows.reverse()
    return CornersArray(levels=tuple(rows), m_param=m)
