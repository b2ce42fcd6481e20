#!/usr/bin/env python3
"""
Contours - Carnot Lab
Vectorized marching squares on a parameter grid with one secant refinement per crossing.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

GRID_SIZE = 256

# saddle cells: which edge pairs to join, indexed by whether the centre agrees with corner 00
_SADDLE_PAIRS = {True: ((0, 1), (2, 3)), False: ((0, 3), (1, 2))}


def _refine(points: np.ndarray, fa: np.ndarray, fb: np.ndarray, pa: np.ndarray, pb: np.ndarray,
            value: Callable[[np.ndarray], np.ndarray], level: float) -> np.ndarray:
    """One secant step from the interpolated crossing towards the bracketing endpoint"""
    if len(points) == 0:
        return points
    fp = np.asarray(value(points), dtype=float) - level
    use_b = (fp >= 0) != (fb >= 0)
    q = np.where(use_b[:, None], pb, pa)
    fq = np.where(use_b, fb, fa)
    denom = fq - fp
    safe = np.where(np.abs(denom) > 0, denom, 1.0)
    step = np.where((np.abs(denom) > 0)[:, None], (fp / safe)[:, None] * (q - points), 0.0)
    return points - step


def level_segments(values: np.ndarray, xs: np.ndarray, ys: np.ndarray, level: float,
                   value: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """Segments (K, 2, 2) of the level set {f = level} from grid samples values[i, j] = f(xs[i], ys[j])"""
    v = np.asarray(values, dtype=float) - level
    nx, ny = v.shape[0] - 1, v.shape[1] - 1
    sign = v >= 0

    # crossings on edges along x: between (i, j) and (i+1, j)
    hx = sign[:-1, :] != sign[1:, :]
    # crossings on edges along y: between (i, j) and (i, j+1)
    vy = sign[:, :-1] != sign[:, 1:]

    hpts = np.zeros((nx, ny + 1, 2))
    vpts = np.zeros((nx + 1, ny, 2))
    gx, gy = np.meshgrid(xs, ys, indexing="ij")

    if hx.any():
        i, j = np.nonzero(hx)
        fa, fb = v[i, j], v[i + 1, j]
        t = fa / (fa - fb)
        pa = np.stack([gx[i, j], gy[i, j]], axis=1)
        pb = np.stack([gx[i + 1, j], gy[i + 1, j]], axis=1)
        pts = pa + t[:, None] * (pb - pa)
        if value is not None:
            pts = _refine(pts, fa, fb, pa, pb, value, level)
        hpts[i, j] = pts
    if vy.any():
        i, j = np.nonzero(vy)
        fa, fb = v[i, j], v[i, j + 1]
        t = fa / (fa - fb)
        pa = np.stack([gx[i, j], gy[i, j]], axis=1)
        pb = np.stack([gx[i, j + 1], gy[i, j + 1]], axis=1)
        pts = pa + t[:, None] * (pb - pa)
        if value is not None:
            pts = _refine(pts, fa, fb, pa, pb, value, level)
        vpts[i, j] = pts

    # cell edges in the order bottom, right, top, left
    flags = np.stack([hx[:, :-1], vy[1:, :], hx[:, 1:], vy[:-1, :]], axis=-1)
    edge_pts = np.stack([hpts[:, :-1], vpts[1:, :], hpts[:, 1:], vpts[:-1, :]], axis=2)
    count = flags.sum(axis=-1)

    segments = []
    two = np.nonzero(count == 2)
    if len(two[0]):
        f = flags[two]
        first = np.argmax(f, axis=1)
        second = 3 - np.argmax(f[:, ::-1], axis=1)
        p = edge_pts[two]
        rows = np.arange(len(first))
        segments.append(np.stack([p[rows, first], p[rows, second]], axis=1))

    four = np.nonzero(count == 4)
    if len(four[0]):
        i, j = four
        centre = 0.25 * (v[i, j] + v[i + 1, j] + v[i + 1, j + 1] + v[i, j + 1])
        agrees = (centre >= 0) == sign[i, j]
        p = edge_pts[four]
        for flag in (True, False):
            rows = np.nonzero(agrees == flag)[0]
            for a, b in _SADDLE_PAIRS[flag]:
                segments.append(np.stack([p[rows, a], p[rows, b]], axis=1))

    if not segments:
        return np.zeros((0, 2, 2))
    return np.concatenate(segments, axis=0)


def grid_axes(lo: Sequence[float], hi: Sequence[float], size: int = GRID_SIZE):
    return np.linspace(lo[0], hi[0], size + 1), np.linspace(lo[1], hi[1], size + 1)


def sample_grid(fn: Callable[[np.ndarray], np.ndarray], xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    return np.asarray(fn(pts), dtype=float).reshape(gx.shape)
