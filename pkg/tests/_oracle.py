"""Quantized brute-force reference for the two-user one-way curves.

Enumerates every channel q(t|x) whose rows live on the 1/step simplex grid
with at most three clusters, scores (I(X;T), I(T;Y)) for each, and keeps two
summaries per coordinate system:

* exact feasible maxima at requested grid abscissas, and
* an upper concave envelope of the full point cloud.

Relabeling clusters permutes all rows' columns together, so the first row can
be restricted to non-increasing order without losing any channel up to
equivalence.  The envelope is built from per-bucket extremes (bucket width
1/4096); every kept point is achievable, and any discarded point lies within
one bucket of a kept one, so the envelope is exact to ~2.5e-4.
"""

from __future__ import annotations

import numpy as np

_BUCKETS_PER_UNIT = 4096


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head, *rest)


def _nplogp(a: np.ndarray, axis) -> np.ndarray:
    safe = np.maximum(a, 1e-300)
    return np.where(a > 0, a * np.log2(safe), 0.0).sum(axis=axis)


class _Tracker:
    def __init__(self, grid):
        self.grid = [float(g) for g in grid]
        self.feasible = [-np.inf] * len(self.grid)
        size = 4 * _BUCKETS_PER_UNIT
        self._ymax = np.full(size, -np.inf)
        self._xmin = np.full(size, np.inf)

    def update(self, cons: np.ndarray, vals: np.ndarray) -> None:
        for i, g in enumerate(self.grid):
            mask = cons <= g + 1e-12
            if mask.any():
                best = float(vals[mask].max())
                if best > self.feasible[i]:
                    self.feasible[i] = best
        bi = np.minimum((cons * _BUCKETS_PER_UNIT).astype(int), len(self._ymax) - 1)
        np.maximum.at(self._ymax, bi, vals)
        vi = np.minimum((vals * _BUCKETS_PER_UNIT).astype(int), len(self._xmin) - 1)
        np.minimum.at(self._xmin, vi, cons)

    def finish(self) -> None:
        pts = [(0.0, 0.0)]
        for i, y in enumerate(self._ymax):
            if np.isfinite(y):
                pts.append(((i + 1) / _BUCKETS_PER_UNIT, float(y)))
        for j, x in enumerate(self._xmin):
            if np.isfinite(x):
                pts.append((float(x), j / _BUCKETS_PER_UNIT))
        self.envelope = _concave_majorant(pts)

    def env_value(self, x: float) -> float:
        pts = self.envelope
        x = float(x)
        if x >= pts[-1][0]:
            return pts[-1][1]
        for (x1, y1), (x2, y2) in zip(pts, pts[1:]):
            if x1 <= x <= x2:
                if x2 == x1:
                    return max(y1, y2)
                return y1 + (y2 - y1) * (x - x1) / (x2 - x1)
        return pts[0][1]

    def feas_value(self, x) -> float:
        return self.feasible[self.grid.index(float(x))]


def _concave_majorant(points):
    """Nondecreasing concave envelope vertices of a 2-D point cloud."""
    pts = sorted(set(points))
    best = -np.inf
    stairs = []
    for x, y in pts:
        if y > best:
            best = y
            stairs.append((x, y))
    hull = []
    for p in stairs:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) >= (p[0] - x1) * (y2 - y1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


class BruteForceReference:
    """Exhaustive sweep over quantized 3-cluster channels for a 3-row pmf."""

    def __init__(self, pmat, comp_grid, cons_grid, step=32):
        pmat = np.asarray(pmat, dtype=float)
        if pmat.shape[0] != 3:
            raise ValueError("reference expects exactly three input symbols")
        px = pmat.sum(axis=1)
        py = pmat.sum(axis=0)
        hy = -_nplogp(py, axis=0)

        rows = np.array(list(_compositions(step, 3)), dtype=float) / step
        nrows = len(rows)
        row_plogp = _nplogp(rows, axis=1)
        firsts = np.nonzero((np.diff(rows, axis=1) <= 0).all(axis=1))[0]
        idx2 = np.repeat(np.arange(nrows), nrows)
        idx3 = np.tile(np.arange(nrows), nrows)
        r2 = rows[idx2]
        r3 = rows[idx3]
        s2 = row_plogp[idx2]
        s3 = row_plogp[idx3]

        self.compressed = _Tracker(comp_grid)
        self.constrained = _Tracker(cons_grid)
        for f in firsts:
            r1 = rows[f]
            qt = px[0] * r1[None, :] + px[1] * r2 + px[2] * r3
            ht = -_nplogp(qt, axis=1)
            ix = px[0] * row_plogp[f] + px[1] * s2 + px[2] * s3 + ht
            pty = (r1[None, :, None] * pmat[0][None, None, :]
                   + r2[:, :, None] * pmat[1][None, None, :]
                   + r3[:, :, None] * pmat[2][None, None, :])
            hty = -_nplogp(pty, axis=(1, 2))
            iy = ht + hy - hty
            ix = np.maximum(ix, 0.0)
            iy = np.maximum(iy, 0.0)
            self.compressed.update(ix, iy)
            self.constrained.update(np.maximum(ix - iy, 0.0), iy)
        self.compressed.finish()
        self.constrained.finish()
