"""Continuous piecewise-linear functions on a closed interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Breakpoints closer than this (absolute, in r) are merged.
_MERGE_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class PiecewiseLinearCurve:
    """Breakpoints ``(r[i], d[i])`` joined by straight segments.

    ``r`` is strictly increasing. The curve is defined on ``[r[0], r[-1]]``;
    the tradeoff curves built in :mod:`dmtlab.curves` live on ``[0, min(m,n))``
    and carry their left-limit value at the right end.
    """

    r: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        d = np.asarray(self.d, dtype=float)
        if r.ndim != 1 or r.shape != d.shape or r.size < 2:
            raise ValueError("need matching 1-D breakpoint arrays with at least two points")
        if np.any(np.diff(r) <= 0):
            raise ValueError("breakpoint abscissae must be strictly increasing")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "d", d)

    @classmethod
    def constant(cls, value: float, lo: float, hi: float) -> PiecewiseLinearCurve:
        return cls(np.array([lo, hi]), np.array([value, value]))

    @classmethod
    def from_function(cls, f, points) -> PiecewiseLinearCurve:
        """Sample ``f`` at ``points`` (exact when ``f`` is linear between them)."""
        r = _merge_close(np.asarray(points, dtype=float))
        return cls(r, np.array([f(x) for x in r]))

    @property
    def lo(self) -> float:
        return float(self.r[0])

    @property
    def hi(self) -> float:
        return float(self.r[-1])

    @property
    def breakpoints(self) -> list[tuple[float, float]]:
        return [(float(a), float(b)) for a, b in zip(self.r, self.d)]

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < self.lo - _MERGE_ATOL) or np.any(x_arr > self.hi + _MERGE_ATOL):
            raise ValueError(f"evaluation outside [{self.lo}, {self.hi}]")
        out = np.interp(x_arr, self.r, self.d)
        return float(out) if out.ndim == 0 else out

    def segments(self):
        return zip(self.r[:-1], self.r[1:])

    def _align(self, other: PiecewiseLinearCurve) -> np.ndarray:
        if abs(self.lo - other.lo) > _MERGE_ATOL or abs(self.hi - other.hi) > _MERGE_ATOL:
            raise ValueError("curves live on different intervals")
        return _merge_close(np.union1d(self.r, other.r))

    def __add__(self, other):
        if isinstance(other, PiecewiseLinearCurve):
            grid = self._align(other)
            return PiecewiseLinearCurve(grid, self(grid) + other(grid))
        return PiecewiseLinearCurve(self.r, self.d + float(other))

    __radd__ = __add__

    def __mul__(self, factor):
        return PiecewiseLinearCurve(self.r, self.d * float(factor))

    __rmul__ = __mul__

    def minimum(self, other: PiecewiseLinearCurve) -> PiecewiseLinearCurve:
        """Pointwise minimum, with crossings inserted as new breakpoints."""
        grid = self._align(other)
        diff = self(grid) - other(grid)
        extra = []
        for i in range(len(grid) - 1):
            a, b = diff[i], diff[i + 1]
            if a * b < 0.0:
                extra.append(grid[i] + (grid[i + 1] - grid[i]) * a / (a - b))
        if extra:
            grid = _merge_close(np.union1d(grid, extra))
        return PiecewiseLinearCurve(grid, np.minimum(self(grid), other(grid))).simplify()

    def simplify(self, rtol: float = 1e-12) -> PiecewiseLinearCurve:
        """Drop interior breakpoints that are collinear with their neighbours."""
        keep = [0]
        scale = max(1.0, float(np.max(np.abs(self.d))))
        for i in range(1, len(self.r) - 1):
            j = keep[-1]
            r0, d0 = self.r[j], self.d[j]
            r2, d2 = self.r[i + 1], self.d[i + 1]
            predicted = d0 + (d2 - d0) * (self.r[i] - r0) / (r2 - r0)
            if abs(predicted - self.d[i]) > rtol * scale:
                keep.append(i)
        keep.append(len(self.r) - 1)
        return PiecewiseLinearCurve(self.r[keep], self.d[keep])


def _merge_close(r: np.ndarray) -> np.ndarray:
    r = np.sort(r)
    out = [r[0]]
    for x in r[1:]:
        if x - out[-1] > _MERGE_ATOL:
            out.append(x)
    if len(out) > 1 and r[-1] != out[-1]:
        # Keep the exact right end.
        out[-1] = r[-1]
    return np.array(out)
