"""Piecewise-constant profiles and exact integrals of their differences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PiecewiseConstant:
    """``values[0]`` left of ``breakpoints[0]``, ``values[i]`` on ``(breakpoints[i-1], breakpoints[i])``.

    Breakpoints are non-decreasing; ``len(values) == len(breakpoints) + 1``.
    """

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        b = tuple(float(x) for x in self.breakpoints)
        v = tuple(float(x) for x in self.values)
        if len(v) != len(b) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        if any(b2 < b1 for b1, b2 in zip(b, b[1:])):
            raise ValueError("breakpoints must be non-decreasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, value):
        return cls((), (value,))

    @classmethod
    def step(cls, left, right, at=0.0):
        return cls((at,), (left, right))

    def __call__(self, x):
        idx = np.searchsorted(np.asarray(self.breakpoints), np.asarray(x, dtype=float), side="right")
        out = np.asarray(self.values)[idx]
        return float(out) if np.ndim(out) == 0 else out

    @property
    def total_variation(self):
        return float(np.sum(np.abs(np.diff(self.values))))

    @property
    def jumps(self):
        return [(x, a, b) for x, a, b in zip(self.breakpoints, self.values, self.values[1:]) if a != b]

    def simplified(self):
        """Drop breakpoints that separate equal values."""
        keep_b, keep_v = [], [self.values[0]]
        for x, v in zip(self.breakpoints, self.values[1:]):
            if v != keep_v[-1]:
                keep_b.append(x)
                keep_v.append(v)
        return PiecewiseConstant(tuple(keep_b), tuple(keep_v))


def _segments(window, *breaks):
    lo, hi = window
    pts = [lo, hi]
    for b in breaks:
        b = np.asarray(b, dtype=float)
        pts.extend(b[(b > lo) & (b < hi)].tolist())
    pts = np.unique(pts)
    return pts[:-1], pts[1:]


def lp_distance(profile_a, profile_b, window, p=1):
    """Exact ``L^p`` distance between two piecewise-constant profiles on ``window``."""
    left, right = _segments(window, profile_a.breakpoints, profile_b.breakpoints)
    mid = 0.5 * (left + right)
    diff = np.abs(profile_a(mid) - profile_b(mid))
    return float(np.sum((right - left) * diff ** p) ** (1.0 / p))


def lp_distance_to_cells(profile, edges, cell_values, window, p=1):
    """Exact ``L^p`` distance between a profile and cell averages on ``edges`` over ``window``.

    Outside the grid the cell solution is extended by its end values.
    """
    edges = np.asarray(edges, dtype=float)
    cells = np.asarray(cell_values, dtype=float)
    left, right = _segments(window, profile.breakpoints, edges)
    mid = 0.5 * (left + right)
    idx = np.clip(np.searchsorted(edges, mid, side="right") - 1, 0, cells.size - 1)
    diff = np.abs(profile(mid) - cells[idx])
    return float(np.sum((right - left) * diff ** p) ** (1.0 / p))
