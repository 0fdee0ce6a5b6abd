"""Finite unions of disjoint closed intervals.

Every band cover, spectral approximant and Cantor-set presentation in the
package is an :class:`IntervalSet`.  Endpoints live in two sorted float64
arrays; all set operations are sweeps over endpoints and never introduce
arithmetic on them (no rounding), except :meth:`IntervalSet.dilate`.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def _merge(lo: np.ndarray, hi: np.ndarray, slack: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Sort and merge intervals whose distance is <= slack (touching merges at 0)."""
    if lo.size == 0:
        return np.empty(0), np.empty(0)
    order = np.lexsort((hi, lo))
    lo = lo[order]
    hi = hi[order]
    run_hi = np.maximum.accumulate(hi)
    # a new component starts where the left end exceeds everything seen so far
    starts = np.empty(lo.size, dtype=bool)
    starts[0] = True
    starts[1:] = lo[1:] > run_hi[:-1] + slack
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:] - 1, lo.size - 1)
    return lo[idx].copy(), run_hi[ends].copy()


class IntervalSet:
    """Sorted, disjoint closed intervals ``[lo[i], hi[i]]`` with ``hi[i] < lo[i+1]``."""

    __slots__ = ("lo", "hi")

    def __init__(self, intervals: Iterable[Sequence[float]] = (), *, _normalized=None):
        if _normalized is not None:
            self.lo, self.hi = _normalized
            return
        arr = np.asarray(list(intervals), dtype=float).reshape(-1, 2)
        if np.any(~np.isfinite(arr)):
            raise ValueError("interval endpoints must be finite")
        if np.any(arr[:, 0] > arr[:, 1]):
            raise ValueError("interval with left end > right end")
        self.lo, self.hi = _merge(arr[:, 0], arr[:, 1])

    @classmethod
    def from_arrays(cls, lo, hi, slack: float = 0.0) -> "IntervalSet":
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if lo.shape != hi.shape:
            raise ValueError("lo and hi must have the same length")
        if np.any(lo > hi):
            raise ValueError("interval with left end > right end")
        return cls(_normalized=_merge(lo, hi, slack))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(_normalized=(np.empty(0), np.empty(0)))

    # -- basic views -------------------------------------------------------

    def __len__(self) -> int:
        return int(self.lo.size)

    def __iter__(self):
        return zip(self.lo.tolist(), self.hi.tolist())

    def __repr__(self) -> str:
        if len(self) > 6:
            head = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in list(self)[:3])
            return f"IntervalSet({len(self)} intervals: {head}, ...)"
        return "IntervalSet([" + ", ".join(f"[{a!r}, {b!r}]" for a, b in self) + "])"

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return bool(np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi))

    def to_list(self) -> list[list[float]]:
        return [[a, b] for a, b in self]

    @property
    def is_empty(self) -> bool:
        return self.lo.size == 0

    def hull(self) -> tuple[float, float]:
        if self.is_empty:
            raise ValueError("hull of an empty set")
        return float(self.lo[0]), float(self.hi[-1])

    def lengths(self) -> np.ndarray:
        return self.hi - self.lo

    def measure(self) -> float:
        return float(np.sum(self.hi - self.lo))

    def max_length(self) -> float:
        return float(np.max(self.hi - self.lo)) if len(self) else 0.0

    def gaps(self) -> "IntervalSet":
        """Bounded components of hull minus the set, as closures ``[b_i, a_{i+1}]``."""
        return IntervalSet(_normalized=(self.hi[:-1].copy(), self.lo[1:].copy()))

    # -- membership --------------------------------------------------------

    def contains_points(self, x, tol: float = 0.0) -> np.ndarray:
        """Vectorized test ``dist(x, self) <= tol``."""
        x = np.asarray(x, dtype=float)
        if self.is_empty:
            return np.zeros(x.shape, dtype=bool)
        if tol > 0:
            return self.distance(x) <= tol
        i = np.searchsorted(self.lo, x, side="right") - 1
        inside = np.zeros(x.shape, dtype=bool)
        ok = i >= 0
        inside[ok] = x[ok] <= self.hi[i[ok]]
        return inside

    def distance(self, x) -> np.ndarray:
        """Distance from each point of x to the set."""
        x = np.asarray(x, dtype=float)
        if self.is_empty:
            raise ValueError("distance to an empty set")
        i = np.searchsorted(self.lo, x, side="right") - 1
        left = np.clip(i, 0, len(self) - 1)
        right = np.clip(i + 1, 0, len(self) - 1)
        d_left = np.where(x > self.hi[left], x - self.hi[left], 0.0)
        d_left = np.where(x < self.lo[left], self.lo[left] - x, d_left)
        d_right = np.abs(self.lo[right] - x)
        d_right = np.where((x >= self.lo[right]) & (x <= self.hi[right]), 0.0, d_right)
        return np.minimum(d_left, d_right)

    # -- set algebra -------------------------------------------------------

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet.from_arrays(np.concatenate([self.lo, other.lo]),
                                       np.concatenate([self.hi, other.hi]))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        los, his = [], []
        i = j = 0
        a_lo, a_hi, b_lo, b_hi = self.lo, self.hi, other.lo, other.hi
        while i < a_lo.size and j < b_lo.size:
            lo = max(a_lo[i], b_lo[j])
            hi = min(a_hi[i], b_hi[j])
            if lo <= hi:
                los.append(lo)
                his.append(hi)
            if a_hi[i] < b_hi[j]:
                i += 1
            else:
                j += 1
        return IntervalSet.from_arrays(los, his)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        """Closure of ``self \\ other``; zero-length leftovers are dropped."""
        los, his = [], []
        j = 0
        for a, b in self:
            cur = a
            while j < len(other) and other.hi[j] < cur:
                j += 1
            k = j
            while k < len(other) and other.lo[k] <= b:
                if other.lo[k] > cur:
                    los.append(cur)
                    his.append(float(other.lo[k]))
                cur = max(cur, float(other.hi[k]))
                k += 1
            if cur < b:
                los.append(cur)
                his.append(b)
        return IntervalSet.from_arrays(los, his)

    def issubset(self, other: "IntervalSet", tol: float = 0.0) -> bool:
        """True if every interval of self lies inside one interval of other dilated by tol."""
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        j = np.searchsorted(other.lo, self.lo + tol, side="right") - 1
        if np.any(j < 0):
            return False
        return bool(np.all((self.lo >= other.lo[j] - tol) & (self.hi <= other.hi[j] + tol)))

    def dilate(self, r: float) -> "IntervalSet":
        if r < 0:
            raise ValueError("dilation radius must be nonnegative")
        return IntervalSet.from_arrays(self.lo - r, self.hi + r)

    def merge_within(self, slack: float) -> "IntervalSet":
        """Merge components separated by gaps of length <= slack."""
        return IntervalSet.from_arrays(self.lo, self.hi, slack=slack)

    def affine(self, a: float, b: float = 0.0) -> "IntervalSet":
        """Image under ``E -> a*E + b``."""
        if a == 0:
            raise ValueError("affine map must be invertible")
        lo, hi = a * self.lo + b, a * self.hi + b
        if a < 0:
            lo, hi = hi[::-1], lo[::-1]
        return IntervalSet.from_arrays(lo, hi)

    def hausdorff(self, other: "IntervalSet") -> float:
        """Hausdorff distance between two nonempty closed sets.

        For unions of intervals the farthest point from the other set is an
        endpoint or the midpoint of a gap of the other set that falls inside
        self, so checking those candidates is exact.
        """
        return max(_directed_hausdorff(self, other), _directed_hausdorff(other, self))


def _directed_hausdorff(a: IntervalSet, b: IntervalSet) -> float:
    if a.is_empty or b.is_empty:
        raise ValueError("Hausdorff distance needs nonempty sets")
    cand = [a.lo, a.hi]
    if len(b) > 1:
        mids = 0.5 * (b.hi[:-1] + b.lo[1:])
        cand.append(mids[a.contains_points(mids)])
    pts = np.concatenate(cand)
    return float(np.max(b.distance(pts)))


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def intersection(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.intersection(b)


def difference(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.difference(b)


def contains(outer: IntervalSet, inner: IntervalSet, tol: float = 0.0) -> bool:
    return inner.issubset(outer, tol)


def hausdorff(a: IntervalSet, b: IntervalSet) -> float:
    return a.hausdorff(b)
