"""Gap/bridge statistics and dimension estimates for finite Cantor-set covers.

A cover is a finite union of closed intervals; its gaps are the bounded
components of the complement in the convex hull.  For a presentation (an
ordering of the gaps) every gap endpoint u gets a bridge: the component of
the hull, minus the gaps up to and including the gap at u, that touches u.
The ratio bridge/gap over all endpoints gives thickness (inf) and
denseness (sup) for that presentation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .intervals import IntervalSet

PRESENTATION = "decreasing-length"
LOG2 = math.log(2.0)


class EmptyInput(ValueError):
    """The cover has fewer than two components, so there are no gaps."""


class DomainError(ValueError):
    pass


class DegenerateFit(ValueError):
    pass


@dataclass(frozen=True)
class GapBridgeRecord:
    gap: tuple[float, float]
    side: str  # "left" or "right" endpoint of the gap
    bridge: tuple[float, float]
    ratio: float


@dataclass
class CantorStats:
    tau: float
    theta: float
    dim_lower: float
    dim_upper: float
    gap_lo: np.ndarray = field(repr=False)
    gap_hi: np.ndarray = field(repr=False)
    left_bridge: np.ndarray = field(repr=False)   # left end of the bridge at each gap's left endpoint
    right_bridge: np.ndarray = field(repr=False)  # right end of the bridge at each gap's right endpoint
    presentation: str = PRESENTATION
    # theta under one fixed presentation bounds the inf over presentations from above
    theta_is_upper_estimate: bool = True

    @property
    def records(self) -> list[GapBridgeRecord]:
        out = []
        for a, b, lb, rb in zip(self.gap_lo.tolist(), self.gap_hi.tolist(),
                                self.left_bridge.tolist(), self.right_bridge.tolist()):
            g = b - a
            out.append(GapBridgeRecord((a, b), "left", (lb, a), (a - lb) / g))
            out.append(GapBridgeRecord((a, b), "right", (b, rb), (rb - b) / g))
        return out

    def ratios(self) -> np.ndarray:
        g = self.gap_hi - self.gap_lo
        return np.concatenate([(self.gap_lo - self.left_bridge) / g,
                               (self.right_bridge - self.gap_hi) / g])

    def to_dict(self) -> dict:
        return {"tau": self.tau, "theta": self.theta, "dim_lower": self.dim_lower,
                "dim_upper": self.dim_upper, "presentation": self.presentation,
                "theta_is_upper_estimate": self.theta_is_upper_estimate,
                "n_gaps": int(self.gap_lo.size)}


def gaps_of(cover: IntervalSet) -> IntervalSet:
    """Gaps of the cover, left to right, stored as their closures."""
    if len(cover) < 2:
        raise EmptyInput("a cover with fewer than two intervals has no gaps")
    return cover.gaps()


def _previous_at_least(lengths: np.ndarray) -> np.ndarray:
    """Index of the nearest gap to the left with length >= own length, or -1."""
    out = np.full(lengths.size, -1)
    stack: list[int] = []
    for i, g in enumerate(lengths.tolist()):
        while stack and lengths[stack[-1]] < g:
            stack.pop()
        out[i] = stack[-1] if stack else -1
        stack.append(i)
    return out


def _next_greater(lengths: np.ndarray) -> np.ndarray:
    """Index of the nearest gap to the right with strictly larger length, or -1."""
    out = np.full(lengths.size, -1)
    stack: list[int] = []
    for i in range(lengths.size - 1, -1, -1):
        g = lengths[i]
        while stack and lengths[stack[-1]] <= g:
            stack.pop()
        out[i] = stack[-1] if stack else -1
        stack.append(i)
    return out


def dimension_bounds(tau: float, theta: float) -> tuple[float, float]:
    """Lower and upper Hausdorff-dimension bounds log 2 / log(2 + 1/t)."""
    if not tau > 0:
        raise DomainError("thickness must be positive")
    if theta < tau:
        raise DomainError("denseness must be >= thickness")
    lower = LOG2 / math.log(2.0 + 1.0 / tau) if math.isfinite(tau) else 1.0
    upper = LOG2 / math.log(2.0 + 1.0 / theta) if math.isfinite(theta) else 1.0
    return lower, upper


def thickness(cover: IntervalSet) -> CantorStats:
    """Bridge/gap ratios under the decreasing-length presentation.

    Ties among equal gaps go left to right.  Under this ordering the gaps
    earlier than gap i are exactly the longer ones plus equal ones to its
    left, so each bridge ends at the nearest such gap, found with a
    monotone stack in linear time.
    """
    gaps = gaps_of(cover)
    glo, ghi = gaps.lo, gaps.hi
    lengths = ghi - glo
    hull_lo, hull_hi = cover.hull()
    prev = _previous_at_least(lengths)
    nxt = _next_greater(lengths)
    left_bridge = np.where(prev >= 0, ghi[np.maximum(prev, 0)], hull_lo)
    right_bridge = np.where(nxt >= 0, glo[np.maximum(nxt, 0)], hull_hi)
    ratios = np.concatenate([(glo - left_bridge) / lengths, (right_bridge - ghi) / lengths])
    tau = float(np.min(ratios))
    theta = float(np.max(ratios))
    dim_lower, dim_upper = dimension_bounds(tau, theta)
    return CantorStats(tau, theta, dim_lower, dim_upper, glo.copy(), ghi.copy(),
                       left_bridge, right_bridge)


def presentation_ratios(cover: IntervalSet, order) -> np.ndarray:
    """All bridge/gap ratios for an explicit presentation (gap indices, first removed first)."""
    gaps = gaps_of(cover)
    glo, ghi = gaps.lo, gaps.hi
    hull_lo, hull_hi = cover.hull()
    removed: list[int] = []
    out = []
    for i in order:
        left = max([ghi[j] for j in removed if j < i], default=hull_lo)
        right = min([glo[j] for j in removed if j > i], default=hull_hi)
        g = ghi[i] - glo[i]
        out.append((glo[i] - left) / g)
        out.append((right - ghi[i]) / g)
        removed.append(i)
    return np.array(out)


def brute_force_thickness(cover: IntervalSet, max_gaps: int = 6) -> tuple[float, float]:
    """(sup inf, inf sup) of bridge/gap ratios over every presentation."""
    n = len(cover) - 1
    if n < 1:
        raise EmptyInput("no gaps")
    if n > max_gaps:
        raise ValueError(f"brute force limited to {max_gaps} gaps, got {n}")
    tau, theta = -math.inf, math.inf
    for perm in itertools.permutations(range(n)):
        r = presentation_ratios(cover, perm)
        tau = max(tau, float(r.min()))
        theta = min(theta, float(r.max()))
    return tau, theta


def box_counts(cover: IntervalSet, eps: float) -> int:
    """Number of boxes [h + m*eps, h + (m+1)*eps) meeting the cover, h = hull left end."""
    if cover.is_empty:
        return 0
    h = cover.lo[0]
    snap = 1e-9
    first = np.floor((cover.lo - h) / eps + snap).astype(np.int64)
    last = np.maximum(np.ceil((cover.hi - h) / eps - snap).astype(np.int64) - 1, first)
    # boxes shared by consecutive intervals are counted once
    overlap = np.maximum(0, last[:-1] - first[1:] + 1)
    return int(np.sum(last - first + 1) - np.sum(overlap))


def box_dimension(cover: IntervalSet, scales) -> float:
    """Least-squares slope of log N(eps) against log(1/eps)."""
    scales = np.asarray(scales, dtype=float)
    if scales.size < 2 or np.unique(scales).size < 2:
        raise DegenerateFit("need at least two distinct scales")
    if np.any(scales <= 0):
        raise ValueError("scales must be positive")
    counts = np.array([box_counts(cover, e) for e in scales], dtype=float)
    if np.all(counts == counts[0]):
        if cover.measure() == 0.0:
            return 0.0  # finitely many points
        raise DegenerateFit("all box counts are equal; scales do not resolve the set")
    x = np.log(1.0 / scales)
    y = np.log(counts)
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)


def cover_metrics(cover: IntervalSet, scales=None) -> dict:
    """Thickness statistics plus box dimension in the documented JSON layout."""
    stats = thickness(cover)
    out = stats.to_dict()
    if scales is not None:
        out["box_dim"] = box_dimension(cover, scales)
    return out


def metrics_json(V: float, k: int, stats: CantorStats, box_dim: float | None) -> str:
    d = {"V": V, "k": k, "tau": stats.tau, "theta": stats.theta,
         "dim_lower": stats.dim_lower, "dim_upper": stats.dim_upper,
         "box_dim": box_dim, "presentation": stats.presentation}
    return json.dumps(d)
