"""Sum sets of interval unions and the Newhouse gap-lemma test.

``B_k (+) B_k`` contains the true sum set, so a gap-free cover sum is only a
surrogate.  The stronger evidence is the gap-lemma route: if the two
thicknesses multiply to more than 1 and ``A`` and ``t - B`` are linked (neither
sits in a gap of the other), they intersect, i.e. ``t`` is a sum ``a + b``.
Both are produced side by side.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .cantor import thickness
from .intervals import IntervalSet

PAIR_GUARD = 10**8
_CHUNK_PAIRS = 2_000_000
DEFAULT_T_SAMPLES = 1001


class TooLarge(ValueError):
    pass


class Outcome(str, Enum):
    INTERSECT = "Intersect"
    C1_IN_GAP_OF_C2 = "C1InGapOfC2"
    C2_IN_GAP_OF_C1 = "C2InGapOfC1"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class GapLemmaVerdict:
    outcome: Outcome
    tau1: float
    tau2: float
    product: float
    note: str = ""

    def to_dict(self) -> dict:
        return {"outcome": self.outcome.value, "tau1": self.tau1, "tau2": self.tau2,
                "product": self.product, "note": self.note}


def minkowski_sum(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """``{x + y : x in a, y in b}`` as a normalized interval set."""
    if a.is_empty or b.is_empty:
        return IntervalSet.empty()
    pairs = len(a) * len(b)
    if pairs > PAIR_GUARD:
        raise TooLarge(f"{pairs} interval pairs exceed the guard {PAIR_GUARD}")
    # iterate over the shorter list so each chunk is a block of full rows
    if len(b) > len(a):
        a, b = b, a
    rows = max(1, _CHUNK_PAIRS // len(b))
    parts_lo, parts_hi = [], []
    for start in range(0, len(a), rows):
        lo = (a.lo[start:start + rows, None] + b.lo[None, :]).ravel()
        hi = (a.hi[start:start + rows, None] + b.hi[None, :]).ravel()
        part = IntervalSet.from_arrays(lo, hi)
        parts_lo.append(part.lo)
        parts_hi.append(part.hi)
    return IntervalSet.from_arrays(np.concatenate(parts_lo), np.concatenate(parts_hi))


def default_merge_tol(a: IntervalSet) -> float:
    if a.is_empty:
        return 0.0
    lo, hi = a.hull()
    return 1e-9 * (hi - lo)


def is_interval(a: IntervalSet, tol: Optional[float] = None) -> bool:
    """One component after merging gaps no longer than tol (default 1e-9 * hull length)."""
    if a.is_empty:
        return False
    if tol is None:
        tol = default_merge_tol(a)
    return len(a.merge_within(tol)) == 1


def in_gap_of(inner: IntervalSet, outer: IntervalSet) -> bool:
    """True if the hull of inner misses outer entirely: it fits in one bounded gap
    of outer or lies beyond one end of outer's hull."""
    lo, hi = inner.hull()
    o_lo, o_hi = outer.hull()
    if hi < o_lo or lo > o_hi:
        return True
    i = int(np.searchsorted(outer.hi, lo, side="left"))
    # outer.hi[i-1] < lo; the gap (outer.hi[i-1], outer.lo[i]) holds inner if hi < outer.lo[i]
    return 0 < i < len(outer) and lo > outer.hi[i - 1] and hi < outer.lo[i]


def gap_lemma_check(a: IntervalSet, b: IntervalSet, tau1: Optional[float] = None,
                    tau2: Optional[float] = None) -> GapLemmaVerdict:
    """Apply the gap-lemma trichotomy to two finite covers.

    Precomputed thicknesses may be passed in to save work in sweeps.
    """
    if len(a) < 2 or len(b) < 2:
        return GapLemmaVerdict(Outcome.INCONCLUSIVE, float("nan"), float("nan"), float("nan"),
                               "a set with fewer than two components has no thickness")
    if tau1 is None:
        tau1 = thickness(a).tau
    if tau2 is None:
        tau2 = thickness(b).tau
    product = tau1 * tau2
    if in_gap_of(a, b):
        return GapLemmaVerdict(Outcome.C1_IN_GAP_OF_C2, tau1, tau2, product)
    if in_gap_of(b, a):
        return GapLemmaVerdict(Outcome.C2_IN_GAP_OF_C1, tau1, tau2, product)
    if product > 1.0:
        return GapLemmaVerdict(Outcome.INTERSECT, tau1, tau2, product)
    return GapLemmaVerdict(Outcome.INCONCLUSIVE, tau1, tau2, product,
                           "thickness product does not exceed 1")


def intersects(a: IntervalSet, b: IntervalSet) -> bool:
    return not a.intersection(b).is_empty


@dataclass(frozen=True)
class TranslateSample:
    t: float
    outcome: Outcome
    direct_intersect: bool


def translate_sweep(a: IntervalSet, b: IntervalSet,
                    n: int = DEFAULT_T_SAMPLES) -> list[TranslateSample]:
    """Gap-lemma verdicts for ``a`` against ``t - b`` at n interior points t.

    t runs over ``lo + (i + 1) * (hi - lo) / (n + 1)``, i = 0..n-1, with
    ``[lo, hi] = hull(a) + hull(b)``.  An Intersect verdict at t means t is a
    sum of a point of a and a point of b.
    """
    a_lo, a_hi = a.hull()
    b_lo, b_hi = b.hull()
    lo, hi = a_lo + b_lo, a_hi + b_hi
    tau_a = thickness(a).tau if len(a) >= 2 else None
    tau_b = thickness(b).tau if len(b) >= 2 else None
    out = []
    for i in range(n):
        t = lo + (i + 1) * (hi - lo) / (n + 1)
        moved = b.affine(-1.0, t)
        v = gap_lemma_check(a, moved, tau_a, tau_b)
        out.append(TranslateSample(t, v.outcome, intersects(a, moved)))
    return out


def sweep_csv(samples: list[TranslateSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "verdict", "direct_intersect"])
    for s in samples:
        w.writerow([f"{s.t:.17g}", s.outcome.value, int(s.direct_intersect)])
    return buf.getvalue()
