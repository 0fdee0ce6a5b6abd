"""Combinatorial gap labels and gap-opening tracks across a coupling sweep.

A gap of the cover ``B_k`` is labeled by the lowest level ``m`` at which
some gap of ``B_m`` already sits inside it, together with that ancestor's
left-to-right position among the gaps of ``B_m``.  Covers are nested, so a
gap of ``B_m`` stays inside a gap of every finer cover and the label is
stable under refinement.  These labels are a bookkeeping device; they are
not the canonical gap labels of the integrated density of states.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .approximants import DEFAULT_TOL, BandCover, band_cover
from .intervals import IntervalSet

MAX_STEP_RATIO = 0.5


class TrackLost(RuntimeError):
    def __init__(self, message: str, V: float):
        super().__init__(message)
        self.V = V


@dataclass(frozen=True, order=True)
class GapLabel:
    level_opened: int
    index: int


@dataclass(frozen=True)
class GapSample:
    V: float
    left: float
    right: float

    @property
    def width(self) -> float:
        return self.right - self.left

    @property
    def width_over_V(self) -> float:
        return self.width / self.V


@dataclass
class GapTrack:
    label: GapLabel
    k: int
    samples: list[GapSample] = field(default_factory=list)

    def ratios(self) -> np.ndarray:
        return np.array([s.width_over_V for s in self.samples])

    def edge_speed(self) -> float:
        """Largest |edge movement| / |Delta V| between consecutive samples."""
        best = 0.0
        for s, t in zip(self.samples, self.samples[1:]):
            dv = abs(s.V - t.V)
            best = max(best, abs(s.left - t.left) / dv, abs(s.right - t.right) / dv)
        return best

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["V", "gap_left", "gap_right", "width", "width_over_V"])
        for s in self.samples:
            w.writerow([f"{s.V:.17g}", f"{s.left:.17g}", f"{s.right:.17g}",
                        f"{s.width:.17g}", f"{s.width_over_V:.17g}"])
        return buf.getvalue()


def _containing_gap(gaps: IntervalSet, points: np.ndarray) -> np.ndarray:
    """Index of the gap whose open interior holds each point, or -1."""
    i = np.searchsorted(gaps.lo, points, side="right") - 1
    ok = (i >= 0)
    ok[ok] = points[ok] < gaps.hi[i[ok]]
    ok &= points > gaps.lo[np.maximum(i, 0)]
    return np.where(ok, i, -1)


def label_gaps(cover: BandCover) -> list[tuple[GapLabel, tuple[float, float]]]:
    """Label every gap of the cover; gaps come left to right."""
    if len(cover.cover) < 2:
        return []
    gaps = cover.cover.gaps()
    labels = [None] * len(gaps)
    for m in range(1, cover.k + 1):
        coarse = cover.cover if m == cover.k else band_cover(cover.V, m, cover.tol).cover
        if len(coarse) < 2:
            continue
        cg = coarse.gaps()
        mids = 0.5 * (cg.lo + cg.hi)
        owner = _containing_gap(gaps, mids)
        for j, o in enumerate(owner.tolist()):
            if o >= 0 and labels[o] is None:
                labels[o] = GapLabel(m, j)
    return [(lab, (float(a), float(b))) for lab, (a, b) in zip(labels, gaps)]


def largest_gap_label(cover: BandCover) -> GapLabel:
    labeled = label_gaps(cover)
    if not labeled:
        raise TrackLost("cover has no gaps", cover.V)
    widths = [b - a for _, (a, b) in labeled]
    return labeled[int(np.argmax(widths))][0]


def _continuation_points(V_list: list[float]) -> list[float]:
    """Requested couplings with geometric substeps so that each step has dV/V <= 0.5."""
    pts = [V_list[0]]
    for a, b in zip(V_list, V_list[1:]):
        n = max(1, math.ceil(math.log(a / b) / math.log(1.0 / (1.0 - MAX_STEP_RATIO)) - 1e-12))
        for i in range(1, n + 1):
            pts.append(b if i == n else a * (b / a) ** (i / n))
    return pts


def track_gap(label: GapLabel, V_list, k: int, tol: float = DEFAULT_TOL) -> GapTrack:
    """Follow one labeled gap down a decreasing list of couplings at fixed level k.

    The gap is matched between consecutive couplings by interval overlap.
    Finer gaps overlapping the old interval are screened out by a scaling
    guard: gap widths scale like V, so candidates narrower than half the
    width predicted from the previous sample are ignored.  Substeps are
    inserted where a requested step would exceed dV/V = 0.5.
    """
    V_list = [float(v) for v in V_list]
    if any(v <= 0 for v in V_list):
        raise ValueError("couplings must be positive")
    if any(b >= a for a, b in zip(V_list, V_list[1:])):
        raise ValueError("couplings must be strictly decreasing")
    first = band_cover(V_list[0], k, tol)
    current = None
    for lab, iv in label_gaps(first):
        if lab == label:
            current = iv
            break
    if current is None:
        raise TrackLost(f"label {label} not present at V={V_list[0]}", V_list[0])
    track = GapTrack(label, k, [GapSample(V_list[0], *current)])
    wanted = set(V_list)
    prev_V = V_list[0]
    for V in _continuation_points(V_list)[1:]:
        gaps = band_cover(V, k, tol).cover.gaps()
        expected = (current[1] - current[0]) * V / prev_V
        hits = np.flatnonzero((gaps.lo < current[1]) & (gaps.hi > current[0])
                              & (gaps.lengths() >= 0.5 * expected))
        if hits.size != 1:
            raise TrackLost(f"{hits.size} matching gaps at V={V}", V)
        current = (float(gaps.lo[hits[0]]), float(gaps.hi[hits[0]]))
        prev_V = V
        if V in wanted:
            track.samples.append(GapSample(V, *current))
    return track


def level_for_gap(V: float, width: float, fraction: float = 0.1, k_min: int = 4,
                  k_max: int = 22, tol: float = DEFAULT_TOL) -> int:
    """Smallest level whose longest band is below fraction * width."""
    for k in range(k_min, k_max + 1):
        if band_cover(V, k, tol).max_band_length < fraction * width:
            return k
    raise ValueError(f"no level up to {k_max} resolves width {width} at V={V}")


def track_largest_gap(V_list, k_start: int = 6, tol: float = DEFAULT_TOL) -> GapTrack:
    """Track the widest gap at the largest coupling, at a level that resolves it.

    The level is raised until the longest band at the largest coupling is
    below a tenth of that gap's width.
    """
    V_max = max(V_list)
    cover = band_cover(V_max, k_start, tol)
    label = largest_gap_label(cover)
    width = max(b - a for _, (a, b) in label_gaps(cover))
    # labels survive refinement, so the label found at k_start is valid at k
    k = max(k_start, level_for_gap(V_max, width, tol=tol))
    return track_gap(label, sorted(V_list, reverse=True), k, tol)
