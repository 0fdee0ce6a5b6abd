"""Coupling sweeps with a shared level policy, run in parallel with ordered results."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .approximants import DEFAULT_TOL, BandCover, band_cover
from .cantor import DegenerateFit, box_dimension, thickness
from .gaps import TrackLost, track_largest_gap
from .intervals import IntervalSet
from .sumset import Outcome, is_interval, minkowski_sum, translate_sweep

LEVEL_FRACTION = 0.1
MAX_POLICY_LEVEL = 22


class LevelPolicyError(RuntimeError):
    """No level within the allowed range meets the band-length target."""


def level_for(V: float, fraction: float = LEVEL_FRACTION, k_min: int = 1,
              k_max: int = MAX_POLICY_LEVEL, tol: float = DEFAULT_TOL) -> int:
    """Smallest level whose longest band is shorter than fraction * V."""
    if V <= 0:
        raise ValueError("the level policy needs V > 0")
    for k in range(k_min, k_max + 1):
        if band_cover(V, k, tol).max_band_length < fraction * V:
            return k
    raise LevelPolicyError(f"no level up to {k_max} has bands shorter than {fraction} * V at V={V}")


def resolve_level(V: float, policy, tol: float = DEFAULT_TOL) -> int:
    if policy is None or policy == "auto":
        return level_for(V, tol=tol)
    return int(policy)


def default_scales(cover: IntervalSet, max_band: Optional[float] = None) -> np.ndarray:
    """Dyadic box sizes H 2^-j from j = 4 down to ten longest bands (at least j = 9)."""
    lo, hi = cover.hull()
    H = hi - lo
    if max_band is None:
        max_band = cover.max_length()
    j_max = 9
    if max_band > 0:
        j_max = max(j_max, int(math.floor(math.log2(H / (10.0 * max_band)))))
    return H * 2.0 ** -np.arange(4, j_max + 1)


def run_ordered(fn: Callable, items, threads: int = 1) -> list:
    """Map fn over items (in parallel if asked); results keep the input order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class MetricsRow:
    V: float
    k: int
    n_bands: int
    max_band: float
    tau: Optional[float]
    theta: Optional[float]
    dim_lower: Optional[float]
    dim_upper: Optional[float]
    box_dim: Optional[float]
    status: str = "ok"

    COLUMNS = ("V", "k", "n_bands", "max_band", "tau", "theta", "dim_lower", "dim_upper",
               "box_dim", "status")


def metrics_row(V: float, k_policy="auto", tol: float = DEFAULT_TOL) -> MetricsRow:
    k = resolve_level(V, k_policy, tol)
    return metrics_for_cover(band_cover(V, k, tol))


def metrics_for_cover(bc: BandCover) -> MetricsRow:
    cover = bc.cover
    try:
        box = box_dimension(cover, default_scales(cover, bc.max_band_length))
    except DegenerateFit:
        box = None
    if len(cover) < 2:
        return MetricsRow(bc.V, bc.k, len(cover), bc.max_band_length, None, None, None, None,
                          box, "no-gaps")
    st = thickness(cover)
    return MetricsRow(bc.V, bc.k, len(cover), bc.max_band_length, st.tau, st.theta,
                      st.dim_lower, st.dim_upper, box)


@dataclass(frozen=True)
class GapRow:
    V: float
    k: Optional[int]
    label: str
    gap_left: Optional[float]
    gap_right: Optional[float]
    width: Optional[float]
    width_over_V: Optional[float]
    status: str = "ok"

    COLUMNS = ("V", "k", "label", "gap_left", "gap_right", "width", "width_over_V", "status")


def gap_rows(V_list, k_start: int = 6, tol: float = DEFAULT_TOL) -> list[GapRow]:
    """Largest-gap track; couplings after a lost track get a row-level status."""
    order = sorted((float(v) for v in V_list), reverse=True)
    try:
        track = track_largest_gap(order, k_start, tol)
    except TrackLost as exc:
        return [GapRow(v, None, "", None, None, None, None,
                       f"lost at V={exc.V!r}" if v <= exc.V else "lost")
                for v in order]
    lab = f"{track.label.level_opened}:{track.label.index}"
    return [GapRow(s.V, track.k, lab, s.left, s.right, s.width, s.width_over_V)
            for s in track.samples]


@dataclass(frozen=True)
class SumsetRow:
    V: float
    k: int
    sum_components: int
    is_interval: bool
    tau: Optional[float]
    tau_squared: Optional[float]
    n_intersect: int
    n_samples: int
    status: str = "ok"

    COLUMNS = ("V", "k", "sum_components", "is_interval", "tau", "tau_squared", "n_intersect",
               "n_samples", "status")


def sumset_row(V: float, k_policy="auto", tol: float = DEFAULT_TOL,
               n_samples: int = 1001) -> SumsetRow:
    k = resolve_level(V, k_policy, tol)
    cover = band_cover(V, k, tol).cover
    total = minkowski_sum(cover, cover)
    tau = thickness(cover).tau if len(cover) >= 2 else None
    samples = translate_sweep(cover, cover, n_samples)
    hits = sum(s.outcome is Outcome.INTERSECT for s in samples)
    return SumsetRow(V, k, len(total), is_interval(total), tau,
                     None if tau is None else tau * tau, hits, n_samples)
