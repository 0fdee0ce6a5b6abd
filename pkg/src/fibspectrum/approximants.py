"""Periodic-approximant band structure from half-trace recursions.

Half-traces along the energy line obey ``x_{-1} = 1``, ``x_0 = E/2``,
``x_1 = (E - V)/2`` and ``x_{j+1} = 2 x_j x_{j-1} - x_{j-2}``; ``x_j`` is a
polynomial in E of degree ``F_j`` (1, 1, 2, 3, 5, ...).  The level-j band set
is ``sigma_j = {|x_j| <= 1}`` and the level-k cover is
``B_k = sigma_k U sigma_{k+1}``.

Band edges are found level by level.  ``sigma_j`` lies inside
``sigma_{j-1} U sigma_{j-2}``, so each level is searched only on the
previous cover, which keeps every evaluation far from overflow.  On the
search domain the sign changes of ``x_j'`` (differentiated recursion) split
the energy axis into monotone pieces; each piece carries at most one band,
whose edges are the crossings of ``x_j = -1`` and ``x_j = +1`` located by
bisection.  A level is accepted only when exactly ``F_j`` bands are found;
otherwise the grid is doubled.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .intervals import IntervalSet

OVERFLOW_GUARD = 1e300
DEFAULT_TOL = 1e-12
DEFAULT_MAX_LEVEL = 20
GRID_FACTOR = 8
MIN_POINTS_PER_COMPONENT = 9
MAX_REFINEMENTS = 12
MAX_GRID_POINTS = 1 << 23  # memory ceiling for one level's grid


class ResolutionExceeded(RuntimeError):
    """Band edges could not be separated at the requested resolution."""

    def __init__(self, message: str, level: int, found: int, expected: int):
        super().__init__(message)
        self.level = level
        self.found = found
        self.expected = expected


def fibonacci_degree(k: int) -> int:
    """Degree of x_k in E: F_0 = F_1 = 1, F_{k+1} = F_k + F_{k-1}."""
    if k < -1:
        raise ValueError("level must be >= -1")
    if k == -1:
        return 0
    a, b = 1, 1
    for _ in range(k):
        a, b = b, a + b
    return a


@dataclass
class HalfTraceSeq:
    E: float
    V: float
    values: list[float]  # x_{-1}, x_0, ..., x_k (possibly truncated)
    derivatives: Optional[list[float]] = None
    escaped: bool = False

    def x(self, j: int) -> float:
        return self.values[j + 1]


def half_traces(E: float, V: float, k: int, derivatives: bool = False) -> HalfTraceSeq:
    """x_{-1}, ..., x_k at one energy, truncated if a value passes the overflow guard."""
    if k < 1:
        raise ValueError("k must be >= 1")
    E, V = float(E), float(V)
    xs = [1.0, E / 2.0, (E - V) / 2.0]
    ds = [0.0, 0.5, 0.5]
    escaped = False
    for _ in range(k - 1):
        a, b, c = xs[-1], xs[-2], xs[-3]
        nxt = 2.0 * a * b - c
        if not math.isfinite(nxt) or abs(nxt) > OVERFLOW_GUARD:
            escaped = True
            break
        if derivatives:
            da, db, dc = ds[-1], ds[-2], ds[-3]
            ds.append(2.0 * (da * b + a * db) - dc)
        xs.append(nxt)
    return HalfTraceSeq(E, V, xs, ds if derivatives else None, escaped)


def _recurse(E: np.ndarray, V: float, k: int, derivative: bool = False):
    """Vectorized x_k(E) (and dx_k/dE) by the trace recursion."""
    z = np.ones_like(E)
    y = E / 2.0
    x = (E - V) / 2.0
    if k == -1:
        return (z, np.zeros_like(E)) if derivative else z
    if k == 0:
        return (y, np.full_like(E, 0.5)) if derivative else y
    if not derivative:
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(k - 1):
                x, y, z = 2.0 * x * y - z, x, y
        return x
    dz = np.zeros_like(E)
    dy = np.full_like(E, 0.5)
    dx = np.full_like(E, 0.5)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(k - 1):
            x, y, z, dx, dy, dz = (2.0 * x * y - z, x, y,
                                   2.0 * (dx * y + x * dy) - dz, dx, dy)
    return x, dx


def half_trace_values(E, V: float, k: int) -> np.ndarray:
    """x_k at an array of energies."""
    return _recurse(np.asarray(E, dtype=float), V, k)


def _bisect(f, lo: np.ndarray, hi: np.ndarray, f_lo_pos: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized bisection for a sign change of f on [lo, hi].

    ``f_lo_pos`` records whether f(lo) > 0; the bracket shrinks until it is
    shorter than tol or cannot be split in floating point.
    """
    lo = lo.copy()
    hi = hi.copy()
    if lo.size == 0:
        return lo
    width = float(np.max(hi - lo))
    n_iter = 0 if width <= tol else int(math.ceil(math.log2(width / tol))) + 2
    for _ in range(min(n_iter, 200)):
        mid = 0.5 * (lo + hi)
        pos = f(mid) > 0
        same = pos == f_lo_pos
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        if np.all(hi - lo <= tol):
            break
    return 0.5 * (lo + hi)


def _grid(domain: IntervalSet, n_total: int, hull: tuple[float, float],
          n_sub: int = MIN_POINTS_PER_COMPONENT) -> tuple[np.ndarray, np.ndarray]:
    """Grid on the domain components; returns points and component ids.

    Points are uniform in theta for E = c + r cos(theta) over the hull, which
    matches the band density of the free operator (bands crowd at the hull
    edges); every component also gets a uniform sub-grid.
    """
    c = 0.5 * (hull[0] + hull[1])
    r = 0.5 * (hull[1] - hull[0])
    theta = np.linspace(0.0, np.pi, n_total)
    cos_pts = np.sort(c + r * np.cos(theta))
    comp = np.searchsorted(domain.lo, cos_pts, side="right") - 1
    ok = comp >= 0
    ok[ok] = cos_pts[ok] <= domain.hi[comp[ok]]
    frac = np.linspace(0.0, 1.0, n_sub)
    sub = domain.lo[:, None] + domain.lengths()[:, None] * frac[None, :]
    sub[:, -1] = domain.hi
    sub_ids = np.repeat(np.arange(len(domain)), n_sub)
    pts = np.concatenate([cos_pts[ok], sub.ravel()])
    ids = np.concatenate([comp[ok], sub_ids])
    order = np.lexsort((pts, ids))
    pts, ids = pts[order], ids[order]
    keep = np.ones(pts.size, dtype=bool)
    keep[1:] = (pts[1:] != pts[:-1]) | (ids[1:] != ids[:-1])
    return pts[keep], ids[keep]


def _bands_on_domain(V: float, j: int, domain: IntervalSet, n_total: int, tol: float,
                     n_sub: int = MIN_POINTS_PER_COMPONENT) -> tuple[np.ndarray, np.ndarray]:
    """Bands of sigma_j inside domain using a hull grid of n_total points."""
    E, comp = _grid(domain, n_total, (-2.0, 2.0 + V), n_sub)
    x, dx = _recurse(E, V, j, derivative=True)

    same_comp = comp[1:] == comp[:-1]
    # critical points: strict sign change of the derivative inside a cell
    cell = np.flatnonzero(same_comp & (dx[:-1] * dx[1:] < 0))

    def deriv(e):
        return _recurse(e, V, j, derivative=True)[1]

    crit = _bisect(deriv, E[cell], E[cell + 1], dx[cell] > 0, tol)
    # grid points with an exactly vanishing derivative are critical too
    zero = np.flatnonzero(dx == 0)
    crit = np.concatenate([crit, E[zero]])

    # monotone pieces: component boundaries plus critical points
    comp_lo = domain.lo
    comp_hi = domain.hi
    crit_comp = np.searchsorted(comp_lo, crit, side="right") - 1
    cuts = np.concatenate([comp_lo, comp_hi, crit])
    cut_comp = np.concatenate([np.arange(len(domain)), np.arange(len(domain)), crit_comp])
    order = np.lexsort((cuts, cut_comp))
    cuts = cuts[order]
    cut_comp = cut_comp[order]
    keep = cut_comp[1:] == cut_comp[:-1]
    p0 = cuts[:-1][keep]
    p1 = cuts[1:][keep]
    nonempty = p1 > p0
    p0, p1 = p0[nonempty], p1[nonempty]
    if p0.size == 0:
        return np.empty(0), np.empty(0)

    x0 = _recurse(p0, V, j)
    x1 = _recurse(p1, V, j)
    lo_val = np.minimum(x0, x1)
    hi_val = np.maximum(x0, x1)
    has_band = (lo_val <= 1.0) & (hi_val >= -1.0)
    p0, p1, x0, x1 = p0[has_band], p1[has_band], x0[has_band], x1[has_band]
    def f(e):
        return _recurse(e, V, j)

    # On a monotone piece with a band, an end value outside [-1, 1] is
    # separated from the band by the crossing of the level it overshoots.
    left = p0.copy()
    need = np.abs(x0) > 1.0
    if np.any(need):
        target = np.sign(x0[need])
        left[need] = _bisect(lambda e, t=target: f(e) - t, p0[need], p1[need],
                             x0[need] - target > 0, tol)
    right = p1.copy()
    need = np.abs(x1) > 1.0
    if np.any(need):
        target = np.sign(x1[need])
        right[need] = _bisect(lambda e, t=target: f(e) - t, p0[need], p1[need],
                              x0[need] - target > 0, tol)
    return left, np.maximum(left, right)


def _band_level(V: float, j: int, domain: IntervalSet, tol: float) -> tuple[np.ndarray, np.ndarray]:
    expected = fibonacci_degree(j)
    n_total = GRID_FACTOR * expected + 1
    n_sub = MIN_POINTS_PER_COMPONENT
    found = 0
    for _ in range(MAX_REFINEMENTS + 1):
        if n_total + n_sub * len(domain) > MAX_GRID_POINTS:
            break
        lo, hi = _bands_on_domain(V, j, domain, n_total, tol, n_sub)
        found = lo.size
        if found == expected:
            return lo, hi
        n_total *= 2
        n_sub = 2 * n_sub - 1
    raise ResolutionExceeded(
        f"level {j}, V={V}: found {found} bands, expected {expected}", j, found, expected)


_CHAINS: dict[tuple[float, float], list[tuple[np.ndarray, np.ndarray]]] = {}
_KEY_LOCKS: dict[tuple[float, float], threading.Lock] = {}
_REGISTRY_LOCK = threading.Lock()


def _sigma_chain(V: float, kmax: int, tol: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """Raw bands (touching bands kept apart) of sigma_0 .. sigma_kmax.

    Levels are cached per (V, tol) and extended on demand; the arrays are
    read-only so callers cannot corrupt the cache.
    """
    if V < 0:
        raise ValueError("coupling must be nonnegative")
    with _REGISTRY_LOCK:
        lock = _KEY_LOCKS.setdefault((V, tol), threading.Lock())
    with lock:
        chain = _CHAINS.setdefault((V, tol), [])
        if not chain:
            chain.append(_frozen(np.array([-2.0]), np.array([2.0])))
            chain.append(_frozen(np.array([V - 2.0]), np.array([V + 2.0])))
        for j in range(len(chain), kmax + 1):
            domain = IntervalSet.from_arrays(np.concatenate([chain[j - 2][0], chain[j - 1][0]]),
                                             np.concatenate([chain[j - 2][1], chain[j - 1][1]]))
            # tiny dilation keeps bands that end exactly on a domain edge whole
            domain = domain.dilate(max(tol, 1e-14 * (1.0 + V)))
            chain.append(_frozen(*_band_level(V, j, domain, tol)))
        return chain[: kmax + 1]


def _frozen(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


def clear_cache() -> None:
    with _REGISTRY_LOCK:
        _CHAINS.clear()
        _KEY_LOCKS.clear()


def sigma_bands(V: float, k: int, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Individual bands of sigma_k (touching bands kept apart)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if not tol > 0:
        raise ValueError("tol must be positive")
    return _sigma_chain(float(V), max(k, 1), float(tol))[k]


def sigma_k(V: float, k: int, tol: float = DEFAULT_TOL) -> IntervalSet:
    return IntervalSet.from_arrays(*sigma_bands(V, k, tol))


@dataclass
class BandCover:
    k: int
    V: float
    tol: float
    cover: IntervalSet
    max_band_length: float = field(init=False)
    total_length: float = field(init=False)

    def __post_init__(self):
        self.max_band_length = self.cover.max_length()
        self.total_length = self.cover.measure()

    def to_dict(self) -> dict:
        return {"V": self.V, "k": self.k, "tol": self.tol, "bands": self.cover.to_list()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BandCover":
        return cls(int(d["k"]), float(d["V"]), float(d["tol"]), IntervalSet(d["bands"]))


def band_cover(V: float, k: int, tol: float = DEFAULT_TOL) -> BandCover:
    if k < 1:
        raise ValueError("k must be >= 1")
    chain = _sigma_chain(float(V), k + 1, float(tol))
    cover = IntervalSet.from_arrays(np.concatenate([chain[k][0], chain[k + 1][0]]),
                                    np.concatenate([chain[k][1], chain[k + 1][1]]))
    return BandCover(k, float(V), float(tol), cover)
