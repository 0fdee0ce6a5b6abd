"""Acceptance criteria 1-12, each at its stated tolerance.

Every check prints one ``criterion N: PASS|FAIL  <evidence>`` line.  Run with
``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from fibspectrum.approximants import DEFAULT_TOL, band_cover, clear_cache
from fibspectrum.cantor import box_dimension, thickness
from fibspectrum.gaps import track_largest_gap
from fibspectrum.intervals import IntervalSet
from fibspectrum.oracle import chain_eigenvalues, fibonacci_word, potential
from fibspectrum.sumset import Outcome, is_interval, minkowski_sum, translate_sweep
from fibspectrum.sweeps import default_scales, level_for
from fibspectrum.trace import TraceState, classify_orbit, invariant, per2_points, trace_step

SWEEP_V = (0.4, 0.2, 0.1, 0.05)
_sweep_cache = {}


def _sweep():
    """Thickness sweep shared by criteria 5 and 6 (level: longest band < V/10)."""
    if not _sweep_cache:
        t0 = time.perf_counter()
        rows = []
        for V in SWEEP_V:
            k = level_for(V)
            st = thickness(band_cover(V, k).cover)
            rows.append((V, k, st.tau, st.dim_lower))
        _sweep_cache["rows"] = rows
        _sweep_cache["seconds"] = time.perf_counter() - t0
    return _sweep_cache["rows"], _sweep_cache["seconds"]


def criterion_1():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst, steps = 0.0, 0
    for s0 in rng.uniform(-2, 2, (1000, 3)):
        s = TraceState(*s0)
        for _ in range(50):
            if max(abs(s.x), abs(s.y), abs(s.z)) > 1e6:
                break
            t = trace_step(s)
            # drift relative to the magnitude of the terms summed in I
            scale = 1 + t.x * t.x + t.y * t.y + t.z * t.z + 2 * abs(t.x * t.y * t.z)
            worst = max(worst, abs(invariant(t) - invariant(s)) / scale)
            s = t
            steps += 1
    dt = time.perf_counter() - t0
    return worst <= 1e-9 and dt < 1.0, f"max relative drift {worst:.2e} over {steps} steps, {dt:.2f}s"


def criterion_2():
    clear_cache()
    t0 = time.perf_counter()
    cover = band_cover(0.0, 18).cover
    dt = time.perf_counter() - t0
    h = cover.hausdorff(IntervalSet([(-2.0, 2.0)]))
    return h <= 1e-9 and dt < 10, f"Hausdorff {h:.2e}, {len(cover)} component(s), {dt:.2f}s"


def criterion_3():
    clear_cache()
    t0 = time.perf_counter()
    V, tol = 1.0, DEFAULT_TOL
    cover = band_cover(V, 18, tol).cover
    grid = np.linspace(-4.0, 4.0, 10001)
    bounded = np.array([classify_orbit(E, V, 60).bounded for E in grid])
    member = cover.contains_points(grid)
    edges = np.concatenate([cover.lo, cover.hi])
    near_edge = np.min(np.abs(grid[:, None] - edges[None, :]), axis=1) <= 2 * tol
    bad = (bounded != member) & ~near_edge
    dt = time.perf_counter() - t0
    n_bad = int(bad.sum())
    late = int(np.sum(bad & member & ~bounded))
    return n_bad == 0 and dt < 30, (f"{n_bad} disagreements ({late} in B_18 but escaping after "
                                    f"step 18), {dt:.2f}s")


def criterion_4():
    clear_cache()
    t0 = time.perf_counter()
    ok, parts = True, []
    for V in (0.5, 1.0, 4.0):
        eig = chain_eigenvalues(potential(V, 0.0, 610), "dirichlet").eigenvalues
        cover = band_cover(V, 14).cover
        dist = cover.distance(eig)
        first = np.searchsorted(eig, cover.lo, side="left")
        hit = first < eig.size
        hit[hit] = eig[first[hit]] <= cover.hi[hit]
        n_far, n_empty = int(np.sum(dist > 0.02)), int(np.sum(~hit))
        ok &= n_far == 0 and n_empty == 0
        parts.append(f"V={V}: max dist {dist.max():.3f}, {n_far} eig > 0.02, "
                     f"{n_empty}/{len(cover)} bands empty")
    dt = time.perf_counter() - t0
    return ok and dt < 60, "; ".join(parts) + f"; {dt:.2f}s"


def criterion_5():
    rows, dt = _sweep()
    tau = [r[2] for r in rows]
    halvings = [b / a for a, b in zip(tau, tau[1:])]
    ok = all(b > a for a, b in zip(tau, tau[1:])) and all(1.4 <= h <= 2.9 for h in halvings)
    detail = ", ".join(f"V={r[0]} k={r[1]} tau={r[2]:.3f}" for r in rows)
    return ok and dt < 300, f"{detail}; ratios {[round(h, 3) for h in halvings]}; {dt:.2f}s"


def criterion_6():
    rows, _ = _sweep()
    dim = [r[3] for r in rows]
    scaled = [(1 - d) / r[0] for d, r in zip(dim, rows)]
    ok = (all(b > a for a, b in zip(dim, dim[1:])) and dim[-1] >= 0.8
          and max(scaled) / min(scaled) <= 3)
    return ok, (f"dim_lower {[round(d, 4) for d in dim]}; (1-dim)/V "
                f"{[round(s, 3) for s in scaled]}")


def criterion_7():
    track = track_largest_gap([0.2, 0.1, 0.05, 0.025])
    r = track.ratios()
    var = np.abs(np.diff(r)) / r[:-1]
    ok = bool(np.all(r > 0) and np.all(var < 0.15))
    return ok, (f"label {track.label.level_opened}:{track.label.index} at k={track.k}; "
                f"|U|/V {[round(float(x), 4) for x in r]}; max step change {var.max():.3f}")


def criterion_8():
    ok, parts = True, []
    for V in (0.05, 0.1, 0.2, 0.3):
        k = level_for(V)
        cover = band_cover(V, k).cover
        interval = is_interval(minkowski_sum(cover, cover))
        tau = thickness(cover).tau
        hits = sum(s.outcome is Outcome.INTERSECT for s in translate_sweep(cover, cover, 1001))
        ok &= interval and tau * tau > 1 and hits == 1001
        parts.append(f"V={V} k={k}: interval={interval} tau^2={tau * tau:.1f} Intersect {hits}/1001")
    strong = band_cover(16.0, 16).cover
    interval16 = is_interval(minkowski_sum(strong, strong))
    ok &= not interval16
    parts.append(f"V=16 k=16: interval={interval16}")
    return ok, "; ".join(parts)


def criterion_9():
    bc = band_cover(16.0, 16)
    scales = default_scales(bc.cover, bc.max_band_length)
    d = box_dimension(bc.cover, scales)
    value = d * math.log(16.0)
    return 0.62 <= value <= 1.15, (f"box dim {d:.4f} over {scales.size} dyadic scales; "
                                   f"x log16 = {value:.4f} (target 0.8814)")


def criterion_10():
    level = 8
    lo = np.array([0], dtype=np.int64)
    size = 3 ** level
    for _ in range(level):
        size //= 3
        lo = (lo[:, None] + np.array([0, 2 * size])[None, :]).ravel()
    integer = IntervalSet.from_arrays(lo.astype(float), (lo + size).astype(float))
    dyadic = integer.affine(2.0 ** -13)  # exact: [0, 3^8 / 2^13]
    unit = integer.affine(1.0 / 3 ** level)
    target = math.log(2) / math.log(3)
    s_int, s_dy, s_unit = thickness(integer), thickness(dyadic), thickness(unit)
    exact = all(s.tau == 1.0 and s.theta == 1.0 for s in (s_int, s_dy))
    close = abs(s_unit.tau - 1) <= 1e-12 and abs(s_unit.theta - 1) <= 1e-12
    dims = all(abs(x - target) <= 1e-12 for s in (s_int, s_dy, s_unit)
               for x in (s.dim_lower, s.dim_upper))
    return exact and close and dims, (f"exact tau=theta=1: {exact}; [0,1] tau={s_unit.tau!r} "
                                      f"theta={s_unit.theta!r}; dims {s_int.dim_lower:.15f}")


def criterion_11():
    ratios = [per2_points(V).separation / V for V in (0.1, 0.05, 0.025)]
    spread = max(ratios) / min(ratios) - 1
    return spread <= 0.10, f"separation/V {[round(r, 6) for r in ratios]}; spread {spread:.2e}"


def criterion_12():
    ok, parts = True, []
    for N in (13, 21, 34):
        word = [1 if c == "a" else 0 for c in fibonacci_word(N)]
        match = potential(1.0, 0.0, N).pattern() == word
        ok &= match
        parts.append(f"N={N}: {'match' if match else 'MISMATCH'}")
    return ok, ", ".join(parts)


CRITERIA = [(i, globals()[f"criterion_{i}"]) for i in range(1, 13)]


def _line(n, ok, detail):
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("n, check", CRITERIA, ids=[f"criterion_{n}" for n, _ in CRITERIA])
def test_acceptance(n, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for n, check in CRITERIA:
        ok, detail = check()
        failures += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failures else 0)
