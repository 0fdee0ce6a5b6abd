"""Cross-checks between the escape rule, the band covers and the chain oracle."""

import numpy as np
import pytest

from fibspectrum.approximants import DEFAULT_TOL, band_cover, fibonacci_degree, sigma_k
from fibspectrum.oracle import chain_eigenvalues, potential
from fibspectrum.trace import classify_orbit


def _near_edges(cover, x, tol):
    edges = np.concatenate([cover.lo, cover.hi])
    return np.min(np.abs(x[:, None] - edges[None, :]), axis=1) <= tol


@pytest.mark.parametrize("V", [0.5, 1.0, 4.0])
def test_escape_step_is_first_level_left(V):
    # escaping at step n means: inside B_m for all m < n and outside B_n
    kmax = 18
    covers = [band_cover(V, m).cover for m in range(1, kmax + 1)]
    grid = np.linspace(-4.0, 4.0 + V, 3001)
    step = np.array([r.step if r.escaped else 10**9
                     for r in (classify_orbit(E, V, 60) for E in grid)])
    first_out = np.full(grid.size, 10**9)
    for m in range(kmax, 0, -1):
        out = ~covers[m - 1].contains_points(grid)
        first_out[out] = m
    near = np.zeros(grid.size, dtype=bool)
    for c in covers:
        near |= _near_edges(c, grid, 2 * DEFAULT_TOL)
    # B_0 = [-2, 2] U sigma_1 is not computed, so step 0 is compared with m = 1
    expected = np.where(first_out == 10**9, -1, first_out)
    got = np.where(step > kmax, -1, np.maximum(step, 1))
    assert np.all((got == expected) | near)


def test_matched_horizon_agrees_with_cover():
    V, k = 1.0, 18
    cover = band_cover(V, k).cover
    grid = np.linspace(-4.0, 4.0, 10001)
    bounded = np.array([classify_orbit(E, V, k).bounded for E in grid])
    bad = (bounded != cover.contains_points(grid)) & ~_near_edges(cover, grid, 2 * DEFAULT_TOL)
    assert not bad.any()


@pytest.mark.parametrize("V", [0.5, 1.0, 4.0])
def test_periodic_chain_fills_every_band(V):
    # one period of length F_14 = 610 closed into a ring: one eigenvalue per band of sigma_14
    N = fibonacci_degree(14)
    eig = chain_eigenvalues(potential(V, 0.0, N), "periodic").eigenvalues
    s = sigma_k(V, 14)
    assert np.max(s.distance(eig)) <= 1e-9
    assert np.max(band_cover(V, 13).cover.distance(eig)) <= 1e-9
    # the ring eigenvalues solve x_14 = 1, i.e. they sit on band edges
    first = np.searchsorted(eig, s.lo - 1e-9, side="left")
    last = np.searchsorted(eig, s.hi + 1e-9, side="right")
    assert np.all(last - first >= 1)


@pytest.mark.parametrize("V", [0.5, 1.0, 4.0])
def test_dirichlet_outliers_are_few(V):
    eig = chain_eigenvalues(potential(V, 0.0, 610)).eigenvalues
    far = band_cover(V, 14).cover.distance(eig) > 0.02
    assert far.sum() <= 5
