import numpy as np
import pytest

from conftest import cantor_integer, middle_fifths, middle_thirds
from fibspectrum.approximants import band_cover
from fibspectrum.intervals import IntervalSet
from fibspectrum.sumset import (Outcome, TooLarge, gap_lemma_check, in_gap_of, intersects,
                                is_interval, minkowski_sum, sweep_csv, translate_sweep)


def test_sum_examples():
    a = IntervalSet([(0, 1), (2, 3)])
    assert minkowski_sum(a, a).to_list() == [[0, 6]]
    assert minkowski_sum(a, IntervalSet([(0, 0)])) == a


def test_middle_thirds_sum_is_interval():
    c = cantor_integer(8)
    assert minkowski_sum(c, c).to_list() == [[0, 2 * 3 ** 8]]
    f = middle_thirds(8)
    assert is_interval(minkowski_sum(f, f))
    assert minkowski_sum(f, f).hull() == (0.0, 2.0)


def test_is_interval_examples():
    assert is_interval(IntervalSet([(0, 6)]))
    assert not is_interval(IntervalSet([(0, 1), (2, 3)]))
    assert not is_interval(IntervalSet.empty())
    assert is_interval(IntervalSet([(0, 1), (1 + 1e-12, 2)]))


def test_weak_coupling_cover_sum_is_interval():
    c = band_cover(0.3, 16).cover
    assert is_interval(minkowski_sum(c, c))


def _int_cover(rng, n):
    pts = np.sort(rng.choice(np.arange(-200, 200), size=2 * n, replace=False))
    return IntervalSet.from_arrays(pts[::2].astype(float), pts[1::2].astype(float))


def test_sum_commutative_associative_exact(rng):
    for _ in range(50):
        a, b, c = (_int_cover(rng, int(rng.integers(1, 8))) for _ in range(3))
        assert minkowski_sum(a, b) == minkowski_sum(b, a)
        assert minkowski_sum(minkowski_sum(a, b), c) == minkowski_sum(a, minkowski_sum(b, c))


def test_sum_hull_exact(rng):
    for _ in range(50):
        a = IntervalSet.from_arrays(*np.sort(rng.uniform(-3, 3, (2, 6)), axis=0))
        b = IntervalSet.from_arrays(*np.sort(rng.uniform(-3, 3, (2, 6)), axis=0))
        lo, hi = minkowski_sum(a, b).hull()
        assert lo == a.hull()[0] + b.hull()[0] and hi == a.hull()[1] + b.hull()[1]


def test_sum_matches_pairwise_oracle(rng):
    a, b = _int_cover(rng, 5), _int_cover(rng, 4)
    probes = np.arange(-400.0, 400.0, 0.5)
    inside = minkowski_sum(a, b).contains_points(probes)
    grid_a = np.concatenate([np.arange(lo, hi + 0.25, 0.5) for lo, hi in a])
    grid_b = np.concatenate([np.arange(lo, hi + 0.25, 0.5) for lo, hi in b])
    direct = np.isin(probes, (grid_a[:, None] + grid_b[None, :]).ravel())
    assert np.array_equal(inside, direct)


def test_pair_guard():
    big = IntervalSet.from_arrays(np.arange(10001) * 2.0, np.arange(10001) * 2.0 + 1)
    with pytest.raises(TooLarge):
        minkowski_sum(big, big)


def test_gap_lemma_examples():
    f = middle_fifths(4)
    v = gap_lemma_check(f, f.affine(1.0, 0.3))
    assert v.outcome is Outcome.INTERSECT and v.product == pytest.approx(4.0)
    assert intersects(f, f.affine(1.0, 0.3))

    c = middle_thirds(5)
    tiny = IntervalSet([(0.45, 0.46), (0.5, 0.52)])
    assert gap_lemma_check(c, tiny).outcome is Outcome.C2_IN_GAP_OF_C1
    assert gap_lemma_check(tiny, c).outcome is Outcome.C1_IN_GAP_OF_C2

    v = gap_lemma_check(c, c.affine(1.0, 0.05))
    assert v.outcome is Outcome.INCONCLUSIVE and v.product == pytest.approx(1.0)


def test_gap_lemma_degenerate_input():
    v = gap_lemma_check(IntervalSet([(0, 1)]), middle_thirds(3))
    assert v.outcome is Outcome.INCONCLUSIVE and v.note


def test_in_gap_beyond_hull():
    assert in_gap_of(IntervalSet([(5, 6), (7, 8)]), IntervalSet([(0, 1), (2, 3)]))
    assert not in_gap_of(IntervalSet([(0.5, 2.5)]), IntervalSet([(0, 1), (2, 3)]))


def _random_thick(rng):
    """Random two-piece self-similar construction with fairly thick gaps."""
    ivs = [(0.0, 1.0)]
    for _ in range(int(rng.integers(2, 5))):
        nxt = []
        for a, b in ivs:
            L = b - a
            g = rng.uniform(0.02, 0.25) * L
            left = rng.uniform(0.2, 0.8) * (L - g)
            nxt += [(a, a + left), (a + left + g, b)]
        ivs = nxt
    return IntervalSet(ivs).affine(float(rng.uniform(0.5, 2)) * float(rng.choice([-1, 1])),
                                   float(rng.uniform(-0.5, 0.5)))


def test_intersect_verdict_is_sound(rng):
    seen = 0
    for _ in range(1000):
        a, b = _random_thick(rng), _random_thick(rng)
        v = gap_lemma_check(a, b)
        if v.outcome is Outcome.INTERSECT:
            seen += 1
            assert intersects(a, b)
        assert v.outcome is not Outcome.INTERSECT or v.product > 1
    assert seen > 100


def test_translate_sweep_and_csv():
    f = middle_fifths(3)
    samples = translate_sweep(f, f, n=101)
    assert len(samples) == 101
    lo, hi = 0.0, 2.0
    assert all(lo < s.t < hi for s in samples)
    for s in samples:
        if s.outcome is Outcome.INTERSECT:
            assert s.direct_intersect
    text = sweep_csv(samples)
    assert text.splitlines()[0] == "t,verdict,direct_intersect"
    assert len(text.splitlines()) == 102
