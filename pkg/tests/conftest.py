import numpy as np
import pytest

from fibspectrum.intervals import IntervalSet


def cantor_integer(level: int) -> IntervalSet:
    """Middle-thirds level on [0, 3**level]; every endpoint is an integer."""
    lo = np.array([0], dtype=np.int64)
    size = 3 ** level
    for _ in range(level):
        size //= 3
        lo = (lo[:, None] + np.array([0, 2 * size])[None, :]).ravel()
    return IntervalSet.from_arrays(lo.astype(float), (lo + size).astype(float))


def middle_thirds(level: int) -> IntervalSet:
    return cantor_integer(level).affine(1.0 / 3 ** level)


def middle_fifths(level: int) -> IntervalSet:
    """Remove the central fifth at every stage: [0, 2/5] and [3/5, 1] of each piece."""
    ivs = [(0, 5 ** level)]
    for _ in range(level):
        nxt = []
        for a, b in ivs:
            step = (b - a) // 5
            nxt += [(a, a + 2 * step), (a + 3 * step, b)]
        ivs = nxt
    return IntervalSet([(a / 5 ** level, b / 5 ** level) for a, b in ivs])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
