import threading

import numpy as np
import pytest

from fibspectrum.approximants import band_cover
from fibspectrum.intervals import IntervalSet
from fibspectrum.sweeps import (LevelPolicyError, default_scales, gap_rows, level_for,
                                metrics_row, run_ordered)


def test_level_policy_is_smallest_resolving_level():
    k = level_for(0.4)
    assert band_cover(0.4, k).max_band_length < 0.04
    assert band_cover(0.4, k - 1).max_band_length >= 0.04
    with pytest.raises(ValueError):
        level_for(0.0)
    with pytest.raises(LevelPolicyError):
        level_for(0.05, k_max=5)


def test_default_scales_dyadic():
    c = IntervalSet([(0.0, 1.0), (2.0, 4.0)])
    s = default_scales(c)
    assert s[0] == 4.0 / 16 and s.size == 6
    assert np.all(s[1:] / s[:-1] == 0.5)
    fine = default_scales(c, max_band=1e-6)
    assert fine[-1] >= 10e-6 and fine[-1] < 20e-6


def test_run_ordered_keeps_input_order():
    seen = []
    lock = threading.Lock()

    def fn(x):
        with lock:
            seen.append(x)
        return x * x

    assert run_ordered(fn, range(20), threads=4) == [x * x for x in range(20)]
    assert sorted(seen) == list(range(20))


def test_metrics_row_fixed_level():
    row = metrics_row(1.0, 8)
    assert row.k == 8 and row.status == "ok" and row.tau <= row.theta


def test_gap_rows_sorted_decreasing():
    rows = gap_rows([0.1, 0.2])
    assert [r.V for r in rows] == [0.2, 0.1]
