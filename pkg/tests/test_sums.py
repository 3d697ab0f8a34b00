import math

import numpy as np
import pytest

from daugavet.constants import SearchConfig
from daugavet.errors import InputError
from daugavet.spaces import AbsoluteNormProfile, lp
from daugavet.sums import (aoh_analyze, dc_sum_lower_bounds, dc_sum_upper, dec_sum_lower_bounds,
                           verify_stability)

L1, LINF, L2 = AbsoluteNormProfile("l1"), AbsoluteNormProfile("linf"), AbsoluteNormProfile("lp", p=2.0)
X, Y = lp(math.inf, 2), lp(1, 2)


def _by_id(entries):
    return {e.bound_id: e for e in entries}


def test_l1_bounds_at_generic_point():
    u, w = np.array([0.3, 0.1]), np.array([0.4, 0.3])  # norms 0.3 and 0.7
    e = _by_id(dc_sum_lower_bounds(X, Y, L1, u, w, 0.9, 0.2))
    assert e["gamma_lower"].bound == pytest.approx(2 * (0.2 - 1))
    assert e["l1_lower"].bound == pytest.approx(0.2)
    assert e["octahedral_lower"].applicable
    assert not e["linf_lower"].applicable and not e["gamma_upper"].applicable


def test_linf_bounds_use_unit_component():
    u, w = np.array([1.0, 0.2]), np.array([0.1, 0.2])
    e = _by_id(dc_sum_lower_bounds(X, Y, LINF, u, w, 0.8, 0.4))
    assert e["linf_lower"].bound == pytest.approx(0.8)
    assert e["gamma_lower"].bound == pytest.approx(2 * 0.5 * (0.4 - 1))


def test_axis_points_and_upper_bounds():
    e = _by_id(dc_sum_lower_bounds(X, Y, L2, np.array([1.0, 0.0]), np.zeros(2), 0.5, None))
    assert e["gamma_lower"].bound == pytest.approx(2 * math.sqrt(0.5) * (0.5 - 1))
    assert e["gamma_upper"].bound == pytest.approx(math.sqrt(2))
    e = _by_id(dc_sum_lower_bounds(X, Y, LINF, np.array([1.0, 0.0]), np.zeros(2), 0.5, None))
    assert not e["gamma_upper"].applicable
    assert dc_sum_upper(L1, "right_unit") == 2.0
    assert dc_sum_upper(LINF, "left_unit") is None


def test_octahedral_not_applicable_for_euclidean_profile():
    u, w = np.array([0.6, 0.0]), np.array([0.8, 0.0])
    e = _by_id(dc_sum_lower_bounds(X, Y, L2, u, w, 0.4, 0.2))
    assert not e["octahedral_lower"].applicable


def test_dec_bounds():
    e = _by_id(dec_sum_lower_bounds(X, Y, L1, 1.0, 0.0, [1.0, 0.5], [0.0, 0.0], 0.5, None))
    assert e["dec_min_lower"].bound == 0.5 and e["dec_l1_equality"].bound == 0.5
    e = _by_id(dec_sum_lower_bounds(X, Y, LINF, 1.0, 1.0, [1.0, 0.5], [0.2, 0.1], 0.5, 0.7))
    assert e["dec_linf_lower"].bound == 0.5


def test_off_sphere_rejected():
    with pytest.raises(InputError):
        dc_sum_lower_bounds(X, Y, L1, np.array([0.3, 0.0]), np.array([0.3, 0.0]), 1, 1)
    with pytest.raises(InputError):
        dec_sum_lower_bounds(X, Y, L2, 0.5, 0.5, [1, 0], [1, 0], 1, 1)


def test_aoh_analysis():
    assert aoh_analyze(L1)["witness"] == pytest.approx((0.5, 0.5))
    assert aoh_analyze(L2)["witness"] is None
    assert aoh_analyze(LINF)["c"] == 1.0


@pytest.mark.parametrize("prof", [L1, LINF, L2])
def test_small_stability_runs_clean(prof):
    left, right = (X, Y) if prof is not LINF else (Y, X)
    reps = verify_stability(left, right, prof, 6, SearchConfig(dual_samples=2000, seed=3))
    assert all(not r.violations for r in reps)
    assert [r.trial for r in reps] == list(range(6))


def test_stability_is_thread_invariant():
    cfg1 = SearchConfig(dual_samples=1000, seed=5, threads=1)
    cfg4 = SearchConfig(dual_samples=1000, seed=5, threads=4)
    a = verify_stability(X, Y, L1, 4, cfg1)
    b = verify_stability(X, Y, L1, 4, cfg4)
    assert [r.dec.value for r in a] == [r.dec.value for r in b]
    assert all(np.array_equal(r.point, s.point) for r, s in zip(a, b))
