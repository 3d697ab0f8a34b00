import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from daugavet.errors import InputError, UnsupportedVariantError
from daugavet.spaces import (AbsoluteNormProfile, C0View, PolyhedralSpace,
                             WeightedL1, direct_sum, lp, space_from_dict)

vec3 = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3).map(np.array)
HEX = [[1, 0], [0.5, 1], [-0.5, 1], [-1, 0], [-0.5, -1], [0.5, -1]]


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_lp_norm_matches_numpy(p):
    rng = np.random.default_rng(0)
    S = lp(p, 4)
    Z = rng.normal(size=(20, 4))
    assert np.allclose(S.norms(Z), np.linalg.norm(Z, ord=p, axis=1))
    q = 1.0 if math.isinf(p) else (math.inf if p == 1.0 else p / (p - 1.0))
    assert np.allclose(S.dual_norms(Z), np.linalg.norm(Z, ord=q, axis=1))


@pytest.mark.parametrize("space", [lp(1, 3), lp(math.inf, 3), WeightedL1([1.0, 2.0, 0.5]),
                                   PolyhedralSpace(HEX)])
def test_dual_norm_is_max_over_ball_vertices(space):
    rng = np.random.default_rng(1)
    F = rng.normal(size=(30, space.dim))
    brute = np.max(F @ space.ball_vertices().T, axis=1)
    assert np.allclose(space.dual_norms(F), brute)


@pytest.mark.parametrize("space", [lp(1, 3), lp(math.inf, 3), lp(2, 3), PolyhedralSpace(HEX)])
def test_norming_functional(space):
    rng = np.random.default_rng(2)
    for x in rng.normal(size=(10, space.dim)):
        f = space.norming_functional(x)
        assert space.dual_norm(f) == pytest.approx(1.0, abs=1e-9)
        assert f @ x == pytest.approx(space.norm(x), abs=1e-9)


@given(vec3, vec3, st.floats(-3, 3, allow_nan=False))
def test_sum_norm_axioms(x, y, c):
    S = direct_sum(lp(math.inf, 1), lp(1, 2), 2.0)
    assert S.norm(x + y) <= S.norm(x) + S.norm(y) + 1e-9
    assert S.norm(c * x) == pytest.approx(abs(c) * S.norm(x), abs=1e-9)


def test_sum_norm_is_profile_of_component_norms():
    rng = np.random.default_rng(3)
    S = direct_sum(lp(math.inf, 2), lp(1, 2), 3.0)
    for z in rng.normal(size=(10, 4)):
        a, b = np.max(np.abs(z[:2])), np.abs(z[2:]).sum()
        assert S.norm(z) == pytest.approx((a ** 3 + b ** 3) ** (1 / 3))


def test_polyhedral_sum_structure():
    S = direct_sum(lp(math.inf, 2), lp(1, 2), "l1")
    assert S.is_polyhedral
    assert (len(S.ball_vertices()), len(S.dual_vertices()), len(S.edges)) == (8, 16, 24)
    T = direct_sum(lp(1, 2), lp(math.inf, 2), "linf")
    assert (len(T.ball_vertices()), len(T.dual_vertices()), len(T.edges)) == (16, 8, 32)
    assert not direct_sum(lp(1, 2), lp(1, 2), 2.0).is_polyhedral


BOUNDARY = [[1, 0], [1, .5], [.5, 1], [0, 1]]


def _dense_dual(prof, s, t, n=200001):
    th = np.linspace(0, math.pi / 2, n)
    a, b = np.r_[np.cos(th), np.array(BOUNDARY)[:, 0]], np.r_[np.sin(th), np.array(BOUNDARY)[:, 1]]
    nn = prof(a, b)
    return float(np.max((a * s + b * t) / nn))


@pytest.mark.parametrize("prof", [AbsoluteNormProfile("l1"), AbsoluteNormProfile("linf"),
                                  AbsoluteNormProfile("lp", p=3.0),
                                  AbsoluteNormProfile("polygonal", boundary=BOUNDARY)])
def test_profile_dual_against_dense_boundary(prof):
    for s, t in [(1.0, 0.0), (0.3, 0.7), (1.0, 1.0), (0.2, 0.05)]:
        assert float(prof.dual(s, t)) == pytest.approx(_dense_dual(prof, s, t), abs=1e-6)


def test_profile_parameters():
    # values from the definitions: min over the l1 segment, N(1,1), flat lengths
    l1, li, l2 = AbsoluteNormProfile("l1"), AbsoluteNormProfile("linf"), AbsoluteNormProfile("lp", p=2.0)
    poly = AbsoluteNormProfile("polygonal", boundary=[[1, 0], [1, .5], [.5, 1], [0, 1]])
    assert (l1.gamma, l1.Gamma, l1.c, l1.d) == (1.0, 2.0, 0.0, 0.0)
    assert (li.gamma, li.Gamma, li.c, li.d) == (0.5, 1.0, 1.0, 1.0)
    assert l2.gamma == pytest.approx(math.sqrt(0.5)) and l2.Gamma == pytest.approx(math.sqrt(2))
    assert poly.gamma == pytest.approx(2 / 3, abs=1e-9)
    assert poly.Gamma == pytest.approx(4 / 3)
    assert poly.c == pytest.approx(0.5, abs=1e-9) and poly.d == pytest.approx(0.5, abs=1e-9)
    s = np.linspace(0, 1, 100001)
    for prof in (l1, li, l2, poly):
        assert prof.gamma == pytest.approx(float(np.min(prof(s, 1 - s))), abs=1e-8)


def test_octahedral_witnesses():
    assert AbsoluteNormProfile("l1").find_octahedral_witness()[:2] == pytest.approx((0.5, 0.5))
    assert AbsoluteNormProfile("linf").find_octahedral_witness()[:2] == pytest.approx((1.0, 1.0))
    assert AbsoluteNormProfile("lp", p=2.0).find_octahedral_witness() is None
    poly = AbsoluteNormProfile("polygonal", boundary=[[1, 0], [1, .5], [.5, 1], [0, 1]])
    a, b, r = poly.find_octahedral_witness()
    assert (a, b) == pytest.approx((0.75, 0.75), abs=1e-6)
    assert poly(poly.c + a, 1 + b) == pytest.approx(2.0) and poly(1 + a, poly.d + b) == pytest.approx(2.0)


def test_axis_extremality():
    li = AbsoluteNormProfile("linf")
    assert not li.left_axis_extreme and not li.right_axis_extreme
    l1 = AbsoluteNormProfile("l1")
    assert l1.left_axis_extreme and l1.right_axis_extreme
    with pytest.raises(UnsupportedVariantError):
        AbsoluteNormProfile("lp", p=2.0).quadrant_extremes


def test_space_dict_roundtrip():
    for d in [{"type": "lp", "p": "inf", "dim": 3}, {"type": "lp", "p": 1.5, "dim": 2},
              {"type": "weighted_l1", "weights": [1, 2]}, {"type": "c0", "dim": 3},
              {"type": "polyhedral", "vertices": HEX},
              {"type": "sum", "norm": {"type": "lp", "p": 2}, "left": {"type": "lp", "p": 1, "dim": 2},
               "right": {"type": "lp", "p": "inf", "dim": 2}}]:
        S = space_from_dict(d)
        T = space_from_dict(S.to_dict())
        z = np.linspace(-1, 1, S.dim)
        assert S.norm(z) == pytest.approx(T.norm(z))


@pytest.mark.parametrize("bad", [{"type": "lp", "p": 0.5, "dim": 2}, {"type": "lp", "p": 2},
                                 {"type": "lp", "p": 2, "dim": 2, "extra": 1}, {"type": "nope"},
                                 {"type": "weighted_l1", "weights": [1, -1]},
                                 {"type": "polyhedral", "vertices": [[1, 0], [0, 1]]},
                                 {"type": "polyhedral", "vertices": [[1, 0], [0, 1], [-1, 0], [0, -2]]}])
def test_space_parse_errors(bad):
    with pytest.raises(InputError):
        space_from_dict(bad)


def test_c0_view_behaves_like_sup_norm():
    S = C0View(3)
    assert S.norm([0.2, -0.9, 0.1]) == pytest.approx(0.9)
    assert S.to_dict()["type"] == "c0"
