import numpy as np
import pytest
from hypothesis import given, strategies as st

from daugavet.errors import InputError, ResourceError
from daugavet.lipfree import (FiniteMetricSpace, FreeElement, check_dc_characterization,
                              denting_certificate, free_norm, free_norm_with_function,
                              interval_delta, ladder_space, molecule, molecule_distance_bound,
                              molecule_pair_norm, random_metric_space, segment_delta_certificate)

from oracles import free_norm_by_transport


def _weights(M, rng, k=3):
    labels = list(rng.choice(M.labels, size=min(k, len(M)), replace=False))
    return {str(l): float(rng.normal()) for l in labels}


@pytest.mark.parametrize("seed", range(12))
def test_lp_norm_equals_transport_oracle(seed):
    rng = np.random.default_rng(seed)
    M = random_metric_space(int(rng.integers(3, 7)), rng, "graph" if seed % 2 else "euclidean")
    for _ in range(3):
        w = _weights(M, rng)
        ref = free_norm_by_transport(M.dist, M.index["0"], {M.index[k]: v for k, v in w.items()})
        assert free_norm(M, FreeElement(M, w)) == pytest.approx(ref, abs=1e-8)


def test_two_point_space():
    M = FiniteMetricSpace(["0", "p"], [[0, 1], [1, 0]])
    assert free_norm(M, FreeElement(M, [("p", 1.0)])) == pytest.approx(1.0)
    assert denting_certificate(M, "p", "0").denting


@pytest.mark.parametrize("seed", range(6))
def test_molecules_have_norm_one(seed):
    rng = np.random.default_rng(50 + seed)
    M = random_metric_space(6, rng, "euclidean" if seed % 2 else "graph")
    for a in M.labels:
        for b in M.labels:
            if a != b:
                assert free_norm(M, molecule(M, a, b)) == pytest.approx(1.0, abs=1e-9)


def test_segment_is_l1():
    k = 6
    M = ladder_space(1, k).restrict(["0"] + [f"s{i}" for i in range(1, k + 1)])
    path = ["0"] + [f"s{i}" for i in range(1, k + 1)]
    edges = [molecule(M, path[i], path[i - 1]).element for i in range(1, k + 1)]
    rng = np.random.default_rng(0)
    for _ in range(5):
        c = rng.normal(size=k)
        mu = sum((ci * e for ci, e in zip(c[1:], edges[1:])), c[0] * edges[0])
        assert free_norm(M, mu) == pytest.approx(np.abs(c).sum(), abs=1e-9)
    assert free_norm(M, molecule(M, f"s{k}", "0")) == pytest.approx(1.0)


def test_subset_isometry():
    rng = np.random.default_rng(7)
    M = random_metric_space(7, rng, "euclidean")
    sub = M.restrict(["0", "p1", "p3", "p4"])
    for _ in range(5):
        w = {l: float(rng.normal()) for l in ["p1", "p3", "p4"]}
        assert free_norm(M, FreeElement(M, w)) == pytest.approx(free_norm(sub, FreeElement(sub, w)), abs=1e-9)


@given(st.integers(0, 10_000))
def test_norm_axioms(seed):
    rng = np.random.default_rng(seed)
    M = random_metric_space(5, rng, "graph")
    a, b = FreeElement(M, _weights(M, rng)), FreeElement(M, _weights(M, rng))
    c = float(rng.normal())
    assert free_norm(M, a + b) <= free_norm(M, a) + free_norm(M, b) + 1e-9
    assert free_norm(M, c * a) == pytest.approx(abs(c) * free_norm(M, a), rel=1e-12, abs=1e-12)


def test_norming_function_is_lipschitz():
    rng = np.random.default_rng(3)
    M = random_metric_space(6, rng, "euclidean")
    v, f = free_norm_with_function(M, FreeElement(M, _weights(M, rng, 4)))
    for p in M.labels:
        for q in M.labels:
            assert f[p] - f[q] <= M.d(p, q) + 1e-9
    assert f["0"] == 0.0


def test_pair_norm_examples():
    rng = np.random.default_rng(4)
    M = random_metric_space(5, rng, "euclidean")
    same = molecule_pair_norm(M, ("p1", "p2"), ("p1", "p2"))
    assert same.value == pytest.approx(2.0) and same.formula == pytest.approx(2.0)
    opp = molecule_pair_norm(M, ("p1", "p2"), ("p2", "p1"))
    assert opp.value == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_pair_closed_form_whenever_it_applies(seed):
    rng = np.random.default_rng(200 + seed)
    M = random_metric_space(5, rng, "euclidean" if seed % 2 else "graph")
    for _ in range(8):
        x, y, u, v = rng.choice(M.labels, 4)
        if x == y or u == v:
            continue
        r = molecule_pair_norm(M, (x, y), (u, v))
        if r.formula_applies:
            assert r.formula == pytest.approx(r.value, abs=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_distance_bound(seed):
    rng = np.random.default_rng(300 + seed)
    M = random_metric_space(6, rng, "euclidean" if seed % 2 else "graph")
    for _ in range(10):
        a, b, c, d = rng.choice(M.labels, 4)
        if a == b or c == d:
            continue
        assert molecule_distance_bound(M, (a, b), (c, d)).passed


def test_metric_space_validation():
    with pytest.raises(InputError):
        FiniteMetricSpace(["0", "a", "b"], [[0, 1, 3], [1, 0, 1], [3, 1, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace(["0", "a"], [[0, 1], [2, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace(["0", "a"], [[0, 0], [0, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace(["x", "a"], [[0, 1], [1, 0]])
    with pytest.raises(InputError):
        FiniteMetricSpace.from_dict({"points": ["0"], "dist": [[0]], "extra": 1})
    M = FiniteMetricSpace(["0", "a"], [[0, 1], [1, 0]])
    with pytest.raises(InputError):
        molecule(M, "a", "a")
    with pytest.raises(InputError):
        FreeElement(M, [("zz", 1.0)])


def test_free_element_canonical():
    M = FiniteMetricSpace(["0", "a", "b"], [[0, 1, 2], [1, 0, 1], [2, 1, 0]])
    e = FreeElement(M, [("a", 1.0), ("a", 2.0), ("0", 5.0), ("b", 0.0)])
    assert e.support == [("a", 3.0)]


def test_interval_and_denting_on_segment_and_ladder():
    M = ladder_space(5, 4)
    assert set(interval_delta(M, "u5", "v5", 1e-3)) == {"u5", "v5"}
    assert set(interval_delta(M, "s4", "0", 2.0)) >= {"0", "s1", "s2", "s3", "s4"}
    for n in range(1, 6):
        assert denting_certificate(M, f"u{n}", f"v{n}").denting
    # s1 lies metrically between 0 and s2
    assert not denting_certificate(M, "s2", "0").denting


def test_ladder_distances_and_delta_certificate():
    M = ladder_space(6, 4)
    mxy = molecule(M, "s4", "0").element
    for n in range(1, 7):
        d = free_norm(M, molecule(M, f"u{n}", f"v{n}").element - mxy)
        assert d <= 4.0 / n + 1e-9
    for k in (2, 4):
        L = ladder_space(2, k)
        cert = segment_delta_certificate(L, ["0"] + [f"s{i}" for i in range(1, k + 1)])
        assert cert.mean_error <= 1e-12
        assert cert.value == pytest.approx(2 - 2 / k, abs=1e-9)


def test_characterization_report_on_ladder():
    N = 3
    M = ladder_space(N, 4)
    mu = molecule(M, "s4", "0")
    rep = check_dc_characterization(M, mu, 0.1)
    far = free_norm(M, mu.element - molecule(M, f"u{N}", f"v{N}").element)
    assert rep.alpha_upper <= far + 1e-9 <= 4 / N + 1e-9
    assert rep.denting_molecules > 0 and rep.consistent


def test_characterization_two_point():
    M = FiniteMetricSpace(["0", "p"], [[0, 1], [1, 0]])
    rep = check_dc_characterization(M, molecule(M, "p", "0"), 1.0)
    assert rep.alpha_upper == pytest.approx(0.0, abs=1e-9)
    assert not rep.consistent
    with pytest.raises(InputError):
        check_dc_characterization(M, FreeElement(M, [("p", 2.0)]), 1.0)


def test_ladder_resource_cap():
    with pytest.raises(ResourceError):
        ladder_space(200, 8)
