import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from daugavet.errors import InputError
from daugavet.optcore import (LinearProgram, Polytope, canonical_vertices, dual_ball_vertices,
                              hull_membership, slice_vertices, solve_lp, unique_rows)


def _random_lp(rng, n, m):
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0.1, 1.0, n)
    b = A @ x0 + rng.uniform(0.1, 1.0, m)
    c = rng.normal(size=n)
    return c, A, b


@pytest.mark.parametrize("seed", range(15))
def test_lp_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(2, 6)), int(rng.integers(3, 9))
    c, A, b = _random_lp(rng, n, m)
    bounds = [(0.0, 2.0)] * n
    mine = solve_lp(LinearProgram(c, A, ["<="] * m, b, bounds, maximize=True))
    ref = linprog(-c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    assert mine.status == "optimal"
    assert mine.value == pytest.approx(-ref.fun, abs=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_lp_free_variables_and_equalities(seed):
    rng = np.random.default_rng(100 + seed)
    n = 4
    A = rng.normal(size=(6, n))
    x0 = rng.normal(size=n)
    b = A @ x0 + rng.uniform(0.1, 1.0, 6)
    E = rng.normal(size=(1, n))
    e = E @ x0
    c = rng.normal(size=n)
    rows = np.vstack([A, E, -A[:2]])
    rhs = np.r_[b, e, -(A[:2] @ x0) + 5.0]
    rels = ["<="] * 6 + ["="] + ["<="] * 2
    box = [(-10.0, 10.0)] * n
    mine = solve_lp(LinearProgram(c, rows, rels, rhs, box, maximize=False))
    ref = linprog(c, A_ub=np.vstack([A, -A[:2]]), b_ub=np.r_[b, rhs[-2:]], A_eq=E, b_eq=e,
                  bounds=box, method="highs")
    assert mine.value == pytest.approx(ref.fun, abs=1e-8)


def test_lp_infeasible_and_unbounded():
    lp = LinearProgram([1.0], [[1.0], [1.0]], ["<=", ">="], [1.0, 2.0])
    assert solve_lp(lp).status == "infeasible"
    lp = LinearProgram([1.0, 1.0], [[1.0, -1.0]], ["<="], [1.0])
    assert solve_lp(lp).status == "unbounded"


def test_lp_rejects_bad_input():
    with pytest.raises(InputError):
        LinearProgram([1.0, 2.0], [[1.0]], ["<="], [1.0])
    with pytest.raises(InputError):
        LinearProgram([1.0], [[1.0]], ["<"], [1.0])


@pytest.mark.parametrize("seed", range(20))
def test_hull_membership_matches_lp_feasibility(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 4))
    G = rng.normal(size=(int(rng.integers(d + 1, 9)), d))
    p = rng.normal(size=d) * 0.8
    k = len(G)
    ref = linprog(np.zeros(k), A_eq=np.vstack([G.T, np.ones((1, k))]), b_eq=np.r_[p, 1.0],
                  bounds=[(0, None)] * k, method="highs")
    res = hull_membership(p, G)
    assert res.inside == (ref.status == 0)
    if res.inside:
        assert np.allclose(res.weights @ G, p, atol=1e-8)
        assert res.weights.min() >= 0
    else:
        assert res.separator @ p - np.max(G @ res.separator) > 0


def _facet_keys(normals, offsets):
    keys = set()
    for nrm, off in zip(normals, offsets):
        s = np.linalg.norm(nrm)
        keys.add(tuple(np.round(np.r_[nrm / s, off / s], 6)))
    return keys


@pytest.mark.parametrize("seed", range(10))
def test_facets_match_qhull(seed):
    rng = np.random.default_rng(seed)
    d = 2 + seed % 2
    P = rng.normal(size=(12, d))
    P = np.vstack([P, -P])
    poly = Polytope(P)
    hull = ConvexHull(P)
    assert len(poly) == len(hull.vertices)
    eq = hull.equations  # n.x + c <= 0
    ref = _facet_keys(eq[:, :-1], -eq[:, -1])
    assert _facet_keys(*poly.facets) == ref


def test_cube_and_cross_polytope_edges():
    cube = Polytope(np.array(np.meshgrid([-1, 1], [-1, 1], [-1, 1])).reshape(3, -1).T)
    assert len(cube) == 8 and len(cube.edges) == 12 and len(cube.facets[0]) == 6
    cross = Polytope(np.vstack([np.eye(3), -np.eye(3)]))
    assert len(cross) == 6 and len(cross.edges) == 12 and len(cross.facets[0]) == 8


def test_dual_vertices_of_cube_are_cross_polytope():
    cube = Polytope(np.array(np.meshgrid([-1, 1], [-1, 1], [-1, 1])).reshape(3, -1).T)
    G = dual_ball_vertices(cube)
    assert _facet_keys(G, np.zeros(len(G))) == _facet_keys(np.vstack([np.eye(3), -np.eye(3)]),
                                                           np.zeros(6))


def test_canonical_vertices_drop_interior_points():
    P = np.array([[1, 0], [0, 1], [-1, 0], [0, -1], [0.2, 0.1], [0.5, 0.5], [1, 0]])
    V = canonical_vertices(P)
    assert len(V) == 4


def test_slice_of_square():
    sq = Polytope([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    S = slice_vertices(sq, [1.0, 0.0], 0.5)
    ref = np.array([[0.5, -1], [0.5, 1], [1, -1], [1, 1]])
    assert np.allclose(unique_rows(S), unique_rows(ref))
    with pytest.raises(InputError):
        slice_vertices(sq, [1.0, 0.0], 1.5)
