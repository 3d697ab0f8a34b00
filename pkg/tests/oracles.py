"""Independent reference computations used by the tests (no package code inside)."""
from __future__ import annotations

import itertools
import math

import numpy as np
import shapely
from shapely.geometry import Polygon


def polygon_ball(vertices):
    V = np.asarray(vertices, dtype=float)
    ang = np.arctan2(V[:, 1], V[:, 0])
    return Polygon(V[np.argsort(ang)])


def polygon_norm(poly: Polygon):
    """Gauge of a symmetric polygon from its edge lines."""
    C = np.asarray(poly.exterior.coords)[:-1]
    rows = []
    for a, b in zip(C, np.roll(C, -1, axis=0)):
        n = np.array([b[1] - a[1], a[0] - b[0]])
        rows.append(n / (n @ a))
    N = np.array(rows)
    return lambda z: float(np.max(N @ np.asarray(z, dtype=float)))


def _slice_max(poly, norm, x, f, level):
    R = 10.0
    f = np.asarray(f)
    # half-plane f.y >= level as a large quadrilateral
    t = np.array([-f[1], f[0]])
    p0 = f * level / (f @ f)
    H = Polygon([p0 + R * t, p0 - R * t, p0 - R * t + R * f, p0 + R * t + R * f])
    S = poly.intersection(H)
    if S.is_empty:
        return -math.inf
    pts = shapely.get_coordinates(S)
    return max(norm(np.asarray(x) - p) for p in pts)


def slice_constants(vertices, x, angles: int = 20000, depth: float = 1e-7):
    """(dc, Delta) of x in the polygon ball by brute-force slicing."""
    poly = polygon_ball(vertices)
    norm = polygon_norm(poly)
    V = np.asarray(vertices, dtype=float)
    thetas = list(np.linspace(0.0, 2 * math.pi, angles, endpoint=False))
    C = np.asarray(poly.exterior.coords)[:-1]
    for a, b in zip(C, np.roll(C, -1, axis=0)):
        n = np.array([b[1] - a[1], a[0] - b[0]])
        thetas.append(math.atan2(n[1], n[0]))
    dc = dec = math.inf
    x = np.asarray(x, dtype=float)
    for th in thetas:
        u = np.array([math.cos(th), math.sin(th)])
        f = u / np.max(V @ u)
        dc = min(dc, _slice_max(poly, norm, x, f, 1.0 - depth))
        dec = min(dec, _slice_max(poly, norm, x, f, float(f @ x)))
    return dc, dec


def transport_cost(D, supply, demand):
    """Optimal transport cost by enumerating basic feasible plans (tiny instances only).

    ``supply`` and ``demand`` are nonnegative with equal totals, indexed
    into the distance matrix ``D`` by the dictionaries' keys.
    """
    S, T = list(supply), list(demand)
    a = np.array([supply[i] for i in S], dtype=float)
    b = np.array([demand[j] for j in T], dtype=float)
    cells = [(i, j) for i in range(len(S)) for j in range(len(T))]
    m = len(S) + len(T) - 1
    best = math.inf
    for basis in itertools.combinations(range(len(cells)), min(m, len(cells))):
        A = np.zeros((len(S) + len(T), len(basis)))
        for k, c in enumerate(basis):
            i, j = cells[c]
            A[i, k] = 1.0
            A[len(S) + j, k] = 1.0
        rhs = np.r_[a, b]
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if np.max(np.abs(A @ sol - rhs)) > 1e-10 or sol.min() < -1e-12:
            continue
        cost = sum(sol[k] * D[S[cells[c][0]], T[cells[c][1]]] for k, c in enumerate(basis))
        best = min(best, cost)
    return best


def free_norm_by_transport(D, base, weights):
    """Free norm of sum_p w_p delta_p: the base point absorbs the imbalance."""
    supply, demand = {}, {}
    total = 0.0
    for p, w in weights.items():
        if p == base or w == 0.0:
            continue
        total += w
        if w > 0:
            supply[p] = w
        else:
            demand[p] = -w
    if total > 0:
        demand[base] = demand.get(base, 0.0) + total
    elif total < 0:
        supply[base] = supply.get(base, 0.0) - total
    if not supply:
        return 0.0
    return transport_cost(D, supply, demand)
