"""Dense LP solver, convex-hull certificates and small-polytope utilities.

The LP solver works on a condensed (Tucker) tableau with Bland's rule, which is
plenty for the problem sizes used here (a few thousand rows at most).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import InputError, ResourceError

FEAS_TOL = 1e-9
CERT_TOL = 1e-8
SEPARATION_MARGIN = 1e-10
SLICE_SLACK = 1e-12
MAX_POLY_DIM = 4

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11


def lex_order(points: np.ndarray) -> np.ndarray:
    """Indices sorting the rows of ``points`` lexicographically (first column primary)."""
    pts = np.round(np.asarray(points, dtype=float), 12)
    if pts.ndim != 2 or pts.shape[0] == 0:
        return np.arange(pts.shape[0] if pts.ndim else 0)
    return np.lexsort(pts.T[::-1])


def unique_rows(points: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Drop near-duplicate rows, keeping the first occurrence, then sort lexicographically."""
    pts = np.asarray(points, dtype=float)
    if len(pts) == 0:
        return pts.reshape(0, pts.shape[1] if pts.ndim == 2 else 0)
    keep: list[int] = []
    for i, p in enumerate(pts):
        if all(np.max(np.abs(p - pts[j])) > tol for j in keep):
            keep.append(i)
    out = pts[keep]
    return out[lex_order(out)]


# ---------------------------------------------------------------------------
# Linear programming
# ---------------------------------------------------------------------------

_RELATIONS = ("<=", ">=", "=")


@dataclass
class LinearProgram:
    """max (or min) c.x subject to row constraints and per-variable bounds.

    ``bounds`` defaults to x >= 0 for every variable; use ``(None, None)``
    for a free variable.
    """

    objective: np.ndarray
    rows: np.ndarray
    relations: list[str]
    rhs: np.ndarray
    bounds: list[tuple[Optional[float], Optional[float]]] = field(default_factory=list)
    maximize: bool = True

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        n = self.objective.size
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, n)
        self.rhs = np.asarray(self.rhs, dtype=float).ravel()
        if self.rows.ndim != 2 or self.rows.shape[1] != n:
            raise InputError("constraint rows must have one coefficient per objective entry")
        if self.rows.shape[0] != self.rhs.size or len(self.relations) != self.rhs.size:
            raise InputError("rows, relations and right-hand sides disagree in length")
        for rel in self.relations:
            if rel not in _RELATIONS:
                raise InputError(f"unknown relation {rel!r}")
        if not self.bounds:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise InputError("one (lower, upper) pair is needed per variable")
        if not (np.all(np.isfinite(self.rows)) and np.all(np.isfinite(self.rhs))
                and np.all(np.isfinite(self.objective))):
            raise InputError("LP data must be finite")

    @classmethod
    def from_constraints(cls, objective, constraints, bounds=None, maximize=True):
        """Build from a list of ``(coefficients, relation, bound)`` triples."""
        objective = np.asarray(objective, dtype=float).ravel()
        n = objective.size
        rows, rels, rhs = [], [], []
        for coeffs, rel, b in constraints:
            coeffs = np.asarray(coeffs, dtype=float).ravel()
            if coeffs.size != n:
                raise InputError("constraint width differs from objective length")
            rows.append(coeffs)
            rels.append(rel)
            rhs.append(float(b))
        return cls(objective, np.array(rows).reshape(len(rows), n), rels, np.array(rhs),
                   list(bounds) if bounds is not None else [], maximize)


@dataclass
class LPResult:
    status: str
    value: float
    solution: Optional[np.ndarray]
    iterations: int = 0


class _Tableau:
    """Condensed tableau for max c.y s.t. A y <= b, y >= 0.

    Row i encodes basic_i = b_i - sum_j T[i, j] * nonbasic_j; the last row
    encodes z = v - sum_j T[-1, j] * nonbasic_j with v in the last column.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, c: np.ndarray):
        m, n = A.shape
        self.m, self.n = m, n
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m, :n] = A
        self.T[:m, n] = b
        self.T[m, :n] = -c
        self.nonbasic = list(range(n))
        self.basic = list(range(n, n + m))
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        piv = T[row, col]
        r = T[row] / piv
        r[col] = 1.0 / piv
        column = T[:, col].copy()
        T -= np.outer(column, r)
        T[:, col] = -column / piv
        T[row] = r
        self.basic[row], self.nonbasic[col] = self.nonbasic[col], self.basic[row]
        self.iterations += 1

    def run(self, max_iter: int) -> str:
        T, m = self.T, self.m
        while True:
            if self.iterations >= max_iter:
                raise ResourceError(f"simplex iteration cap {max_iter} reached")
            costs = T[m, :-1]
            candidates = np.flatnonzero(costs < -_COST_TOL)
            if candidates.size == 0:
                return "optimal"
            labels = np.asarray(self.nonbasic)[candidates]
            col = int(candidates[np.argmin(labels)])
            column = T[:m, col]
            positive = np.flatnonzero(column > _PIVOT_TOL)
            if positive.size == 0:
                return "unbounded"
            ratios = T[positive, -1] / column[positive]
            best = ratios.min()
            tied = positive[ratios <= best + 1e-12 * max(1.0, abs(best))]
            basic_labels = np.asarray(self.basic)[tied]
            row = int(tied[np.argmin(basic_labels)])
            self.pivot(row, col)


def _standard_form(lp: LinearProgram):
    """Rewrite as max c.y s.t. A y <= b, y >= 0 with x = shift + M y."""
    n = lp.objective.size
    cols: list[np.ndarray] = []
    shift = np.zeros(n)
    extra_rows: list[tuple[np.ndarray, float]] = []
    for j, (lo, hi) in enumerate(lp.bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo > hi:
            raise InputError(f"variable {j} has lower bound above upper bound")
        e = np.zeros(n)
        e[j] = 1.0
        if np.isfinite(lo):
            shift[j] = lo
            cols.append(e)
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append(-e)
        else:
            cols.append(e)
            cols.append(-e)
    M = np.array(cols).T if cols else np.zeros((n, 0))
    k = M.shape[1]
    A_parts, b_parts = [], []
    if lp.rows.shape[0]:
        base_rows = lp.rows @ M
        base_rhs = lp.rhs - lp.rows @ shift
        rel = np.asarray(lp.relations)
        le, ge, eq = rel == "<=", rel == ">=", rel == "="
        A_parts += [base_rows[le], -base_rows[ge], base_rows[eq], -base_rows[eq]]
        b_parts += [base_rhs[le], -base_rhs[ge], base_rhs[eq], -base_rhs[eq]]
    for col, ub in extra_rows:
        row = np.zeros(k)
        row[col] = 1.0
        A_parts.append(row[None, :])
        b_parts.append(np.array([ub]))
    A = np.vstack(A_parts) if A_parts else np.zeros((0, k))
    b = np.concatenate(b_parts) if b_parts else np.zeros(0)
    sign = 1.0 if lp.maximize else -1.0
    c = sign * (lp.objective @ M)
    return A, b, c, M, shift


def _simplex(A: np.ndarray, b: np.ndarray, c: np.ndarray, max_iter: int):
    m, n = A.shape
    if m == 0:
        if np.any(c > _COST_TOL):
            return "unbounded", None, 0
        return "optimal", np.zeros(n), 0
    if b.min() >= -FEAS_TOL * 1e-3:
        tab = _Tableau(A, np.maximum(b, 0.0), c)
    else:
        # Phase one: auxiliary variable x0 with A y - x0 <= b, maximize -x0.
        aux = np.hstack([A, -np.ones((m, 1))])
        c_aux = np.zeros(n + 1)
        c_aux[n] = -1.0
        tab = _Tableau(aux, b, c_aux)
        tab.pivot(int(np.argmin(b)), n)
        if tab.run(max_iter) == "unbounded":  # cannot happen, objective is bounded by 0
            raise ResourceError("phase one reported unbounded")
        if -tab.T[-1, -1] > FEAS_TOL:
            return "infeasible", None, tab.iterations
        if n in tab.basic:
            row = tab.basic.index(n)
            entries = np.abs(tab.T[row, :-1])
            col = int(np.argmax(entries))
            if entries[col] > _PIVOT_TOL:
                tab.pivot(row, col)
        # remove the auxiliary column (it is nonbasic now or its row is redundant)
        if n in tab.nonbasic:
            col = tab.nonbasic.index(n)
            tab.T = np.delete(tab.T, col, axis=1)
            del tab.nonbasic[col]
        else:
            row = tab.basic.index(n)
            tab.T = np.delete(tab.T, row, axis=0)
            del tab.basic[row]
            tab.m -= 1
        tab.n = n
        tab.basic = [lab - 1 if lab > n else lab for lab in tab.basic]
        tab.nonbasic = [lab - 1 if lab > n else lab for lab in tab.nonbasic]
        # restore the true objective in terms of the current nonbasic variables
        obj = np.zeros(tab.T.shape[1])
        for j in range(n):
            if c[j] == 0.0:
                continue
            if j in tab.nonbasic:
                obj[tab.nonbasic.index(j)] -= c[j]
            else:
                i = tab.basic.index(j)
                obj[:-1] += c[j] * tab.T[i, :-1]
                obj[-1] += c[j] * tab.T[i, -1]
        tab.T[-1] = obj
    status = tab.run(max_iter)
    if status == "unbounded":
        return status, None, tab.iterations
    y = _basic_solution(A, b, tab)
    return "optimal", y, tab.iterations


def _basic_solution(A, b, tab: _Tableau) -> np.ndarray:
    """Recover the basic solution, re-solving the basis system for accuracy."""
    m, n = A.shape
    values = np.zeros(n + m)
    for i, label in enumerate(tab.basic):
        values[label] = tab.T[i, -1]
    if len(tab.basic) == m:
        full = np.hstack([A, np.eye(m)])
        B = full[:, tab.basic]
        try:
            if np.linalg.cond(B) < 1e10:
                refined = np.linalg.solve(B, b)
                trial = np.zeros(n + m)
                trial[tab.basic] = refined
                if np.all(trial >= -FEAS_TOL) and np.max(np.abs(trial - values)) < 1e-6:
                    values = trial
        except np.linalg.LinAlgError:
            pass
    y = values[:n]
    return np.where(np.abs(y) < 1e-15, 0.0, y)


def solve_lp(lp: LinearProgram, max_iter: Optional[int] = None) -> LPResult:
    """Solve a small dense LP with the simplex method (Bland's anti-cycling rule)."""
    A, b, c, M, shift = _standard_form(lp)
    if max_iter is None:
        max_iter = 50 * (A.shape[0] + A.shape[1]) + 1000
    status, y, iters = _simplex(A, b, c, max_iter)
    if status == "infeasible":
        return LPResult("infeasible", float("nan"), None, iters)
    if status == "unbounded":
        value = float("inf") if lp.maximize else float("-inf")
        return LPResult("unbounded", value, None, iters)
    x = shift + M @ y
    value = float(lp.objective @ x)
    return LPResult("optimal", value, x, iters)


def lp_is_feasible(lp: LinearProgram, x: np.ndarray, tol: float = FEAS_TOL) -> bool:
    """Check a point against every constraint and bound of ``lp``."""
    x = np.asarray(x, dtype=float)
    lhs = lp.rows @ x if lp.rows.shape[0] else np.zeros(0)
    for val, rel, b in zip(lhs, lp.relations, lp.rhs):
        if rel == "<=" and val > b + tol:
            return False
        if rel == ">=" and val < b - tol:
            return False
        if rel == "=" and abs(val - b) > tol:
            return False
    for xj, (lo, hi) in zip(x, lp.bounds):
        if lo is not None and xj < lo - tol:
            return False
        if hi is not None and xj > hi + tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Convex hull membership
# ---------------------------------------------------------------------------

@dataclass
class HullResult:
    inside: bool
    weights: Optional[np.ndarray] = None
    separator: Optional[np.ndarray] = None
    margin: float = 0.0


def _separating_functional(p: np.ndarray, G: np.ndarray):
    """max t s.t. h.(g_i - p) + t <= 0, |h_j| <= 1, t <= 1."""
    k, d = G.shape
    rows = np.hstack([G - p, np.ones((k, 1))])
    lp = LinearProgram(np.r_[np.zeros(d), 1.0], rows, ["<="] * k, np.zeros(k),
                       [(-1.0, 1.0)] * d + [(None, 1.0)])
    res = solve_lp(lp)
    h = res.solution[:d]
    margin = float(h @ p - np.max(G @ h))
    return h, margin


def _convex_weights(p: np.ndarray, G: np.ndarray) -> Optional[np.ndarray]:
    k, d = G.shape
    rows = np.vstack([G.T, np.ones((1, k))])
    lp = LinearProgram(np.zeros(k), rows, ["="] * (d + 1), np.r_[p, 1.0])
    res = solve_lp(lp)
    if res.status != "optimal":
        return None
    w = np.maximum(res.solution, 0.0)
    s = w.sum()
    if s <= 0:
        return None
    w = w / s
    if np.max(np.abs(w @ G - p)) > CERT_TOL:
        return None
    return w


def hull_membership(p, generators) -> HullResult:
    """Decide whether ``p`` lies in the convex hull of ``generators``.

    Returns convex weights when inside, otherwise a functional ``h`` with
    h.p - max_i h.g_i = margin > 1e-10.
    """
    p = np.asarray(p, dtype=float).ravel()
    G = np.asarray(generators, dtype=float)
    if G.size == 0:
        raise InputError("hull membership needs at least one generator")
    if G.ndim != 2 or G.shape[1] != p.size:
        raise InputError("generators and point must share one dimension")
    h, margin = _separating_functional(p, G)
    if margin > SEPARATION_MARGIN:
        return HullResult(False, separator=h, margin=margin)
    w = _convex_weights(p, G)
    if w is None:
        raise ResourceError("hull membership undecided at the certificate tolerance")
    return HullResult(True, weights=w)


# ---------------------------------------------------------------------------
# Polytopes
# ---------------------------------------------------------------------------

def _facets_by_subsets(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Facet hyperplanes n.y <= b of conv(V) by scanning d-subsets of vertices."""
    nv, d = V.shape
    if d > MAX_POLY_DIM:
        raise InputError(f"exact facet enumeration is limited to dimension {MAX_POLY_DIM}")
    scale = max(1.0, float(np.max(np.abs(V))))
    found: dict[tuple, tuple[np.ndarray, float]] = {}
    for subset in combinations(range(nv), d):
        P = V[list(subset)]
        H = np.hstack([P, -np.ones((d, 1))])
        _, s, vt = np.linalg.svd(H)
        if s[-1] < 1e-9 * scale:
            continue  # the subset does not pin down a unique hyperplane
        nvec = vt[-1]
        normal, offset = nvec[:d], nvec[d]
        norm = np.linalg.norm(normal)
        if norm < 1e-12:
            continue
        normal, offset = normal / norm, offset / norm
        vals = V @ normal - offset
        if np.all(vals <= 1e-9 * scale):
            pass
        elif np.all(vals >= -1e-9 * scale):
            normal, offset = -normal, -offset
        else:
            continue
        key = tuple(np.round(np.r_[normal, offset], 8))
        if key not in found:
            found[key] = (normal, offset)
    if not found:
        raise InputError("polytope is not full-dimensional")
    normals = np.array([v[0] for v in found.values()])
    offsets = np.array([v[1] for v in found.values()])
    return normals, offsets


class Polytope:
    """A polytope given by its vertices (V-representation).

    ``facets`` may be supplied as (normals, offsets) for families whose facet
    structure is known in closed form; otherwise it is computed on demand by a
    subset scan (dimension <= 4).
    """

    def __init__(self, vertices, canonical: bool = False, facets=None):
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] == 0 or V.shape[1] < 1:
            raise InputError("a polytope needs a nonempty list of equal-length vertices")
        if not np.all(np.isfinite(V)):
            raise InputError("vertex coordinates must be finite")
        if not canonical:
            V = canonical_vertices(V)
        else:
            V = V[lex_order(V)]
        self.vertices = V
        self.dim = V.shape[1]
        self._facets = facets
        self._edges = None

    def __len__(self):
        return len(self.vertices)

    @property
    def facets(self) -> tuple[np.ndarray, np.ndarray]:
        if self._facets is None:
            self._facets = _facets_by_subsets(self.vertices)
        return self._facets

    def is_symmetric(self, tol: float = 1e-9) -> bool:
        V = self.vertices
        for v in V:
            if np.min(np.max(np.abs(V + v), axis=1)) > tol:
                return False
        return True

    def incidence(self, tol: float = 1e-9) -> np.ndarray:
        normals, offsets = self.facets
        vals = self.vertices @ normals.T - offsets
        scale = max(1.0, float(np.max(np.abs(self.vertices))))
        return np.abs(vals) <= tol * scale

    @property
    def edges(self) -> np.ndarray:
        """Vertex index pairs (i < j) spanning one-dimensional faces."""
        if self._edges is None:
            self._edges = _edges_from_incidence(self.incidence())
        return self._edges


def _edges_from_incidence(inc: np.ndarray) -> np.ndarray:
    nv = inc.shape[0]
    if nv == 2:
        return np.array([[0, 1]], dtype=np.int64)
    inc_f = inc.astype(float)
    out_f = 1.0 - inc_f
    edges = []
    for i in range(nv - 1):
        common = inc[i][None, :] & inc[i + 1:]                 # (nv-i-1, nf)
        nonempty = common.any(axis=1)
        # vertices k lying on every facet in common: count of misses is zero
        misses = common.astype(float) @ out_f.T                # (nv-i-1, nv)
        on_face = (misses < 0.5).sum(axis=1)
        for off in np.flatnonzero(nonempty & (on_face == 2)):
            edges.append((i, i + 1 + off))
    return np.array(edges, dtype=np.int64).reshape(-1, 2)


def canonical_vertices(points) -> np.ndarray:
    """Remove duplicates and points that are convex combinations of the others."""
    P = unique_rows(np.asarray(points, dtype=float))
    if len(P) <= 1:
        return P
    keep = []
    for i in range(len(P)):
        others = np.delete(P, i, axis=0)
        if not hull_membership(P[i], others).inside:
            keep.append(i)
    return P[keep]


def polytope_from_formula(vertices, dual_vertices) -> Polytope:
    """Build a centrally symmetric polytope whose facets are {g.y = 1 : g in dual_vertices}."""
    G = np.asarray(dual_vertices, dtype=float)
    return Polytope(vertices, canonical=True, facets=(G, np.ones(len(G))))


def slice_vertices(poly: Polytope, f, level: float) -> np.ndarray:
    """Vertices of poly intersected with {y : f.y >= level}.

    Original vertices meeting the constraint plus crossings of cut edges with
    the hyperplane. A tangent hyperplane is handled via the slack 1e-12.
    """
    f = np.asarray(f, dtype=float).ravel()
    if f.size != poly.dim:
        raise InputError("functional and polytope dimensions differ")
    V = poly.vertices
    gap = V @ f - level
    inside = gap >= -SLICE_SLACK
    if not inside.any():
        raise InputError("empty slice: level exceeds the maximum of f on the polytope")
    pts = [V[inside]]
    E = poly.edges
    if len(E):
        cut = inside[E[:, 0]] != inside[E[:, 1]]
        if cut.any():
            i, j = E[cut, 0], E[cut, 1]
            t = np.clip(gap[i] / (gap[i] - gap[j]), 0.0, 1.0)[:, None]
            pts.append(V[i] + t * (V[j] - V[i]))
    return unique_rows(np.vstack(pts), tol=1e-9)


def dual_ball_vertices(poly: Polytope) -> np.ndarray:
    """Extreme points of {f : f.v <= 1 for all vertices v} for a symmetric polytope."""
    if poly.dim > MAX_POLY_DIM:
        raise InputError(f"dual vertex enumeration is limited to dimension {MAX_POLY_DIM}")
    if not poly.is_symmetric():
        raise InputError("polytope must be centrally symmetric")
    V = poly.vertices
    if np.linalg.matrix_rank(V, tol=1e-9) < poly.dim:
        raise InputError("polytope must be full-dimensional")
    normals, offsets = _facets_by_subsets(V)
    if np.any(offsets <= 1e-12):
        raise InputError("origin is not interior")
    G = normals / offsets[:, None]
    # polish each normal by solving g.v = 1 on the vertices of its facet
    for k in range(len(G)):
        on = np.abs(V @ G[k] - 1.0) <= 1e-7
        G[k] = np.linalg.lstsq(V[on], np.ones(on.sum()), rcond=None)[0]
    G[np.abs(G) < 1e-13] = 0.0
    return unique_rows(G, tol=1e-9)
