"""Daugavet constant dc(x) and Delta-constant of points, with certificates.

Both constants are an infimum over slices of B_X of a supremum of ||x - y||
over the slice. In finite dimensions:

* dc(x) = inf over dual-unit f of max{||x - y|| : y in the face exposed by f};
* Delta(x) = inf over dual-unit f of max{||x - y|| : y in B_X, f.y >= f.x}.

The inner maximum is a convex maximisation, solved exactly on polytope balls
(vertices of the cut polytope), in closed form for Euclidean caps, and by
conditional-gradient ascent otherwise. The outer infimum is searched over a
sampled dual sphere followed by direct-search refinement; that part is
heuristic and every estimate says so in ``method``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import InputError, InvariantViolation, UnsupportedVariantError
from .optcore import SLICE_SLACK, hull_membership, unique_rows
from .spaces import LpSpace, NormedSpace, SumSpace, as_vector

FACE_LEVEL_TOL = 1e-9
NORM_TOL = 1e-9
GENERIC_SAMPLE_CAP = 2000


@dataclass
class SearchConfig:
    dual_samples: int = 20000
    delta: float = 1e-3
    refine_iters: int = 200
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.dual_samples < 1 or self.refine_iters < 0 or not self.delta > 0 or self.threads < 1:
            raise InputError("search configuration values must be positive")


@dataclass
class ConstantEstimate:
    value: float
    upper: float
    method: str
    certified_lower: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    delta: Optional[float] = None
    functional: Optional[np.ndarray] = None
    note: str = ""

    def bracket(self) -> tuple[Optional[float], float]:
        return self.certified_lower, self.upper


def _check_point(space: NormedSpace, x) -> tuple[np.ndarray, float]:
    x = as_vector(x, space.dim)
    nx = space.norm(x)
    if nx > 1.0 + NORM_TOL:
        raise InputError(f"point has norm {nx:.12g} > 1; the constants are defined on the unit ball")
    return x, nx


def _check_range(value: float, nx: float, what: str):
    if value < 1.0 - nx - 1e-7 or value > 1.0 + nx + 1e-7:
        raise InvariantViolation(f"{what} = {value} outside [1-||x||, 1+||x||] = [{1 - nx}, {1 + nx}]")


# ---------------------------------------------------------------------------
# Inner maximisation: max ||x - y|| over a slice-like region
# ---------------------------------------------------------------------------

def _hilbert_cap_max(F: np.ndarray, L: np.ndarray, x: np.ndarray) -> np.ndarray:
    """max |x - y| over {|y| <= 1, f.y >= L} for Euclidean unit f (rows of F)."""
    nx = float(np.linalg.norm(x))
    out = np.where(L <= 1.0, 0.0, -np.inf)
    if nx == 0.0:
        return np.where(L <= 1.0, 1.0, -np.inf)
    xf = F @ x
    xperp = np.sqrt(np.maximum(nx * nx - xf * xf, 0.0))
    Lc = np.clip(L, -1.0, 1.0)
    anti = -xf / nx >= L
    low = np.where(anti, -nx, Lc * xf - np.sqrt(1.0 - Lc * Lc) * xperp)
    return np.where(L <= 1.0, np.sqrt(np.maximum(nx * nx + 1.0 - 2.0 * low, 0.0)), out)


class _Inner:
    """Evaluates the inner maximum for batches of dual-unit functionals."""

    exact = False

    def __init__(self, space: NormedSpace, x: np.ndarray, mode: str, delta: float):
        self.space, self.x, self.mode, self.delta = space, x, mode, delta

    def __call__(self, F: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class _PolytopeInner(_Inner):
    exact = True

    def __init__(self, space, x, mode, delta):
        super().__init__(space, x, mode, delta)
        self.V = space.ball_vertices()
        self.G = space.dual_vertices()
        self.E = space.edges if mode == "dec" else np.zeros((0, 2), dtype=np.int64)

    def __call__(self, F):
        if self.mode == "dc":
            L = np.full(len(F), 1.0 - FACE_LEVEL_TOL)
        else:
            L = F @ self.x - SLICE_SLACK
        return kernels.region_max(F, L, self.V, self.E, self.G, self.x)


class _HilbertInner(_Inner):
    exact = True

    def __call__(self, F):
        L = np.full(len(F), 1.0 - self.delta) if self.mode == "dc" else F @ self.x
        return _hilbert_cap_max(F, L, self.x)


class _SumCurveInner(_Inner):
    """Sums of polytope spaces under a strictly convex profile.

    The ball is the union over the positive unit curve (a, b) of the products
    a*B_X x b*B_Y, so a slice maximum is a maximum over the curve of product
    polytope maxima. dc uses the exposed face, which for a strictly convex
    profile is the single product a*F_X x b*F_Y.
    """

    exact = False

    def __init__(self, space: SumSpace, x, mode, delta, coarse: int = 33, rounds: int = 3):
        super().__init__(space, x, mode, delta)
        self.prof = space.profile
        self.x1, self.x2 = space.split(x)
        L, R = space.left, space.right
        self.VL, self.VR = L.ball_vertices(), R.ball_vertices()
        self.GL, self.GR = L.dual_vertices(), R.dual_vertices()
        self.EL, self.ER = L.edges, R.edges
        self.coarse, self.rounds = coarse, rounds

    def _curve(self, s):
        n = self.prof(s, 1.0 - s)
        return s / n, (1.0 - s) / n

    def _argmax_curve(self, n1, n2):
        """Vectorised maximiser of a*n1 + b*n2 on the positive unit curve."""
        q = self.prof.p / (self.prof.p - 1.0)
        m = np.maximum(np.maximum(n1, n2), 1e-300)
        u, w = (n1 / m) ** (q - 1.0), (n2 / m) ** (q - 1.0)
        nrm = self.prof(u, w)
        return u / nrm, w / nrm

    @staticmethod
    def _face_part(xc, f, nf, scale, V, G):
        """max over the face of scale*B exposed by f of the distance to xc, row-wise."""
        GX, GV = G @ xc, G @ V.T                                    # (ng,), (ng, nv)
        D = (GX[None, :, None] - scale[:, None, None] * GV[None, :, :]).max(axis=1)   # (S, nv)
        safe = np.where(nf > 0, nf, 1.0)
        on = (f @ V.T) / safe[:, None] >= 1.0 - FACE_LEVEL_TOL
        far = np.where(on, D, -np.inf).max(axis=1)
        origin = float(np.max(GX)) if len(GX) else 0.0
        return np.where((scale <= 1e-14) | (nf <= 0.0), origin, far)

    def _face(self, F):
        sp = self.space
        f1, f2 = sp.split(F)
        n1, n2 = sp.left.dual_norms(f1), sp.right.dual_norms(f2)
        a, b = self._argmax_curve(n1, n2)
        dl = self._face_part(self.x1, f1, n1, a, self.VL, self.GL)
        dr = self._face_part(self.x2, f2, n2, b, self.VR, self.GR)
        return self.prof(dl, dr)

    def __call__(self, F):
        if self.mode == "dc":
            return self._face(F)
        sp = self.space
        FL, FR = sp.split(F)
        FL, FR = np.ascontiguousarray(FL), np.ascontiguousarray(FR)
        L = F @ self.x - SLICE_SLACK
        S = len(F)
        # the curve grid always contains the point through x and, per row,
        # the point where f attains its maximum, so no region is missed
        s = np.linspace(0.0, 1.0, self.coarse)
        n1x, n2x = self.space.left.norm(self.x1), self.space.right.norm(self.x2)
        sx = n1x / (n1x + n2x) if n1x + n2x > 0 else 0.5
        am, bm = self._argmax_curve(sp.left.dual_norms(FL), sp.right.dual_norms(FR))
        sm = am / (am + bm)
        s_all = np.hstack([np.tile(s, (S, 1)), np.full((S, 1), sx), sm[:, None]])
        A, B = self._curve(s_all)
        A, B = np.ascontiguousarray(A), np.ascontiguousarray(B)
        p = self.prof.p
        vals, arg = kernels.product_region_max(FL, FR, L, self.x1, self.x2, self.VL, self.EL,
                                               self.VR, self.ER, self.GL, self.GR, p, A, B)
        width = 1.0 / (self.coarse - 1)
        centre = s_all[np.arange(S), arg]
        for _ in range(self.rounds):
            grid = np.linspace(-width, width, 9)
            sg = np.clip(centre[:, None] + grid[None, :], 0.0, 1.0)
            A, B = self._curve(sg)
            v2, a2 = kernels.product_region_max(FL, FR, L, self.x1, self.x2, self.VL, self.EL,
                                                self.VR, self.ER, self.GL, self.GR, p,
                                                np.ascontiguousarray(A), np.ascontiguousarray(B))
            better = v2 > vals
            vals = np.where(better, v2, vals)
            centre = np.where(better, sg[np.arange(S), a2], centre)
            width /= 4.0
        return vals


class _GenericInner(_Inner):
    """Conditional-gradient ascent of ||x - y|| over B_X intersected with {f.y >= L}."""

    def __init__(self, space, x, mode, delta, iters: int = 40):
        super().__init__(space, x, mode, delta)
        self.iters = iters

    def _cap_lmo(self, h, f, L):
        sp = self.space
        y = sp.lmo(h)
        if f @ y >= L:
            return y
        hi = 1.0
        while f @ sp.lmo(h + hi * f) < L:
            hi *= 2.0
            if hi > 1e12:
                return sp.lmo(f)
        lo = 0.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if f @ sp.lmo(h + mid * f) >= L:
                hi = mid
            else:
                lo = mid
        y_hi, y_lo = sp.lmo(h + hi * f), sp.lmo(h + lo * f)
        g_hi, g_lo = f @ y_hi - L, f @ y_lo - L
        if g_hi - g_lo <= 1e-15:
            return y_hi
        t = g_hi / (g_hi - g_lo)
        return (1.0 - t) * y_hi + t * y_lo

    def _one(self, f):
        sp, x = self.space, self.x
        L = 1.0 - self.delta if self.mode == "dc" else float(f @ x)
        starts = [sp.lmo(f)]
        nx = sp.norm(x)
        if nx > 0:
            starts.append(self._cap_lmo(-sp.norming_functional(x), f, L))
        starts.append(self._cap_lmo(-f, f, L))
        best = -np.inf
        for y in starts:
            val = sp.norm(x - y)
            for _ in range(self.iters):
                g = sp.norming_functional(y - x)
                y_new = self._cap_lmo(g, f, L)
                v_new = sp.norm(x - y_new)
                if v_new <= val + 1e-13:
                    break
                y, val = y_new, v_new
            best = max(best, val)
        return best

    def __call__(self, F):
        return np.array([self._one(f) for f in F])


def _inner_for(space: NormedSpace, x: np.ndarray, mode: str, delta: float) -> _Inner:
    if space.is_polyhedral:
        return _PolytopeInner(space, x, mode, delta)
    if isinstance(space, LpSpace) and space.p == 2.0:
        return _HilbertInner(space, x, mode, delta)
    if (isinstance(space, SumSpace) and space.profile.kind == "lp"
            and space.left.is_polyhedral and space.right.is_polyhedral):
        return _SumCurveInner(space, x, mode, delta)
    return _GenericInner(space, x, mode, delta)


# ---------------------------------------------------------------------------
# Outer minimisation over the dual sphere
# ---------------------------------------------------------------------------

def _parallel_eval(fn: Callable[[np.ndarray], np.ndarray], F: np.ndarray, threads: int) -> np.ndarray:
    if threads <= 1 or len(F) < 2048:
        return fn(F)
    chunks = np.array_split(F, threads * 4)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(fn, chunks))
    return np.concatenate(parts)


def _normalize_dual(space: NormedSpace, F: np.ndarray) -> np.ndarray:
    n = space.dual_norms(F)
    return F / n[:, None]


def _direct_search(space, fn, f0, v0, iters, rng, step=0.25):
    f, v = f0.copy(), float(v0)
    d = space.dim
    axes = np.vstack([np.eye(d), -np.eye(d)])
    for _ in range(iters):
        R = rng.standard_normal((2 * d, d))
        R /= np.linalg.norm(R, axis=1)[:, None]
        D = np.vstack([axes, R])
        C = f[None, :] + step * D
        C = C[np.linalg.norm(C, axis=1) > 1e-12]
        C = _normalize_dual(space, C)
        vals = fn(C)
        k = int(np.argmin(vals))
        if vals[k] < v - 1e-15:
            f, v = C[k], float(vals[k])
        else:
            step *= 0.5
            if step < 1e-10:
                break
    return f, v


def _seed_functionals(space: NormedSpace, x: np.ndarray, nx: float, mode: str) -> np.ndarray:
    seeds = []
    if nx > 0:
        g = space.norming_functional(x)
        seeds += [g, -g]
    if mode == "dec" and space.is_polyhedral and nx > 1.0 - 1e-9:
        G = space.dual_vertices()
        active = G[G @ x >= 1.0 - 1e-9]
        if len(active):
            seeds.extend(active)
            c = active.mean(axis=0)
            if np.linalg.norm(c) > 1e-12:
                seeds.append(c)
    if not seeds:
        return np.zeros((0, space.dim))
    S = np.array(seeds)
    S = S[np.linalg.norm(S, axis=1) > 1e-12]
    return _normalize_dual(space, S)


def _search(space: NormedSpace, x, cfg: SearchConfig, mode: str) -> ConstantEstimate:
    x, nx = _check_point(space, x)
    inner = _inner_for(space, x, mode, cfg.delta)
    count = cfg.dual_samples
    if isinstance(inner, _GenericInner):
        count = min(count, GENERIC_SAMPLE_CAP)
    F = space.sample_dual_sphere(count, cfg.seed)
    seeds = _seed_functionals(space, x, nx, mode)
    if len(seeds):
        F = np.vstack([seeds, F])
    vals = _parallel_eval(inner, F, cfg.threads)
    order = np.argsort(vals, kind="stable")
    rng = np.random.default_rng([cfg.seed, 7919])
    best_f, best_v = F[order[0]].copy(), float(vals[order[0]])
    starts = [order[0]]
    for k in order[1:]:
        if len(starts) >= 4:
            break
        if all(np.max(np.abs(F[k] - F[j])) > 1e-3 for j in starts):
            starts.append(k)
    iters = cfg.refine_iters if not isinstance(inner, _GenericInner) else min(cfg.refine_iters, 20)
    for k in starts:
        f, v = _direct_search(space, inner, F[k], vals[k], iters, rng)
        if v < best_v - 1e-15:
            best_f, best_v = f, v
    name = "Delta" if mode == "dec" else "dc"
    _check_range(best_v, nx, name)
    method = "sampled"
    note = ""
    if mode == "dc" and space.is_polyhedral:
        note = "face limit (delta -> 0) on a polytope ball"
    elif isinstance(inner, _HilbertInner) and mode == "dc":
        note = f"fixed slice width delta={cfg.delta:g}"
    elif isinstance(inner, _SumCurveInner) and mode == "dc":
        note = "face limit on a product face"
    return ConstantEstimate(value=best_v, upper=best_v, method=method, samples=len(F),
                            seed=cfg.seed, delta=cfg.delta if mode == "dc" else None,
                            functional=best_f, note=note)


def dc_sampled(space: NormedSpace, x, cfg: Optional[SearchConfig] = None) -> ConstantEstimate:
    """Upper estimate of dc(x): min over sampled functionals of the slice maximum."""
    return _search(space, x, cfg or SearchConfig(), "dc")


def dec_sampled(space: NormedSpace, x, cfg: Optional[SearchConfig] = None) -> ConstantEstimate:
    """Upper estimate of Delta(x) over slices containing x."""
    return _search(space, x, cfg or SearchConfig(), "dec")


def dc_exact_polyhedral(space: NormedSpace, x) -> ConstantEstimate:
    """dc(x) = min over ball vertices v of ||x - v|| on a polytope ball.

    Vertices of a polytope are exposed and denting, so slices around a vertex
    shrink onto it. Ties go to the lexicographically first vertex.
    """
    if not space.is_polyhedral:
        raise UnsupportedVariantError(f"{space.describe()} is not a polytope ball")
    x, nx = _check_point(space, x)
    V = space.ball_vertices()
    d = space.norms(x[None, :] - V)
    k = int(np.argmin(d))
    val = float(d[k])
    _check_range(val, nx, "dc")
    return ConstantEstimate(value=val, upper=val, certified_lower=val, method="exact_polyhedral",
                            functional=None, note=f"nearest vertex index {k}")


def dc_value(space: NormedSpace, x, cfg: Optional[SearchConfig] = None) -> ConstantEstimate:
    """Exact value on polytope balls, sampled estimate otherwise."""
    if space.is_polyhedral:
        return dc_exact_polyhedral(space, x)
    return dc_sampled(space, x, cfg)


# ---------------------------------------------------------------------------
# Certificates: B_X (resp. x) in the convex hull of the far set
# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    certified: bool
    alpha: float
    eps: float
    witnesses: np.ndarray
    failed_point: Optional[np.ndarray] = None
    weights: list = field(default_factory=list)

    @property
    def bound(self) -> float:
        return self.alpha - self.eps


def _edge_crossings(space, x, tau, V, E) -> list[np.ndarray]:
    """Points p on ball edges with ||x - p|| = tau, next to far endpoints."""
    out = []
    if not len(E):
        return out
    dist = lambda P: space.norms(x[None, :] - P)
    dv = dist(V)
    for i, j in E:
        far_i, far_j = dv[i] >= tau, dv[j] >= tau
        if far_i == far_j and not far_i:
            continue
        p, q = V[i], V[j]
        g = lambda t: float(dist(((1 - t) * p + t * q)[None, :])[0])
        if far_i and far_j:
            lo, hi = 0.0, 1.0
            for _ in range(80):
                m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
                if g(m1) <= g(m2):
                    hi = m2
                else:
                    lo = m1
            tmin = 0.5 * (lo + hi)
            if g(tmin) >= tau:
                continue
            spans = [(0.0, tmin), (1.0, tmin)]
        elif far_i:
            spans = [(0.0, 1.0)]
        else:
            spans = [(1.0, 0.0)]
        for far_t, near_t in spans:
            a, b = far_t, near_t
            for _ in range(80):
                m = 0.5 * (a + b)
                if g(m) >= tau:
                    a = m
                else:
                    b = m
            out.append((1 - a) * p + a * q)
    return out


def _hilbert_witnesses(x: np.ndarray, count: int, rng) -> list[np.ndarray]:
    nx = float(np.linalg.norm(x))
    r = math.sqrt(max(1.0 - nx * nx, 0.0))
    out = []
    basis = np.eye(x.size)
    dirs = list(basis) + list(rng.standard_normal((count, x.size)))
    for z in dirs:
        if nx > 0:
            z = z - (z @ x) / (nx * nx) * x
        nz = np.linalg.norm(z)
        if nz < 1e-9:
            continue
        z = z / nz
        out += [x + r * z, x - r * z]
    return out


def far_set(space: NormedSpace, x, alpha: float, eps: float, cfg: SearchConfig,
            extra_witnesses=None, random_points: int = 200) -> np.ndarray:
    """Points of B_X at distance >= alpha - eps from x."""
    x = as_vector(x, space.dim)
    tau = alpha - eps
    rng = np.random.default_rng([cfg.seed, 104729])
    pts: list[np.ndarray] = []
    if space.is_polyhedral:
        V = space.ball_vertices()
        pts.extend(V)
        pts.extend(_edge_crossings(space, x, tau, V, space.edges))
    if isinstance(space, LpSpace) and space.p == 2.0:
        pts.extend(_hilbert_witnesses(x, 16, rng))
    pts.extend(space.sample_sphere(random_points, rng))
    if extra_witnesses is not None:
        pts.extend(np.atleast_2d(np.asarray(extra_witnesses, dtype=float)))
    P = np.array(pts)
    n = space.norms(P)
    P = P[n <= 1.0 + 1e-9]
    d = space.norms(x[None, :] - P)
    P = P[d >= tau - 1e-12]
    return unique_rows(P, tol=1e-12) if len(P) else P.reshape(0, space.dim)


def _validate_alpha(alpha, eps):
    if not (0.0 < alpha <= 2.0):
        raise InputError("alpha must lie in (0, 2]")
    if eps < 0:
        raise InputError("eps must be nonnegative")


def dc_lower_certificate(space: NormedSpace, x, alpha: float, eps: float,
                         cfg: Optional[SearchConfig] = None, extra_witnesses=None,
                         test_points: int = 64) -> Certificate:
    """Try to show B_X lies in the convex hull of the far set, proving dc(x) >= alpha - eps."""
    _validate_alpha(alpha, eps)
    cfg = cfg or SearchConfig()
    x, _ = _check_point(space, x)
    W = far_set(space, x, alpha, eps, cfg, extra_witnesses)
    if space.is_polyhedral:
        targets = space.ball_vertices()
    else:
        rng = np.random.default_rng([cfg.seed, 15485863])
        targets = space.sample_sphere(test_points, rng)
        d = space.norms(x[None, :] - targets)
        far_targets = targets[d >= alpha - eps - 1e-12]
        if len(far_targets):
            W = np.vstack([W, far_targets]) if len(W) else far_targets
    if len(W) == 0:
        return Certificate(False, alpha, eps, W, failed_point=targets[0])
    for t in targets:
        res = hull_membership(t, W)
        if not res.inside:
            return Certificate(False, alpha, eps, W, failed_point=t)
    return Certificate(True, alpha, eps, W)


def dec_lower_certificate(space: NormedSpace, x, alpha: float, eps: float,
                          cfg: Optional[SearchConfig] = None, extra_witnesses=None) -> Certificate:
    """Try to show x lies in the convex hull of the far set, proving Delta(x) >= alpha - eps."""
    _validate_alpha(alpha, eps)
    cfg = cfg or SearchConfig()
    x, _ = _check_point(space, x)
    W = far_set(space, x, alpha, eps, cfg, extra_witnesses)
    if len(W) == 0:
        return Certificate(False, alpha, eps, W, failed_point=x)
    res = hull_membership(x, W)
    if not res.inside:
        return Certificate(False, alpha, eps, W, failed_point=x)
    return Certificate(True, alpha, eps, W, weights=[res.weights])


# ---------------------------------------------------------------------------
# Indices over the sphere, denting points, operator inequalities
# ---------------------------------------------------------------------------

def thickness_index(space: NormedSpace, kind: str, cfg: Optional[SearchConfig] = None,
                    sphere_points: int = 64, refine_iters: int = 15) -> ConstantEstimate:
    """inf of dc (``ts``), inf of Delta (``tdelta``) or sup of dc (``sup_dc``) over the sphere."""
    if kind not in ("ts", "tdelta", "sup_dc"):
        raise InputError(f"unknown index kind {kind!r}")
    cfg = cfg or SearchConfig()
    sign = -1.0 if kind == "sup_dc" else 1.0
    if kind == "tdelta":
        point_value = lambda p: dec_sampled(space, p, cfg).value
    else:
        point_value = lambda p: dc_value(space, p, cfg).value
    rng = np.random.default_rng([cfg.seed, 3571])
    d = space.dim
    cands = [np.vstack([np.eye(d), -np.eye(d)])]
    if space.is_polyhedral and len(space.ball_vertices()) <= 256:
        cands.append(space.ball_vertices())
    cands.append(space.sample_sphere(sphere_points, rng))
    C = np.vstack(cands)
    C = C / space.norms(C)[:, None]
    vals = np.array([sign * point_value(c) for c in C])
    k = int(np.argmin(vals))
    p, v = C[k].copy(), float(vals[k])
    step = 0.2
    for _ in range(refine_iters):
        D = np.vstack([np.eye(d), -np.eye(d)])
        Q = p[None, :] + step * D
        Q = Q / space.norms(Q)[:, None]
        qv = np.array([sign * point_value(q) for q in Q])
        j = int(np.argmin(qv))
        if qv[j] < v - 1e-15:
            p, v = Q[j], float(qv[j])
        else:
            step *= 0.5
    value = sign * v
    return ConstantEstimate(value=value, upper=value if kind != "sup_dc" else math.nan,
                            method="sampled", samples=len(C), seed=cfg.seed,
                            functional=p, note=f"{kind} attained near the returned point")


def is_denting(space: NormedSpace, x, tol: float = 0.02, cfg: Optional[SearchConfig] = None) -> bool:
    """Vertex test on polytope balls; otherwise a sampled Delta-constant below ``tol``."""
    x = as_vector(x, space.dim)
    if abs(space.norm(x) - 1.0) > 1e-9:
        raise InputError("denting points live on the unit sphere")
    if space.is_polyhedral:
        V = space.ball_vertices()
        return bool(np.min(np.max(np.abs(V - x), axis=1)) <= 1e-9)
    return dec_sampled(space, x, cfg).value < tol


@dataclass
class OperatorCheck:
    lhs_T: float
    rhs_T: float
    lhs_P: Optional[float]
    rhs_P: Optional[float]
    passed: bool
    rhs_P_source: str = ""


def _delta_closed_form(space: NormedSpace, x: np.ndarray) -> Optional[float]:
    from .spaces import WeightedL1
    if isinstance(space, LpSpace) and space.p == 1.0:
        return float(1.0 + np.abs(x).sum() - 2.0 * np.max(np.abs(x)))
    if isinstance(space, WeightedL1):
        w = space.weights
        return float(1.0 + w @ np.abs(x) - 2.0 * np.max(w * np.abs(x)))
    if isinstance(space, LpSpace) and math.isinf(space.p) and space.dim == 2:
        return float(np.max(1.0 - np.abs(x)))
    if isinstance(space, LpSpace) and space.p == 2.0 and space.dim >= 2:
        return math.sqrt(max(1.0 - float(x @ x), 0.0))
    return None


def operator_inequality_check(space: NormedSpace, x, xstar, cfg: Optional[SearchConfig] = None,
                              tol: float = 1e-7) -> OperatorCheck:
    """Compare ||Id + x*(.)x|| with (dc(x)-1)||x*|| + 1 and ||Id - x*(.)x|| with Delta(x).

    On polytope balls the operator norms are exact maxima over ball vertices.
    The projection part runs only when x*(x) = 1. When Delta(x) has no closed
    form here it is replaced by the slice maximum at f = x*/||x*||, which is an
    upper bound for Delta(x) and still a lower bound for ||Id - P||.
    """
    cfg = cfg or SearchConfig()
    x, nx = _check_point(space, x)
    xs = as_vector(xstar, space.dim)
    if space.dim < 2:
        raise InputError("operator inequalities need dimension at least 2")
    ns = space.dual_norm(xs)
    if ns < 1.0 - 1e-12:
        raise InputError("x* must have dual norm at least 1")
    if space.is_polyhedral:
        Y = space.ball_vertices()
        exact = True
    else:
        rng = np.random.default_rng([cfg.seed, 7])
        Y = space.sample_sphere(cfg.dual_samples, rng)
        exact = False
        tol = max(tol, 0.05)
    s = Y @ xs
    lhs_T = float(np.max(space.norms(Y + s[:, None] * x[None, :])))
    dc = dc_value(space, x, cfg).value
    rhs_T = (dc - 1.0) * ns + 1.0
    ok = lhs_T >= rhs_T - tol
    lhs_P = rhs_P = None
    source = "skipped: x*(x) != 1"
    if abs(xs @ x - 1.0) <= 1e-9:
        lhs_P = float(np.max(space.norms(Y - s[:, None] * x[None, :])))
        cf = _delta_closed_form(space, x)
        if cf is not None:
            rhs_P, source = cf, "closed form"
        else:
            f = xs / ns
            rhs_P = float(_inner_for(space, x, "dec", cfg.delta)(f[None, :])[0])
            source = "slice maximum at x*/||x*||"
        ok = ok and lhs_P >= rhs_P - tol
    return OperatorCheck(lhs_T, rhs_T, lhs_P, rhs_P, bool(ok), source if exact else source + " (sampled)")
