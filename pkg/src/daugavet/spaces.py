"""Finite-dimensional normed spaces: norms, dual norms, extreme points, sampling.

Every space exposes the same small surface:

* ``norm`` / ``dual_norm`` on coordinate vectors,
* ``is_polyhedral`` plus ``ball_vertices``, ``dual_vertices``, ``edges`` for
  polytope balls,
* ``lmo(h)`` returning a maximiser of h.y over the unit ball,
* ``sample_dual_sphere`` and ``sample_sphere`` with explicit seeds.
"""
from __future__ import annotations

import itertools
import json
import math
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import InputError, UnsupportedVariantError
from .optcore import (Polytope, dual_ball_vertices, lex_order, polytope_from_formula,
                      unique_rows)

FACE_TOL = 1e-9
DUAL_NORM_TOL = 1e-10


def as_vector(x, dim: Optional[int] = None) -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if dim is not None and v.size != dim:
        raise InputError(f"expected a vector of length {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise InputError("vector entries must be finite")
    return v


def _sign_vectors(dim: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=dim)))


def _signed_axes(dim: int) -> np.ndarray:
    eye = np.eye(dim)
    return np.vstack([eye, -eye])


# ---------------------------------------------------------------------------
# Absolute norms on the plane
# ---------------------------------------------------------------------------

class AbsoluteNormProfile:
    """An absolute normalized norm N on R^2.

    ``kind`` is one of ``l1``, ``linf``, ``lp`` (with ``p``) or ``polygonal``
    (with ``boundary``: points of the unit sphere in the closed positive
    quadrant, listed from (1, 0) to (0, 1)).
    """

    def __init__(self, kind: str, p: Optional[float] = None, boundary=None):
        self.kind = kind
        self.p = None
        self._corners = None
        if kind == "l1":
            boundary = [[1.0, 0.0], [0.0, 1.0]]
        elif kind == "linf":
            boundary = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        elif kind == "lp":
            if p is None:
                raise InputError("lp profile needs p")
            p = float(p)
            if p == 1.0:
                self.kind, boundary = "l1", [[1.0, 0.0], [0.0, 1.0]]
            elif math.isinf(p):
                self.kind, boundary = "linf", [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
            elif p > 1.0:
                self.p = p
                boundary = None
            else:
                raise InputError("profile exponent must be at least 1")
        elif kind == "polygonal":
            if boundary is None:
                raise InputError("polygonal profile needs boundary points")
        else:
            raise InputError(f"unknown profile kind {kind!r}")
        if boundary is not None:
            self._set_polygon(np.asarray(boundary, dtype=float))

    # -- construction -----------------------------------------------------
    def _set_polygon(self, P: np.ndarray):
        if P.ndim != 2 or P.shape[1] != 2 or len(P) < 2:
            raise InputError("boundary must be a list of at least two planar points")
        if np.any(P < -1e-12):
            raise InputError("boundary points must lie in the closed positive quadrant")
        if np.max(np.abs(P[0] - [1.0, 0.0])) > 1e-12 or np.max(np.abs(P[-1] - [0.0, 1.0])) > 1e-12:
            raise InputError("boundary must start at (1,0) and end at (0,1)")
        normals = []
        for A, B in zip(P[:-1], P[1:]):
            n = np.array([B[1] - A[1], A[0] - B[0]])     # outward for a counter-clockwise walk
            off = float(n @ A)
            if off <= 1e-12:
                raise InputError("boundary does not enclose the origin")
            normals.append(n / off)
        N = np.array(normals)
        if np.any(N < -1e-12):
            raise InputError("boundary does not describe an absolute (monotone) norm")
        if np.any(P @ N.T > 1.0 + 1e-9):
            raise InputError("boundary is not convex")
        N = np.maximum(N, 0.0)
        self._normals = unique_rows(N, tol=1e-12)
        # corners: boundary points lying on at least two distinct facets
        corners = []
        for q in P:
            on = np.abs(self._normals @ q - 1.0) <= 1e-9
            if on.sum() >= 2:
                corners.append(q)
        self._corners = np.array(corners).reshape(-1, 2)
        self._boundary = P

    @property
    def is_polygonal(self) -> bool:
        return self._corners is not None

    @classmethod
    def from_dict(cls, d: dict) -> "AbsoluteNormProfile":
        if not isinstance(d, dict) or "type" not in d:
            raise InputError("profile must be an object with a 'type'")
        allowed = {"l1": {"type"}, "linf": {"type"}, "lp": {"type", "p"},
                   "polygonal": {"type", "boundary"}}
        kind = d["type"]
        if kind not in allowed:
            raise InputError(f"unknown profile type {kind!r}")
        extra = set(d) - allowed[kind]
        if extra:
            raise InputError(f"unknown keys for {kind} profile: {sorted(extra)}")
        if kind == "lp":
            return cls("lp", p=_parse_exponent(d.get("p")))
        return cls(kind, boundary=d.get("boundary"))

    def to_dict(self) -> dict:
        if self.kind == "lp":
            return {"type": "lp", "p": self.p}
        if self.kind == "polygonal":
            return {"type": "polygonal", "boundary": self._boundary.tolist()}
        return {"type": self.kind}

    def label(self) -> str:
        return f"lp({self.p:g})" if self.kind == "lp" else self.kind

    # -- evaluation -------------------------------------------------------
    def __call__(self, a, b):
        a, b = np.abs(np.asarray(a, dtype=float)), np.abs(np.asarray(b, dtype=float))
        if self.kind == "l1":
            return a + b
        if self.kind == "linf":
            return np.maximum(a, b)
        if self.kind == "lp":
            m = np.maximum(a, b)
            safe = np.where(m > 0, m, 1.0)
            return np.where(m > 0, m * ((a / safe) ** self.p + (b / safe) ** self.p) ** (1.0 / self.p), 0.0)
        n = self._normals
        return np.max(np.multiply.outer(a, n[:, 0]) + np.multiply.outer(b, n[:, 1]), axis=-1)

    def dual(self, s, t):
        """N*(s,t) = max{a|s| + b|t| : N(a,b) <= 1}."""
        s, t = np.abs(np.asarray(s, dtype=float)), np.abs(np.asarray(t, dtype=float))
        if self.kind == "l1":
            return np.maximum(s, t)
        if self.kind == "linf":
            return s + t
        if self.kind == "lp":
            q = self.p / (self.p - 1.0)
            m = np.maximum(s, t)
            safe = np.where(m > 0, m, 1.0)
            return np.where(m > 0, m * ((s / safe) ** q + (t / safe) ** q) ** (1.0 / q), 0.0)
        c = self.quadrant_extremes
        return np.max(np.multiply.outer(s, c[:, 0]) + np.multiply.outer(t, c[:, 1]), axis=-1)

    def argmax_ball(self, s: float, t: float) -> tuple[float, float]:
        """A maximiser (a, b) >= 0 of a*s + b*t over the unit ball, for s, t >= 0."""
        if self.kind == "lp":
            q = self.p / (self.p - 1.0)
            if s == 0.0 and t == 0.0:
                return 1.0, 0.0
            m = max(s, t)
            u, w = (s / m) ** (q - 1.0), (t / m) ** (q - 1.0)
            n = float(self(u, w))
            return u / n, w / n
        c = self.quadrant_extremes
        k = int(np.argmax(c @ np.array([s, t])))
        return float(c[k, 0]), float(c[k, 1])

    def norming(self, s: float, t: float) -> tuple[float, float]:
        """A dual-unit (alpha, beta) >= 0 with alpha*s + beta*t = N(s, t), for s, t >= 0."""
        if self.kind == "lp":
            n = float(self(s, t))
            if n == 0.0:
                return 1.0, 0.0
            return (s / n) ** (self.p - 1.0), (t / n) ** (self.p - 1.0)
        n = self._normals
        k = int(np.argmax(n @ np.array([s, t])))
        return float(n[k, 0]), float(n[k, 1])

    # -- extremal structure -----------------------------------------------
    @cached_property
    def quadrant_extremes(self) -> np.ndarray:
        """Extreme points of the unit ball lying in the closed positive quadrant."""
        if not self.is_polygonal:
            raise UnsupportedVariantError("a strictly convex profile has infinitely many extreme points")
        keep = [c for c in self._corners]
        if self.right_axis_extreme:
            keep.append(np.array([1.0, 0.0]))
        if self.left_axis_extreme:
            keep.append(np.array([0.0, 1.0]))
        return unique_rows(np.array(keep), tol=1e-12)

    @cached_property
    def quadrant_normals(self) -> np.ndarray:
        """Extreme points of the dual unit ball in the closed positive quadrant."""
        if not self.is_polygonal:
            raise UnsupportedVariantError("a strictly convex profile has infinitely many facets")
        return self._normals.copy()

    @property
    def left_axis_extreme(self) -> bool:
        """Whether (0, 1) is an extreme point of the unit ball."""
        if self.kind == "lp":
            return True
        return bool(self._boundary[-2][1] < 1.0 - 1e-12)

    @property
    def right_axis_extreme(self) -> bool:
        """Whether (1, 0) is an extreme point of the unit ball."""
        if self.kind == "lp":
            return True
        return bool(self._boundary[1][0] < 1.0 - 1e-12)

    # -- derived parameters ------------------------------------------------
    @cached_property
    def gamma(self) -> float:
        """Largest g with N >= g * l1, i.e. the minimum of N on the l1 unit segment."""
        if self.kind == "l1":
            return 1.0
        if self.kind == "linf":
            return 0.5
        if self.kind == "lp":
            return 2.0 ** (1.0 / self.p - 1.0)
        lo, hi = 0.0, 1.0
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        f = lambda s: float(self(s, 1.0 - s))
        a, b = hi - phi * (hi - lo), lo + phi * (hi - lo)
        fa, fb = f(a), f(b)
        for _ in range(200):
            if fa <= fb:
                hi, b, fb = b, a, fa
                a = hi - phi * (hi - lo)
                fa = f(a)
            else:
                lo, a, fa = a, b, fb
                b = lo + phi * (hi - lo)
                fb = f(b)
        # piecewise-linear profiles reach the minimum at a ray through a corner
        cand = [f(0.0), f(1.0), fa, fb]
        for c in self._corners:
            cand.append(f(c[0] / (c[0] + c[1])))
        return float(min(cand))

    @cached_property
    def Gamma(self) -> float:
        """Smallest G with N <= G * linf, which is N(1, 1)."""
        return float(self(1.0, 1.0))

    def _flat_length(self, along_first: bool) -> float:
        g = (lambda s: float(self(s, 1.0))) if along_first else (lambda s: float(self(1.0, s)))
        if g(1.0) <= 1.0 + 1e-12:
            return 1.0
        lo, hi = 0.0, 1.0
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            if g(mid) <= 1.0 + 1e-12:
                lo = mid
            else:
                hi = mid
        return lo

    @cached_property
    def c(self) -> float:
        """max{s : N(s, 1) = 1}."""
        if self.kind == "l1" or self.kind == "lp":
            return 0.0
        if self.kind == "linf":
            return 1.0
        return self._flat_length(True)

    @cached_property
    def d(self) -> float:
        """max{t : N(1, t) = 1}."""
        if self.kind == "l1" or self.kind == "lp":
            return 0.0
        if self.kind == "linf":
            return 1.0
        return self._flat_length(False)

    def octahedral_residual(self, a: float, b: float) -> float:
        return float(max(abs(self(self.c + a, 1.0 + b) - 2.0), abs(self(1.0 + a, self.d + b) - 2.0)))

    def find_octahedral_witness(self, grid: int = 10_000, tol: float = 1e-8):
        """Search the positive unit curve for (a, b) with N((c,1)+(a,b)) = N((1,d)+(a,b)) = 2.

        Returns ``(a, b, residual)`` for the witness closest to the diagonal, or
        ``None`` when no grid point (after local refinement) meets ``tol``.
        """
        s = np.arange(grid + 1) / grid
        nrm = self(s, 1.0 - s)
        A, B = s / nrm, (1.0 - s) / nrm
        res = np.maximum(np.abs(self(self.c + A, 1.0 + B) - 2.0),
                         np.abs(self(1.0 + A, self.d + B) - 2.0))
        hits = np.flatnonzero(res <= tol)
        if hits.size:
            k = int(hits[np.argmin(np.abs(s[hits] - 0.5))])
            return float(A[k]), float(B[k]), float(res[k])
        k = int(np.argmin(res))
        lo, hi = s[max(k - 1, 0)], s[min(k + 1, grid)]
        def r(t):
            n = float(self(t, 1.0 - t))
            return self.octahedral_residual(t / n, (1.0 - t) / n)
        for _ in range(100):
            m1, m2 = lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0
            if r(m1) <= r(m2):
                hi = m2
            else:
                lo = m1
        t = 0.5 * (lo + hi)
        if r(t) <= tol:
            n = float(self(t, 1.0 - t))
            return t / n, (1.0 - t) / n, r(t)
        return None


def _parse_exponent(p) -> float:
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity"):
            return math.inf
        try:
            return float(p)
        except ValueError as exc:
            raise InputError(f"bad exponent {p!r}") from exc
    if isinstance(p, (int, float)) and not isinstance(p, bool):
        return float(p)
    raise InputError(f"bad exponent {p!r}")


# ---------------------------------------------------------------------------
# Spaces
# ---------------------------------------------------------------------------

class NormedSpace:
    """Common interface; subclasses fill in the norm-specific parts."""

    dim: int
    is_polyhedral: bool = False
    c0_semantics: bool = False

    # -- basic norms ------------------------------------------------------
    def norm(self, x) -> float:
        return float(self.norms(as_vector(x, self.dim)[None, :])[0])

    def norms(self, X) -> np.ndarray:
        raise NotImplementedError

    def dual_norm(self, f) -> float:
        return float(self.dual_norms(as_vector(f, self.dim)[None, :])[0])

    def dual_norms(self, F) -> np.ndarray:
        raise NotImplementedError

    def lmo(self, h) -> np.ndarray:
        """A point of the unit ball maximising h.y."""
        raise NotImplementedError

    def norming_functional(self, z) -> np.ndarray:
        """A dual-unit functional g with g.z = ||z|| (a subgradient of the norm at z)."""
        z = as_vector(z, self.dim)
        if self.is_polyhedral:
            G = self.dual_vertices()
            return G[int(np.argmax(G @ z))].copy()
        raise NotImplementedError

    # -- polytope structure ------------------------------------------------
    def _require_polyhedral(self):
        if not self.is_polyhedral:
            raise UnsupportedVariantError(f"{self.describe()} has no finite extreme point set")

    @cached_property
    def polytope(self) -> Polytope:
        self._require_polyhedral()
        return polytope_from_formula(self._vertex_formula(), self._dual_formula())

    def ball_vertices(self) -> np.ndarray:
        return self.polytope.vertices

    def dual_vertices(self) -> np.ndarray:
        self._require_polyhedral()
        G = self.polytope.facets[0]
        return G[lex_order(G)]

    @property
    def edges(self) -> np.ndarray:
        return self.polytope.edges

    def face_vertices(self, f) -> np.ndarray:
        """Ball vertices v with f.v >= 1 - 1e-9, for a dual-unit functional f."""
        self._require_polyhedral()
        f = as_vector(f, self.dim)
        nf = self.dual_norm(f)
        if abs(nf - 1.0) > 1e-9:
            raise InputError("functional must have dual norm one")
        V = self.ball_vertices()
        return V[V @ f >= 1.0 - FACE_TOL]

    # -- sampling ---------------------------------------------------------
    def forced_functionals(self) -> np.ndarray:
        axes = _signed_axes(self.dim)
        F = axes / self.dual_norms(axes)[:, None]
        if self.is_polyhedral and len(self.dual_vertices()) <= 4096:
            F = np.vstack([F, self.dual_vertices()])
        return unique_rows(F, tol=1e-12)

    def sample_dual_sphere(self, count: int, seed: int) -> np.ndarray:
        """Forced functionals (signed axes, dual ball vertices) plus Gaussian directions.

        All rows have dual norm one. ``count`` is the target total; the forced
        set is always included even if it alone exceeds ``count``.
        """
        if count < 1:
            raise InputError("count must be positive")
        forced = self.forced_functionals()
        extra = max(0, count - len(forced))
        rng = np.random.default_rng(seed)
        G = rng.standard_normal((extra, self.dim))
        if extra:
            G = G / self.dual_norms(G)[:, None]
        return np.vstack([forced, G])

    def sample_sphere(self, count: int, rng: np.random.Generator) -> np.ndarray:
        Z = rng.standard_normal((count, self.dim))
        return Z / self.norms(Z)[:, None]

    def sample_ball(self, count: int, rng: np.random.Generator) -> np.ndarray:
        S = self.sample_sphere(count, rng)
        return S * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / self.dim)

    # -- misc ---------------------------------------------------------------
    def describe(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        raise NotImplementedError


class LpSpace(NormedSpace):
    def __init__(self, p, dim: int):
        p = _parse_exponent(p) if not isinstance(p, float) else p
        if not p >= 1.0:
            raise InputError("p must be at least 1")
        if int(dim) != dim or dim < 1:
            raise InputError("dimension must be a positive integer")
        self.p = float(p)
        self.dim = int(dim)
        self.is_polyhedral = self.p == 1.0 or math.isinf(self.p)
        self.q = 1.0 if math.isinf(self.p) else (math.inf if self.p == 1.0 else self.p / (self.p - 1.0))

    @staticmethod
    def _pnorm(X, p):
        X = np.abs(np.atleast_2d(X))
        if math.isinf(p):
            return X.max(axis=1)
        if p == 1.0:
            return X.sum(axis=1)
        if p == 2.0:
            return np.sqrt((X * X).sum(axis=1))
        m = X.max(axis=1)
        safe = np.where(m > 0, m, 1.0)
        return np.where(m > 0, m * ((X / safe[:, None]) ** p).sum(axis=1) ** (1.0 / p), 0.0)

    def norms(self, X):
        return self._pnorm(X, self.p)

    def dual_norms(self, F):
        return self._pnorm(F, self.q)

    def lmo(self, h):
        h = as_vector(h, self.dim)
        if math.isinf(self.p):
            return np.where(h >= 0, 1.0, -1.0)
        if self.p == 1.0:
            k = int(np.argmax(np.abs(h)))
            y = np.zeros(self.dim)
            y[k] = 1.0 if h[k] >= 0 else -1.0
            return y
        if not np.any(h):
            y = np.zeros(self.dim)
            y[0] = 1.0
            return y
        a = np.abs(h) / np.max(np.abs(h))
        y = np.sign(h) * a ** (self.q - 1.0)
        return y / self.norm(y)

    def norming_functional(self, z):
        z = as_vector(z, self.dim)
        if math.isinf(self.p):
            k = int(np.argmax(np.abs(z)))
            g = np.zeros(self.dim)
            g[k] = 1.0 if z[k] >= 0 else -1.0
            return g
        if self.p == 1.0:
            return np.where(z >= 0, 1.0, -1.0)
        n = self.norm(z)
        if n == 0.0:
            g = np.zeros(self.dim)
            g[0] = 1.0
            return g
        return np.sign(z) * (np.abs(z) / n) ** (self.p - 1.0)

    def _vertex_formula(self):
        return _signed_axes(self.dim) if self.p == 1.0 else _sign_vectors(self.dim)

    def _dual_formula(self):
        return _sign_vectors(self.dim) if self.p == 1.0 else _signed_axes(self.dim)

    def describe(self):
        return f"l{'inf' if math.isinf(self.p) else f'{self.p:g}'}^{self.dim}"

    def to_dict(self):
        return {"type": "lp", "p": "inf" if math.isinf(self.p) else self.p, "dim": self.dim}


class C0View(LpSpace):
    """The sup norm on a finite vector read as a finitely supported element of c0.

    Only the dispatch of closed formulas changes; the geometry is that of l_inf^N.
    """

    c0_semantics = True

    def __init__(self, dim: int):
        super().__init__(math.inf, dim)

    def describe(self):
        return f"c0[{self.dim}]"

    def to_dict(self):
        return {"type": "c0", "dim": self.dim}


class WeightedL1(NormedSpace):
    """sum_n w_n |x_n|: the atomic part of an L1 space with atom masses w_n."""

    is_polyhedral = True

    def __init__(self, weights):
        w = as_vector(weights)
        if w.size == 0 or np.any(w <= 0):
            raise InputError("weights must be a nonempty list of positive numbers")
        self.weights = w
        self.dim = w.size

    def norms(self, X):
        return np.abs(np.atleast_2d(X)) @ self.weights

    def dual_norms(self, F):
        return (np.abs(np.atleast_2d(F)) / self.weights).max(axis=1)

    def lmo(self, h):
        h = as_vector(h, self.dim)
        k = int(np.argmax(np.abs(h) / self.weights))
        y = np.zeros(self.dim)
        y[k] = (1.0 if h[k] >= 0 else -1.0) / self.weights[k]
        return y

    def _vertex_formula(self):
        return _signed_axes(self.dim) / np.tile(self.weights, 2)[:, None]

    def _dual_formula(self):
        return _sign_vectors(self.dim) * self.weights

    def describe(self):
        return "weighted_l1(" + ",".join(f"{w:g}" for w in self.weights) + ")"

    def to_dict(self):
        return {"type": "weighted_l1", "weights": self.weights.tolist()}


class PolyhedralSpace(NormedSpace):
    """A norm whose unit ball is the convex hull of the given vertices."""

    is_polyhedral = True

    def __init__(self, vertices):
        poly = Polytope(vertices)
        if not poly.is_symmetric():
            raise InputError("unit ball must be centrally symmetric")
        if np.linalg.matrix_rank(poly.vertices, tol=1e-9) < poly.dim:
            raise InputError("unit ball must be full-dimensional")
        self.dim = poly.dim
        self._G = dual_ball_vertices(poly)
        self._poly = Polytope(poly.vertices, canonical=True, facets=(self._G, np.ones(len(self._G))))

    @cached_property
    def polytope(self):
        return self._poly

    def norms(self, X):
        return (np.atleast_2d(X) @ self._G.T).max(axis=1)

    def dual_norms(self, F):
        return (np.atleast_2d(F) @ self._poly.vertices.T).max(axis=1)

    def lmo(self, h):
        V = self._poly.vertices
        return V[int(np.argmax(V @ as_vector(h, self.dim)))].copy()

    def describe(self):
        return f"polyhedral[{len(self._poly.vertices)} vertices in R^{self.dim}]"

    def to_dict(self):
        return {"type": "polyhedral", "vertices": self._poly.vertices.tolist()}


class SumSpace(NormedSpace):
    """X x Y with the norm N(||x||, ||y||); vectors are concatenations (x, y)."""

    def __init__(self, left: NormedSpace, right: NormedSpace, profile: AbsoluteNormProfile):
        self.left, self.right, self.profile = left, right, profile
        self.dim = left.dim + right.dim
        self.is_polyhedral = left.is_polyhedral and right.is_polyhedral and profile.is_polygonal

    def split(self, z):
        z = np.asarray(z, dtype=float)
        return z[..., : self.left.dim], z[..., self.left.dim:]

    def norms(self, X):
        X = np.atleast_2d(X)
        a, b = self.split(X)
        return self.profile(self.left.norms(a), self.right.norms(b))

    def dual_norms(self, F):
        F = np.atleast_2d(F)
        f, g = self.split(F)
        return self.profile.dual(self.left.dual_norms(f), self.right.dual_norms(g))

    def lmo(self, h):
        h = as_vector(h, self.dim)
        f, g = self.split(h)
        a, b = self.profile.argmax_ball(self.left.dual_norm(f), self.right.dual_norm(g))
        return np.concatenate([a * self.left.lmo(f), b * self.right.lmo(g)])

    def norming_functional(self, z):
        z = as_vector(z, self.dim)
        u, w = self.split(z)
        al, be = self.profile.norming(self.left.norm(u), self.right.norm(w))
        return np.concatenate([al * self.left.norming_functional(u), be * self.right.norming_functional(w)])

    @staticmethod
    def _join(pairs, L: np.ndarray, R: np.ndarray, dl: int, dr: int) -> np.ndarray:
        out = []
        for a, b in pairs:
            left = a * L if a > 1e-14 else np.zeros((1, dl))
            right = b * R if b > 1e-14 else np.zeros((1, dr))
            for u in left:
                for w in right:
                    out.append(np.concatenate([u, w]))
        return np.array(out)

    def _vertex_formula(self):
        return self._join(self.profile.quadrant_extremes, self.left.ball_vertices(),
                          self.right.ball_vertices(), self.left.dim, self.right.dim)

    def _dual_formula(self):
        return self._join(self.profile.quadrant_normals, self.left.dual_vertices(),
                          self.right.dual_vertices(), self.left.dim, self.right.dim)

    def describe(self):
        return f"({self.left.describe()} (+)_{self.profile.label()} {self.right.describe()})"

    def to_dict(self):
        return {"type": "sum", "norm": self.profile.to_dict(),
                "left": self.left.to_dict(), "right": self.right.to_dict()}


# ---------------------------------------------------------------------------
# JSON ingestion
# ---------------------------------------------------------------------------

_SPACE_KEYS = {
    "lp": {"type", "p", "dim"},
    "polyhedral": {"type", "vertices"},
    "weighted_l1": {"type", "weights"},
    "c0": {"type", "dim"},
    "sum": {"type", "norm", "left", "right"},
}


def space_from_dict(d) -> NormedSpace:
    if not isinstance(d, dict) or "type" not in d:
        raise InputError("space must be an object with a 'type'")
    kind = d["type"]
    if kind not in _SPACE_KEYS:
        raise InputError(f"unknown space type {kind!r}")
    extra = set(d) - _SPACE_KEYS[kind]
    missing = _SPACE_KEYS[kind] - set(d)
    if extra:
        raise InputError(f"unknown keys for {kind} space: {sorted(extra)}")
    if missing:
        raise InputError(f"missing keys for {kind} space: {sorted(missing)}")
    if kind == "lp":
        return LpSpace(_parse_exponent(d["p"]), _parse_dim(d["dim"]))
    if kind == "c0":
        return C0View(_parse_dim(d["dim"]))
    if kind == "weighted_l1":
        return WeightedL1(d["weights"])
    if kind == "polyhedral":
        return PolyhedralSpace(d["vertices"])
    return SumSpace(space_from_dict(d["left"]), space_from_dict(d["right"]),
                    AbsoluteNormProfile.from_dict(d["norm"]))


def _parse_dim(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise InputError(f"dimension must be a positive integer, got {v!r}")
    return v


def load_space(path: str) -> NormedSpace:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read space file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"space file {path} is not valid JSON: {exc}") from exc
    return space_from_dict(data)


def lp(p, dim: int) -> LpSpace:
    return LpSpace(_parse_exponent(p) if isinstance(p, str) else float(p), dim)


def direct_sum(left: NormedSpace, right: NormedSpace, profile) -> SumSpace:
    if isinstance(profile, str):
        profile = AbsoluteNormProfile(profile)
    elif isinstance(profile, (int, float)):
        profile = AbsoluteNormProfile("lp", p=profile)
    return SumSpace(left, right, profile)
