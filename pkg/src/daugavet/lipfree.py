"""Lipschitz-free spaces over finite pointed metric spaces.

Norms come from the Lipschitz-function LP

    ||mu|| = max { sum_p a_p f(p) : f(0) = 0, f(p) - f(q) <= d(p, q) },

whose optimal f doubles as a norming function.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import InputError, InvariantViolation, ResourceError
from .optcore import LinearProgram, solve_lp

TRIANGLE_TOL = 1e-12
MAX_POINTS = 160
DELTA_FACTORS = (1e-1, 1e-2, 1e-3)


class FiniteMetricSpace:
    """Labelled points with a distance matrix and a distinguished base point."""

    def __init__(self, labels: Sequence, dist, base="0"):
        labels = [str(l) for l in labels]
        if len(set(labels)) != len(labels):
            raise InputError("point labels must be distinct")
        D = np.asarray(dist, dtype=float)
        n = len(labels)
        if D.shape != (n, n):
            raise InputError("distance matrix must be square with one row per point")
        if not np.all(np.isfinite(D)):
            raise InputError("distances must be finite")
        if np.any(np.diag(D) != 0.0):
            raise InputError("d(p, p) must be 0")
        if np.max(np.abs(D - D.T)) > 0.0:
            raise InputError("distance matrix must be symmetric")
        off = D[~np.eye(n, dtype=bool)]
        if off.size and off.min() <= 0.0:
            raise InputError("distinct points must be at positive distance")
        if n > 2:
            # d(i,j) <= d(i,k) + d(k,j) for every k
            viol = D[:, None, :] - (D[:, :, None] + D[None, :, :])
            if viol.max() > TRIANGLE_TOL * max(1.0, D.max()):
                raise InputError("distances violate the triangle inequality")
        base = str(base)
        if base not in labels:
            raise InputError(f"base point {base!r} is not a label")
        self.labels = labels
        self.dist = D
        self.base = base
        self.index = {l: i for i, l in enumerate(labels)}
        self._base_idx = self.index[base]
        self.free_points = [i for i in range(n) if i != self._base_idx]
        self._slot = {p: k for k, p in enumerate(self.free_points)}
        self._lp_cache = None

    def __len__(self):
        return len(self.labels)

    def d(self, p, q) -> float:
        return float(self.dist[self.idx(p), self.idx(q)])

    def idx(self, label) -> int:
        try:
            return self.index[str(label)]
        except KeyError:
            raise InputError(f"unknown point {label!r}") from None

    @classmethod
    def from_dict(cls, data: Mapping) -> "FiniteMetricSpace":
        if not isinstance(data, Mapping):
            raise InputError("metric space must be a JSON object")
        extra = set(data) - {"points", "base", "dist"}
        if extra:
            raise InputError(f"unknown keys in metric space: {sorted(extra)}")
        if "points" not in data or "dist" not in data:
            raise InputError("metric space needs 'points' and 'dist'")
        return cls(data["points"], data["dist"], data.get("base", "0"))

    def to_dict(self) -> dict:
        return {"points": list(self.labels), "base": self.base, "dist": self.dist.tolist()}

    @classmethod
    def from_points(cls, labels: Sequence, coords, base="0") -> "FiniteMetricSpace":
        """Euclidean distances between the given coordinates."""
        X = np.asarray(coords, dtype=float)
        D = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
        return cls(labels, D, base)

    def restrict(self, labels: Iterable) -> "FiniteMetricSpace":
        keep = [self.idx(l) for l in labels]
        if self._base_idx not in keep:
            raise InputError("a subspace must keep the base point")
        return FiniteMetricSpace([self.labels[i] for i in keep], self.dist[np.ix_(keep, keep)],
                                 self.base)

    # -- the Lipschitz LP skeleton, shared by every norm on this space ---------
    def _lp_rows(self):
        """Constraint rows f(p) - f(q) <= d(p, q) for ordered pairs not implied by others.

        A pair is dropped when some r lies metrically between p and q; its
        constraint then follows from the two shorter ones.
        """
        if self._lp_cache is not None:
            return self._lp_cache
        D = self.dist
        n = len(self)
        b = self._base_idx
        rows, rhs = [], []
        lo = -D[self.free_points, b]
        for i in range(n):
            for j in range(n):
                if i == j or i == b:
                    continue  # rows with p = base duplicate the variable lower bounds
                via = D[i] + D[:, j]
                via[[i, j]] = np.inf
                if via.min() <= D[i, j] * (1.0 + 1e-13):
                    continue
                r = np.zeros(n - 1)
                r[self._slot[i]] = 1.0
                if j != b:
                    r[self._slot[j]] = -1.0
                rows.append(r)
                rhs.append(D[i, j])
        self._lp_cache = (np.array(rows).reshape(len(rows), n - 1), np.array(rhs), lo)
        return self._lp_cache


def load_metric_space(path: str) -> FiniteMetricSpace:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read metric space file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"metric space file {path} is not valid JSON: {exc}") from exc
    return FiniteMetricSpace.from_dict(data)


def random_metric_space(size: int, rng: np.random.Generator, kind: str = "euclidean") -> FiniteMetricSpace:
    """Random test spaces: planar Euclidean points, or shortest paths of a random weighted graph."""
    if size < 2:
        raise InputError("need at least two points")
    labels = ["0"] + [f"p{i}" for i in range(1, size)]
    if kind == "euclidean":
        while True:
            X = rng.uniform(0.0, 1.0, size=(size, 2))
            D = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
            if D[~np.eye(size, dtype=bool)].min() > 1e-3:
                return FiniteMetricSpace(labels, D)
    if kind == "graph":
        W = rng.uniform(0.1, 1.0, size=(size, size))
        W = np.triu(W, 1)
        W = W + W.T
        for k in range(size):
            W = np.minimum(W, W[:, k:k + 1] + W[k:k + 1, :])
        np.fill_diagonal(W, 0.0)
        return FiniteMetricSpace(labels, W)
    raise InputError(f"unknown metric space kind {kind!r}")


class FreeElement:
    """A finitely supported sum of point evaluations; the base point carries no mass."""

    def __init__(self, space: FiniteMetricSpace, support: Iterable = ()):
        self.space = space
        w = np.zeros(len(space) - 1)
        for label, weight in (support.items() if isinstance(support, Mapping) else support):
            weight = float(weight)
            if not math.isfinite(weight):
                raise InputError("weights must be finite")
            i = space.idx(label)
            if i == space._base_idx:
                continue
            w[space._slot[i]] += weight
        self.weights = w

    @classmethod
    def _raw(cls, space, w) -> "FreeElement":
        e = cls.__new__(cls)
        e.space, e.weights = space, np.asarray(w, dtype=float)
        return e

    @property
    def support(self) -> list[tuple[str, float]]:
        return [(self.space.labels[p], float(self.weights[k]))
                for k, p in enumerate(self.space.free_points) if self.weights[k] != 0.0]

    def _check(self, other: "FreeElement"):
        if other.space is not self.space:
            raise InputError("elements live on different metric spaces")

    def __add__(self, other):
        self._check(other)
        return FreeElement._raw(self.space, self.weights + other.weights)

    def __sub__(self, other):
        self._check(other)
        return FreeElement._raw(self.space, self.weights - other.weights)

    def __neg__(self):
        return FreeElement._raw(self.space, -self.weights)

    def __mul__(self, c: float):
        return FreeElement._raw(self.space, float(c) * self.weights)

    __rmul__ = __mul__

    def __repr__(self):
        return f"FreeElement({self.support})"


@dataclass
class Molecule:
    u: str
    v: str
    element: FreeElement


def molecule(space: FiniteMetricSpace, u, v) -> Molecule:
    """(delta_u - delta_v) / d(u, v)."""
    u, v = str(u), str(v)
    if space.idx(u) == space.idx(v):
        raise InputError("a molecule needs two distinct points")
    d = space.d(u, v)
    return Molecule(u, v, FreeElement(space, [(u, 1.0 / d), (v, -1.0 / d)]))


def _as_element(space, mu) -> FreeElement:
    if isinstance(mu, Molecule):
        mu = mu.element
    if not isinstance(mu, FreeElement):
        mu = FreeElement(space, mu)
    if mu.space is not space:
        raise InputError("element does not live on this metric space")
    return mu


def free_norm_with_function(space: FiniteMetricSpace, mu) -> tuple[float, dict]:
    """The norm together with a norming 1-Lipschitz function (labels to values, f(base) = 0)."""
    mu = _as_element(space, mu)
    if not np.any(mu.weights):
        return 0.0, {l: 0.0 for l in space.labels}
    if len(space) > MAX_POINTS:
        raise ResourceError(f"metric space has more than {MAX_POINTS} points")
    rows, rhs, lo = space._lp_rows()
    lp = LinearProgram(mu.weights, rows, ["<="] * len(rhs), rhs,
                       [(float(l), None) for l in lo], maximize=True)
    res = solve_lp(lp)
    if res.status != "optimal":
        raise InvariantViolation(f"free-norm LP ended with status {res.status}")
    f = {space.base: 0.0}
    for k, p in enumerate(space.free_points):
        f[space.labels[p]] = float(res.solution[k])
    return res.value, f


def free_norm(space: FiniteMetricSpace, mu) -> float:
    return free_norm_with_function(space, mu)[0]


# ---------------------------------------------------------------------------
# Pairs of molecules
# ---------------------------------------------------------------------------

@dataclass
class PairNorm:
    value: float
    formula_applies: bool
    formula: Optional[float]
    eps: float


def _pair_gap(space, x, y, u, v) -> float:
    """Smallest eps for which d(x,v)+d(u,y) >= d(x,y)+d(u,v) - eps*max{d(x,y), d(u,v)}."""
    dxy, duv = space.d(x, y), space.d(u, v)
    return (dxy + duv - space.d(x, v) - space.d(u, y)) / max(dxy, duv)


def molecule_pair_norm(space: FiniteMetricSpace, xy: Sequence, uv: Sequence,
                       tol: float = 1e-7) -> PairNorm:
    """||m_{x,y} + m_{u,v}|| by LP, and the closed form in the regime where it holds.

    The closed form (d(x,v)+d(u,y)+|d(x,y)-d(u,v)|)/max{d(x,y), d(u,v)} equals
    2 - eps with eps the smallest admissible slack; it applies when eps >= 0 and
    the LP value reaches 2 - eps.
    """
    (x, y), (u, v) = (str(a) for a in xy), (str(a) for a in uv)
    mxy, muv = molecule(space, x, y), molecule(space, u, v)
    value = free_norm(space, mxy.element + muv.element)
    eps = _pair_gap(space, x, y, u, v)
    dxy, duv = space.d(x, y), space.d(u, v)
    closed = (space.d(x, v) + space.d(u, y) + abs(dxy - duv)) / max(dxy, duv)
    applies = eps >= 0.0 and value >= 2.0 - eps - tol
    return PairNorm(value, applies, closed if applies else None, eps)


@dataclass
class DistanceBound:
    lhs: float
    rhs: float
    passed: bool


def molecule_distance_bound(space: FiniteMetricSpace, uv: Sequence, xy: Sequence) -> DistanceBound:
    """||m_{u,v} - m_{x,y}|| <= 2 (d(x,u) + d(y,v)) / max{d(x,y), d(u,v)}."""
    (u, v), (x, y) = (str(a) for a in uv), (str(a) for a in xy)
    lhs = free_norm(space, molecule(space, u, v).element - molecule(space, x, y).element)
    rhs = 2.0 * (space.d(x, u) + space.d(y, v)) / max(space.d(x, y), space.d(u, v))
    return DistanceBound(lhs, rhs, lhs <= rhs + 1e-9)


# ---------------------------------------------------------------------------
# Metric intervals and denting molecules
# ---------------------------------------------------------------------------

def interval_delta(space: FiniteMetricSpace, u, v, delta: float) -> list[str]:
    """Points p with d(u,p) + d(v,p) < d(u,v) + delta."""
    if delta <= 0:
        raise InputError("delta must be positive")
    i, j = space.idx(u), space.idx(v)
    if i == j:
        raise InputError("u and v must differ")
    s = space.dist[i] + space.dist[j]
    return [space.labels[k] for k in np.flatnonzero(s < space.dist[i, j] + delta)]


def _ball(space, u, r) -> set:
    i = space.idx(u)
    return {space.labels[k] for k in np.flatnonzero(space.dist[i] < r)}


@dataclass
class DentingCertificate:
    denting: bool
    r: Optional[float] = None
    s: Optional[float] = None
    delta: Optional[float] = None


def _radius_grid(space) -> np.ndarray:
    """Half and quarter of every distinct distance (quarters keep r + s < d(u,v) reachable)."""
    D = np.unique(space.dist[np.triu_indices(len(space), 1)])
    return np.unique(np.concatenate([D / 2.0, D / 4.0]))


def denting_certificate(space: FiniteMetricSpace, u, v) -> DentingCertificate:
    """Certify m_{u,v} denting: singleton balls around u and v covering some [u,v]_delta.

    Scans r, s over halves and quarters of the distinct distances and delta over fixed fractions
    of d(u,v); a negative answer means "not found at this resolution".
    """
    u, v = str(u), str(v)
    i, j = space.idx(u), space.idx(v)
    if i == j:
        raise InputError("u and v must differ")
    duv = space.dist[i, j]
    near_u = np.delete(space.dist[i], i).min()
    near_v = np.delete(space.dist[j], j).min()
    grid = _radius_grid(space)
    rs = grid[grid <= near_u][::-1]
    ss = grid[grid <= near_v][::-1]
    for fac in DELTA_FACTORS:
        delta = fac * duv
        if set(interval_delta(space, u, v, delta)) != {u, v}:
            continue
        for r in rs:
            for s in ss:
                if r + s < duv:
                    return DentingCertificate(True, float(r), float(s), float(delta))
    return DentingCertificate(False)


# ---------------------------------------------------------------------------
# Finite checks of the dc characterisation
# ---------------------------------------------------------------------------

@dataclass
class CharacterizationReport:
    alpha: float
    alpha_upper: float
    consistent: bool
    coverage_instances: int
    denting_molecules: int
    violations: list = field(default_factory=list)


def check_dc_characterization(space: FiniteMetricSpace, mu, alpha: float,
                              pairs: Optional[Sequence] = None) -> CharacterizationReport:
    """Test the finite instances of the dc criterion for a unit element ``mu``.

    Two kinds of constraints on dc(mu) are collected:
      * coverage: if [u,v]_delta lies in B(u, r d(u,v)) u B(v, s d(u,v)) then
        dc(mu) >= alpha forces ||mu - m_{u,v}|| >= alpha - 2(r+s);
      * denting molecules nu (certified as above) force ||mu - nu|| >= alpha.
    ``alpha_upper`` is the largest alpha compatible with all of them, an upper
    estimate for dc(mu). Coverage is only tested on a finite grid.
    """
    mu = _as_element(space, mu)
    n = free_norm(space, mu)
    if abs(n - 1.0) > 1e-9:
        raise InputError(f"mu must have norm 1 (got {n!r})")
    if not 0.0 < alpha <= 2.0:
        raise InputError("alpha must lie in (0, 2]")
    if pairs is None:
        pairs = [(a, b) for a in space.labels for b in space.labels if a != b]
    grid = _radius_grid(space)
    dist_cache: dict = {}

    def dist_to(a, b):
        if (a, b) not in dist_cache:
            dist_cache[(a, b)] = free_norm(space, mu - molecule(space, a, b).element)
        return dist_cache[(a, b)]

    upper = 2.0
    count = dent = 0
    violations = []
    for a, b in pairs:
        a, b = str(a), str(b)
        duv = space.d(a, b)
        cert = denting_certificate(space, a, b)
        if cert.denting:
            dent += 1
            dist = dist_to(a, b)
            upper = min(upper, dist)
            if dist < alpha - 1e-9:
                violations.append(("denting", a, b, dist))
        best = None
        for fac in DELTA_FACTORS:
            inside = interval_delta(space, a, b, fac * duv)
            du = np.array([space.d(a, p) for p in inside])
            dv = np.array([space.d(b, p) for p in inside])
            for r in grid:
                need = (du >= r)
                # smallest grid s whose ball around b picks up the rest
                rest = dv[need]
                s_abs = grid[grid > rest.max()][0] if rest.size and np.any(grid > rest.max()) else (
                    grid[0] if rest.size == 0 else None)
                if s_abs is None:
                    continue
                rs = (r + s_abs) / duv
                count += 1
                if best is None or rs < best:
                    best = rs
        if best is not None:
            dist = dist_to(a, b)
            upper = min(upper, dist + 2.0 * best)
            if dist < alpha - 2.0 * best - 1e-9:
                violations.append(("coverage", a, b, dist))
    return CharacterizationReport(alpha, upper, alpha <= upper + 1e-9, count, dent, violations)


# ---------------------------------------------------------------------------
# The ladder: a segment with rungs accumulating at it
# ---------------------------------------------------------------------------

def ladder_space(N: int, grid_k: int) -> FiniteMetricSpace:
    """Segment [0,1]x{0} sampled at grid_k+1 points plus (1, 1/n), (0, 1/n) for n <= N.

    Labels: base "0" = (0,0), "s1".."s{k}" = (i/k, 0), "u{n}" = (1, 1/n), "v{n}" = (0, 1/n).
    """
    if int(N) != N or N < 1 or int(grid_k) != grid_k or grid_k < 2:
        raise InputError("need N >= 1 and grid_k >= 2")
    if grid_k + 1 + 2 * N > MAX_POINTS:
        raise ResourceError(f"ladder with {grid_k + 1 + 2 * N} points exceeds the cap of {MAX_POINTS}")
    labels = ["0"] + [f"s{i}" for i in range(1, grid_k + 1)]
    coords = [(0.0, 0.0)] + [(i / grid_k, 0.0) for i in range(1, grid_k + 1)]
    for n in range(1, N + 1):
        labels += [f"u{n}", f"v{n}"]
        coords += [(1.0, 1.0 / n), (0.0, 1.0 / n)]
    return FiniteMetricSpace.from_points(labels, coords)


@dataclass
class DeltaCertificate:
    value: float
    mean_error: float
    witnesses: list


def segment_delta_certificate(space: FiniteMetricSpace, path: Sequence) -> DeltaCertificate:
    """Delta lower bound for m_{end, start} along a metric path start = p_0, ..., p_k = end.

    The edge molecules m_{p_i, p_{i-1}} average to m_{end,start} when the path
    is geodesic with equal steps; the certificate is the smallest distance
    from a witness to the target, with the averaging error reported.
    """
    path = [str(p) for p in path]
    k = len(path) - 1
    if k < 1:
        raise InputError("path needs two points")
    target = molecule(space, path[-1], path[0]).element
    wits = [molecule(space, path[i], path[i - 1]).element for i in range(1, k + 1)]
    mean = FreeElement._raw(space, sum(w.weights for w in wits) / k)
    err = free_norm(space, mean - target)
    dists = [free_norm(space, w - target) for w in wits]
    return DeltaCertificate(min(dists), err, dists)


@dataclass
class LadderRow:
    n: int
    distance: float
    bound_4_over_n: float
    denting: bool
    delta_cert: float


def ladder_experiment(N: int, grid_k: int, threads: int = 1) -> list[LadderRow]:
    """Per rung n: ||m_{u_n,v_n} - m_{x,y}||, 4/n, a denting certificate, and the Delta certificate."""
    M = ladder_space(N, grid_k)
    x, y = f"s{grid_k}", "0"
    mxy = molecule(M, x, y).element
    M._lp_rows()  # build the shared LP skeleton once before threads use it
    cert = segment_delta_certificate(M, ["0"] + [f"s{i}" for i in range(1, grid_k + 1)])
    if cert.mean_error > 1e-9:
        raise InvariantViolation("segment witnesses do not average to the target molecule")

    def row(n: int) -> LadderRow:
        dist = free_norm(M, molecule(M, f"u{n}", f"v{n}").element - mxy)
        dent = denting_certificate(M, f"u{n}", f"v{n}").denting
        return LadderRow(n, dist, 4.0 / n, dent, cert.value)

    ns = range(1, N + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(row, ns))
    return [row(n) for n in ns]
