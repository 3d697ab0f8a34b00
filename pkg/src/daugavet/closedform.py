"""Closed-form values and explicit witnesses for sup-norm, L1-type and Hilbert points.

The c0 witness construction runs in exact rational arithmetic so that "the
witnesses average to x" is an identity rather than a tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np

from .errors import InputError
from .spaces import NormedSpace, as_vector

Number = Union[float, Fraction]


@dataclass
class FormulaValue:
    value: float
    flag: str = ""


def _sup(x) -> float:
    return float(np.max(np.abs(x))) if len(x) else 0.0


def _require_sup_ball(x):
    x = as_vector(x)
    if _sup(x) > 1.0 + 1e-12:
        raise InputError("point must lie in the sup-norm unit ball")
    return x


# ---------------------------------------------------------------------------
# Sup-norm spaces
# ---------------------------------------------------------------------------

def dc_linf_n(x) -> float:
    """dc(x) = max_n (1 - |x_n|) in l_inf^N; for N = 2 this is also Delta(x)."""
    x = _require_sup_ball(x)
    return float(np.max(1.0 - np.abs(x)))


def dec_linf_plane(x) -> float:
    """Delta(x) in l_inf^2, which coincides with dc(x) there."""
    x = _require_sup_ball(x)
    if x.size != 2:
        raise InputError("the planar formula needs exactly two coordinates")
    return dc_linf_n(x)


def dc_c0(x) -> float:
    """Every point of the c0 unit ball has dc = 1, whatever its coordinates."""
    _require_sup_ball(x)
    return 1.0


def f_n(t: Number, n: int) -> Number:
    """Piecewise profile 1+|t| below 1-2/n and (n-1)(1-|t|) above; exact on Fractions."""
    if int(n) != n or n < 3:
        raise InputError("n must be an integer >= 3")
    if abs(t) > 1:
        raise InputError("|t| must be at most 1")
    a = abs(t)
    if isinstance(t, Rational):
        if a <= 1 - Fraction(2, n):
            return 1 + a
        return (n - 1) * (1 - a)
    if a <= 1.0 - 2.0 / n:
        return 1.0 + a
    return (n - 1) * (1.0 - a)


@dataclass
class C0Witnesses:
    x: list
    indices: list
    n0: int
    witnesses: list
    bound: Fraction

    def mean_is_x(self) -> bool:
        n = len(self.witnesses)
        return all(sum(w[j] for w in self.witnesses) / n == self.x[j] for j in range(len(self.x)))

    def in_unit_ball(self) -> bool:
        return all(abs(c) <= 1 for w in self.witnesses for c in w)

    def far_enough(self) -> bool:
        for w, i in zip(self.witnesses, self.indices):
            dist = max(abs(a - b) for a, b in zip(w, self.x))
            if dist < f_n(self.x[i], self.n0):
                return False
        return True

    def as_array(self) -> np.ndarray:
        return np.array([[float(c) for c in w] for w in self.witnesses])


def _exact(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def dec_c0_witnesses(x: Sequence, indices: Sequence[int], n0: int) -> C0Witnesses:
    """n0 points of the c0 ball averaging to x, each far from x.

    ``indices`` are 0-based positions into ``x``. Coordinates with
    |x_i| <= 1 - 2/n0 (zeros included) get the "-1" construction, larger ones
    the "n0*x - (n0-1)" one. Negative coordinates are handled by flipping
    signs, building, and flipping back, which is an isometry of the sup norm.
    """
    if int(n0) != n0 or n0 < 3:
        raise InputError("n0 must be an integer >= 3")
    idx = [int(i) for i in indices]
    if len(idx) != n0 or len(set(idx)) != n0:
        raise InputError("indices must be n0 distinct positions")
    xs = [_exact(v) for v in x]
    if any(i < 0 or i >= len(xs) for i in idx):
        raise InputError("index out of range")
    if any(abs(v) > 1 for v in xs):
        raise InputError("point must lie in the sup-norm unit ball")
    sign = [Fraction(-1) if v < 0 else Fraction(1) for v in xs]
    y = [s * v for s, v in zip(sign, xs)]
    cut = 1 - Fraction(2, n0)
    low = [i for i in idx if y[i] <= cut]
    wit = []
    for k in idx:
        w = list(y)
        for j in idx:
            if j == k:
                w[j] = -1 if j in low else n0 * y[j] - (n0 - 1)
            elif j in low:
                w[j] = (n0 * y[j] + 1) / (n0 - 1)
            else:
                w[j] = Fraction(1)
        wit.append([s * c for s, c in zip(sign, w)])
    bound = min(f_n(xs[i], n0) for i in idx)
    return C0Witnesses(xs, idx, n0, wit, bound)


def dec_c0_uniform(t: Number, n: int) -> Number:
    """Delta of t*(e_1 + ... + e_n) in c0: min{1+|t|, max{1, (1-|t|)(n-1)}}."""
    if int(n) != n or n < 1:
        raise InputError("n must be a positive integer")
    if abs(t) > 1:
        raise InputError("|t| must be at most 1")
    a = abs(t)
    return min(1 + a, max(1, (1 - a) * (n - 1)))


def dec_linf3_lower(x) -> float:
    """Lower bound max{min f_3(x_i), 1 - |x_i|} for Delta in l_inf^3."""
    x = _require_sup_ball(x)
    if x.size != 3:
        raise InputError("this bound is for three coordinates")
    return float(max(min(f_n(float(t), 3) for t in x), float(np.max(1.0 - np.abs(x)))))


def wdc_linf(prefix, tail_limsup: float) -> float:
    """Weak-star dc of an l_inf point given by a finite head and the limsup of its tail."""
    prefix = as_vector(prefix) if len(prefix) else np.zeros(0)
    if _sup(prefix) > 1.0 or not 0.0 <= abs(tail_limsup) <= 1.0:
        raise InputError("entries and tail limsup must lie in [-1, 1]")
    return 1.0 + abs(float(tail_limsup))


# ---------------------------------------------------------------------------
# Atomic L1, Hilbert and LUR points
# ---------------------------------------------------------------------------

def _weighted_input(coeffs, weights):
    c, w = as_vector(coeffs), as_vector(weights)
    if c.size != w.size:
        raise InputError("coefficients and weights differ in length")
    if np.any(w <= 0):
        raise InputError("weights must be positive")
    if float(w @ np.abs(c)) > 1.0 + 1e-12:
        raise InputError("point must lie in the unit ball")
    return c, w


def dc_weighted_l1(coeffs, weights) -> float:
    """1 + ||f|| - 2 max_n |c_n| w_n; equal to both dc and Delta in atomic L1."""
    c, w = _weighted_input(coeffs, weights)
    mass = np.abs(c) * w
    return float(1.0 + mass.sum() - 2.0 * mass.max())


def dec_upper_atom(coeffs, weights, atom_index: int) -> float:
    """Upper bound 1 + ||f|| - 2 |c_A| w_A for Delta coming from the slice at atom A."""
    c, w = _weighted_input(coeffs, weights)
    if not 0 <= atom_index < c.size or c[atom_index] == 0.0:
        raise InputError("atom index must point into the support")
    mass = np.abs(c) * w
    return float(1.0 + mass.sum() - 2.0 * mass[atom_index])


def dc_lur(x) -> float:
    """dc(x) = 1 - ||x|| at locally uniformly rotund points (Euclidean norm here)."""
    x = as_vector(x)
    n = float(np.linalg.norm(x))
    if n > 1.0 + 1e-12:
        raise InputError("point must lie in the unit ball")
    return 1.0 - n


def dec_hilbert(x) -> FormulaValue:
    """sqrt(1 - ||x||^2) in a Hilbert space of dimension >= 2; 1 - |x| on the line."""
    x = as_vector(x)
    n = float(np.linalg.norm(x))
    if n > 1.0 + 1e-12:
        raise InputError("point must lie in the unit ball")
    if x.size == 1:
        return FormulaValue(1.0 - n, "one-dimensional: Delta = 1 - |x|")
    return FormulaValue(math.sqrt(max(1.0 - n * n, 0.0)))


def dec_upper_extreme(space: NormedSpace, x) -> FormulaValue:
    """1 + max{|e*(x)| : e* extreme in the dual ball, |e*(x)| < 1}, for x on the sphere.

    Returns 2 with a "vacuous" flag when every extreme functional norms x.
    """
    x = as_vector(x, space.dim)
    if abs(space.norm(x) - 1.0) > 1e-9:
        raise InputError("the extreme-functional bound is stated for points of the unit sphere")
    vals = np.abs(space.dual_vertices() @ x)
    below = vals[vals < 1.0 - 1e-9]
    if below.size == 0:
        return FormulaValue(2.0, "vacuous")
    return FormulaValue(float(1.0 + below.max()))


def dec_linf_bracket(x) -> tuple[float, float]:
    """(lower, upper) for Delta in l_inf^3: closed lower bound and extreme-functional upper bound.

    Off the sphere the upper bound falls back to the trivial 1 + ||x||.
    """
    from .spaces import LpSpace
    x = _require_sup_ball(x)
    lo = dec_linf3_lower(x)
    if abs(_sup(x) - 1.0) <= 1e-9:
        hi = dec_upper_extreme(LpSpace(math.inf, 3), x).value
    else:
        hi = 1.0 + _sup(x)
    return lo, hi


# ---------------------------------------------------------------------------
# Figures: the three curves as (t, value) tables on t = k/100, k = 0..100
# ---------------------------------------------------------------------------

def t_grid(points: int = 101) -> list[float]:
    return [k / (points - 1) for k in range(points)]


def figure_curve(which: int, n: int = 3, points: int = 101) -> list[tuple[float, float]]:
    """Figure 1: dc((2/3,2/3,t)); Figure 2: lower bound for Delta((2/3,2/3,t));
    Figure 3: Delta(t*(e_1+...+e_n)) in c0."""
    rows = []
    for t in t_grid(points):
        if which == 1:
            v = dc_linf_n([2 / 3, 2 / 3, t])
        elif which == 2:
            v = dec_linf3_lower([2 / 3, 2 / 3, t])
        elif which == 3:
            v = float(dec_c0_uniform(t, n))
        else:
            raise InputError("figure must be 1, 2 or 3")
        rows.append((t, float(v)))
    return rows


def render_svg(rows: list[tuple[float, float]], title: str, width: int = 400, height: int = 300) -> str:
    """A bare polyline plot with axes, ymax fixed at 2."""
    pad = 30
    sx = lambda t: pad + t * (width - 2 * pad)
    sy = lambda v: height - pad - v / 2.0 * (height - 2 * pad)
    pts = " ".join(f"{sx(t):.2f},{sy(v):.2f}" for t, v in rows)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<text x="{pad}" y="18" font-size="12">{title}</text>\n'
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>\n'
        f'<text x="{pad - 4}" y="{sy(1) + 4:.2f}" font-size="10" text-anchor="end">1</text>\n'
        f'<text x="{pad - 4}" y="{sy(2) + 4:.2f}" font-size="10" text-anchor="end">2</text>\n'
        f'<text x="{width - pad}" y="{height - pad + 14}" font-size="10">t=1</text>\n'
        f'<polyline fill="none" stroke="blue" stroke-width="1.5" points="{pts}"/>\n'
        "</svg>\n"
    )
