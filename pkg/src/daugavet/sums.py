"""Bounds for dc and Delta of points in absolute sums X (+)_N Y, plus a brute-force check.

Bound identifiers:

=================  =========  ==================================================
id                 side       statement
=================  =========  ==================================================
gamma_lower        lower_dc   2*gamma*(min of component dc at normalised parts - 1)
l1_lower           lower_dc   l1 profile: min of component dc at normalised parts
linf_lower         lower_dc   linf profile: dc of a unit-norm component
octahedral_lower   lower_dc   2*(min dc - 1) at (a*x, b*y), (a, b) an octahedral witness
gamma_upper        upper_dc   N(1,1) at (x,0) or (0,y) when the free axis is extreme
dec_min_lower      lower_dec  min of component Delta for a decomposition (a*x, b*y)
dec_linf_lower     lower_dec  linf profile: min of Delta at the raw components
dec_l1_equality    equality   l1 profile: Delta((x,0)) = Delta(x)
=================  =========  ==================================================
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import (ConstantEstimate, SearchConfig, _delta_closed_form, dc_value,
                        dec_sampled)
from .errors import InputError
from .spaces import AbsoluteNormProfile, NormedSpace, SumSpace, as_vector

ON_SPHERE_TOL = 1e-9
OCTAHEDRAL_TOL = 1e-8


@dataclass
class BoundEntry:
    bound_id: str
    side: str
    applicable: bool
    bound: Optional[float] = None
    reason: str = ""


@dataclass
class StabilityReport:
    trial: int
    point: np.ndarray
    entries: list
    dc: ConstantEstimate
    dec: ConstantEstimate
    component_values: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)


def _norms(spaceX, spaceY, x, y):
    return spaceX.norm(x), spaceY.norm(y)


def _zero(v) -> bool:
    return float(np.max(np.abs(v))) == 0.0 if v.size else True


def dc_sum_upper(profile: AbsoluteNormProfile, which: str) -> Optional[float]:
    """N(1,1) bounds dc((x,0)) (``left_unit``) or dc((0,y)) (``right_unit``) when the
    other axis point is extreme in the profile ball; None otherwise."""
    if which == "left_unit":
        return profile.Gamma if profile.left_axis_extreme else None
    if which == "right_unit":
        return profile.Gamma if profile.right_axis_extreme else None
    raise InputError("which must be left_unit or right_unit")


def octahedral_fit(profile: AbsoluteNormProfile, a: float, b: float) -> float:
    """Residual of the two octahedral equalities at (a, b)."""
    return profile.octahedral_residual(a, b)


def aoh_analyze(profile: AbsoluteNormProfile) -> dict:
    """c, d and a verified octahedral witness (or None) for the profile."""
    w = profile.find_octahedral_witness()
    out = {"c": profile.c, "d": profile.d, "witness": None, "residual": None,
           "family": None}
    if w is not None:
        a, b, r = w
        out.update(witness=(a, b), residual=r)
    if profile.kind == "l1":
        out["family"] = "every (a, b) >= 0 with a + b = 1"
    return out


def dc_sum_lower_bounds(spaceX: NormedSpace, spaceY: NormedSpace, profile: AbsoluteNormProfile,
                        x, y, dcx: Optional[float], dcy: Optional[float]) -> list[BoundEntry]:
    """Lower (and upper) bounds for dc((x, y)) on the sphere of X (+)_N Y.

    ``dcx`` and ``dcy`` are the constants of the normalised components x/||x||
    and y/||y|| (ignored when that component is zero).
    """
    x, y = as_vector(x, spaceX.dim), as_vector(y, spaceY.dim)
    nx, ny = _norms(spaceX, spaceY, x, y)
    if abs(float(profile(nx, ny)) - 1.0) > ON_SPHERE_TOL:
        raise InputError("(x, y) must lie on the unit sphere of the sum")
    xz, yz = _zero(x), _zero(y)
    out: list[BoundEntry] = []
    g = profile.gamma

    # gamma lower bound
    if not xz and not yz:
        out.append(BoundEntry("gamma_lower", "lower_dc", True, 2 * g * (min(dcx, dcy) - 1.0)))
    elif yz:
        out.append(BoundEntry("gamma_lower", "lower_dc", True, 2 * g * (dcx - 1.0), "y = 0"))
    else:
        out.append(BoundEntry("gamma_lower", "lower_dc", True, 2 * g * (dcy - 1.0), "x = 0"))

    # l1 profile
    if profile.kind == "l1":
        if not xz and not yz:
            out.append(BoundEntry("l1_lower", "lower_dc", True, min(dcx, dcy)))
        elif yz:
            out.append(BoundEntry("l1_lower", "lower_dc", True, dcx, "y = 0"))
        else:
            out.append(BoundEntry("l1_lower", "lower_dc", True, dcy, "x = 0"))
    else:
        out.append(BoundEntry("l1_lower", "lower_dc", False, reason="profile is not l1"))

    # linf profile
    if profile.kind == "linf":
        cands = []
        if abs(nx - 1.0) <= ON_SPHERE_TOL:
            cands.append(dcx)
        if abs(ny - 1.0) <= ON_SPHERE_TOL:
            cands.append(dcy)
        out.append(BoundEntry("linf_lower", "lower_dc", True, max(cands),
                              "unit component(s) present"))
    else:
        out.append(BoundEntry("linf_lower", "lower_dc", False, reason="profile is not linf"))

    # octahedral witness at the point's own (a, b)
    res = profile.octahedral_residual(nx, ny)
    if res <= OCTAHEDRAL_TOL:
        if not xz and not yz:
            b = 2.0 * (min(dcx, dcy) - 1.0)
        elif yz:
            b = 2.0 * (dcx - 1.0)
        else:
            b = 2.0 * (dcy - 1.0)
        out.append(BoundEntry("octahedral_lower", "lower_dc", True, b))
    else:
        out.append(BoundEntry("octahedral_lower", "lower_dc", False,
                              reason=f"(||x||, ||y||) misses the octahedral equalities (residual {res:.3g})"))

    # upper bounds at axis points
    if yz:
        u = dc_sum_upper(profile, "left_unit")
        out.append(BoundEntry("gamma_upper", "upper_dc", u is not None, u,
                              "" if u is not None else "(0,1) is not extreme"))
    elif xz:
        u = dc_sum_upper(profile, "right_unit")
        out.append(BoundEntry("gamma_upper", "upper_dc", u is not None, u,
                              "" if u is not None else "(1,0) is not extreme"))
    else:
        out.append(BoundEntry("gamma_upper", "upper_dc", False, reason="both components nonzero"))
    return out


def dec_sum_lower_bounds(spaceX: NormedSpace, spaceY: NormedSpace, profile: AbsoluteNormProfile,
                         a: float, b: float, x, y, decx: Optional[float],
                         decy: Optional[float]) -> list[BoundEntry]:
    """Bounds for Delta((a*x, b*y)) with N(a, b) = 1 and x, y in the unit balls."""
    x, y = as_vector(x, spaceX.dim), as_vector(y, spaceY.dim)
    if a < 0 or b < 0 or abs(float(profile(a, b)) - 1.0) > ON_SPHERE_TOL:
        raise InputError("need a, b >= 0 with N(a, b) = 1")
    if spaceX.norm(x) > 1.0 + 1e-9 or spaceY.norm(y) > 1.0 + 1e-9:
        raise InputError("components must lie in the unit balls")
    out: list[BoundEntry] = []
    if b == 0.0:
        out.append(BoundEntry("dec_min_lower", "lower_dec", True, decx, "b = 0"))
    elif a == 0.0:
        out.append(BoundEntry("dec_min_lower", "lower_dec", True, decy, "a = 0"))
    else:
        out.append(BoundEntry("dec_min_lower", "lower_dec", True, min(decx, decy)))
    if profile.kind == "linf" and a == 1.0 and b == 1.0:
        out.append(BoundEntry("dec_linf_lower", "lower_dec", True, min(decx, decy)))
    if profile.kind == "l1" and b == 0.0:
        out.append(BoundEntry("dec_l1_equality", "equality_dec", True, decx, "second component zero"))
    return out


# ---------------------------------------------------------------------------
# Brute-force verification
# ---------------------------------------------------------------------------

def _component_dc(space: NormedSpace, v: np.ndarray, cfg: SearchConfig) -> tuple[float, str]:
    est = dc_value(space, v, cfg)
    return est.value, est.method


def _component_dec(space: NormedSpace, v: np.ndarray, cfg: SearchConfig) -> tuple[float, str]:
    cf = _delta_closed_form(space, v)
    if cf is not None:
        return cf, "closed_form"
    return dec_sampled(space, v, cfg).value, "sampled"


def _trial_point(sum_space: SumSpace, kind: str, rng: np.random.Generator) -> np.ndarray:
    X, Y = sum_space.left, sum_space.right
    if kind == "left":
        u = X.sample_sphere(1, rng)[0]
        return np.concatenate([u, np.zeros(Y.dim)])
    if kind == "right":
        w = Y.sample_sphere(1, rng)[0]
        return np.concatenate([np.zeros(X.dim), w])
    z = rng.standard_normal(sum_space.dim)
    return z / sum_space.norm(z)


def _one_trial(args) -> StabilityReport:
    sum_space, idx, seed, cfg, slack = args
    X, Y, prof = sum_space.left, sum_space.right, sum_space.profile
    rng = np.random.default_rng(seed)
    kind = ("generic", "left", "right")[idx % 3]
    z = _trial_point(sum_space, kind, rng)
    u, w = sum_space.split(z)
    nu, nw = X.norm(u), Y.norm(w)
    ux = u / nu if nu > 0 else u
    wy = w / nw if nw > 0 else w
    comp = {}
    dcx = dcy = decx = decy = None
    if nu > 0:
        dcx, comp["dc_x_method"] = _component_dc(X, ux, cfg)
        decx, comp["dec_x_method"] = _component_dec(X, ux, cfg)
    if nw > 0:
        dcy, comp["dc_y_method"] = _component_dc(Y, wy, cfg)
        decy, comp["dec_y_method"] = _component_dec(Y, wy, cfg)
    comp.update(dc_x=dcx, dc_y=dcy, dec_x=decx, dec_y=decy)
    entries = dc_sum_lower_bounds(X, Y, prof, u, w, dcx, dcy)
    entries += dec_sum_lower_bounds(X, Y, prof, nu, nw, ux, wy, decx, decy)
    if prof.kind == "linf" and abs(nu - 1.0) <= 1e-12 and abs(nw - 1.0) <= 1e-12:
        pass  # already covered by the normalised decomposition
    elif prof.kind == "linf":
        du, _ = _component_dec(X, u, cfg)
        dw, _ = _component_dec(Y, w, cfg)
        entries += [e for e in dec_sum_lower_bounds(X, Y, prof, 1.0, 1.0, u, w, du, dw)
                    if e.bound_id == "dec_linf_lower"]
    tcfg = SearchConfig(cfg.dual_samples, cfg.delta, cfg.refine_iters, int(rng.integers(2**31)), 1)
    dc = dc_value(sum_space, z, tcfg)
    dec = dec_sampled(sum_space, z, tcfg)
    rep = StabilityReport(idx, z, entries, dc, dec, comp)
    for e in entries:
        if not e.applicable:
            continue
        if e.side == "lower_dc" and e.bound > dc.value + slack:
            rep.violations.append((e.bound_id, e.bound, dc.value))
        elif e.side == "upper_dc" and e.bound < dc.value - slack:
            rep.violations.append((e.bound_id, e.bound, dc.value))
        elif e.side == "lower_dec" and e.bound > dec.value + slack:
            rep.violations.append((e.bound_id, e.bound, dec.value))
        elif e.side == "equality_dec" and abs(e.bound - dec.value) > slack:
            rep.violations.append((e.bound_id, e.bound, dec.value))
    if dc.value > dec.value + slack:
        rep.violations.append(("dc_at_most_dec", dc.value, dec.value))
    return rep


def verify_stability(spaceX: NormedSpace, spaceY: NormedSpace, profile: AbsoluteNormProfile,
                     trials: int, cfg: Optional[SearchConfig] = None,
                     slack: float = 0.05) -> list[StabilityReport]:
    """Check every applicable bound against brute-force dc/Delta on random sphere points.

    Trials cycle through generic points, points (x, 0) and points (0, y).
    Per-trial seeds come from the master seed, so the output does not
    depend on the thread count.
    """
    cfg = cfg or SearchConfig()
    S = SumSpace(spaceX, spaceY, profile)
    seeds = np.random.SeedSequence(cfg.seed).generate_state(max(trials, 1))
    inner = SearchConfig(cfg.dual_samples, cfg.delta, cfg.refine_iters, cfg.seed, 1)
    jobs = [(S, i, int(seeds[i]), inner, slack) for i in range(trials)]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(_one_trial, jobs))
    return [_one_trial(j) for j in jobs]
