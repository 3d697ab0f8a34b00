"""NumPy versions of the compiled loops in ``_kernels.pyx``.

Same signatures and the same results up to floating-point summation order.
"""
from __future__ import annotations

import numpy as np


def _combine(s, t, p: float):
    if p == np.inf:
        return np.maximum(s, t)
    if p == 1.0:
        return s + t
    return (np.abs(s) ** p + np.abs(t) ** p) ** (1.0 / p)


def gauge_norms(Z: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Row-wise max_g g.z for a polyhedral gauge given by the rows of G."""
    if G.shape[0] == 0:
        return np.zeros(Z.shape[0])
    return (Z @ G.T).max(axis=1)


def _gauge(GX, GV):
    """max over g of GX[g] - GV[g, ...] along the first axis."""
    if GV.shape[0] == 0:
        return np.zeros(GV.shape[1:])
    return (GX.reshape((-1,) + (1,) * (GV.ndim - 1)) - GV).max(axis=0)


def region_max(F, L, V, E, G, x):
    """For each row s: max of the gauge distance to x over conv(V) cut by F[s].y >= L[s]."""
    GX = G @ x
    GV = G @ V.T                                   # (ng, nv)
    DV = _gauge(GX, GV)                            # (nv,)
    gap = F @ V.T - L[:, None]                     # (S, nv)
    inside = gap >= 0.0
    out = np.where(inside, DV[None, :], -np.inf).max(axis=1) if V.shape[0] else np.full(len(F), -np.inf)
    if len(E):
        i, j = E[:, 0], E[:, 1]
        gi, gj = gap[:, i], gap[:, j]              # (S, ne)
        cut = (gi >= 0.0) != (gj >= 0.0)
        if cut.any():
            s_idx, e_idx = np.nonzero(cut)
            gi_c, gj_c = gi[s_idx, e_idx], gj[s_idx, e_idx]
            t = gi_c / (gi_c - gj_c)
            ii, jj = i[e_idx], j[e_idx]
            vals = _gauge(GX, (1.0 - t) * GV[:, ii] + t * GV[:, jj])
            np.maximum.at(out, s_idx, vals)
    return out


def product_region_max(FL, FR, L, x1, x2, VL, EL, VR, ER, GL, GR, p, A, B):
    """Region maximum over the union of products a*B_L x b*B_R for curve points (a, b)."""
    S, K = A.shape
    GLX, GRX = GL @ x1, GR @ x2
    GLV, GRV = GL @ VL.T, GR @ VR.T
    out = np.full(S, -np.inf)
    arg = np.zeros(S, dtype=np.int64)
    for s in range(S):
        PL = VL @ FL[s]
        PR = VR @ FR[s]
        for q in range(K):
            a, b = A[s, q], B[s, q]
            DL = _gauge(GLX, a * GLV)
            DR = _gauge(GRX, b * GRV)
            gap = a * PL[:, None] + b * PR[None, :] - L[s]       # (nl, nr)
            best = -np.inf
            ok = gap >= 0.0
            if ok.any():
                best = float(np.max(np.where(ok, _combine(DL[:, None], DR[None, :], p), -np.inf)))
            if len(EL):
                i, i2 = EL[:, 0], EL[:, 1]
                gi, gj = gap[i, :], gap[i2, :]                   # (nel, nr)
                cut = (gi >= 0.0) != (gj >= 0.0)
                if cut.any():
                    e_idx, j_idx = np.nonzero(cut)
                    t = gi[e_idx, j_idx] / (gi[e_idx, j_idx] - gj[e_idx, j_idx])
                    nl = _gauge(GLX, a * ((1.0 - t) * GLV[:, i[e_idx]] + t * GLV[:, i2[e_idx]]))
                    best = max(best, float(np.max(_combine(nl, DR[j_idx], p))))
            if len(ER):
                j, j2 = ER[:, 0], ER[:, 1]
                gi, gj = gap[:, j], gap[:, j2]                   # (nl, ner)
                cut = (gi >= 0.0) != (gj >= 0.0)
                if cut.any():
                    i_idx, e_idx = np.nonzero(cut)
                    t = gi[i_idx, e_idx] / (gi[i_idx, e_idx] - gj[i_idx, e_idx])
                    nr = _gauge(GRX, b * ((1.0 - t) * GRV[:, j[e_idx]] + t * GRV[:, j2[e_idx]]))
                    best = max(best, float(np.max(_combine(DL[i_idx], nr, p))))
            if best > out[s]:
                out[s] = best
                arg[s] = q
    return out, arg
