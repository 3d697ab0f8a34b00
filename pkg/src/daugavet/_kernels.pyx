# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled loops for slice maximisation over polytope balls."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, pow, fabs

cnp.import_array()


cdef inline double _combine(double s, double t, double p) noexcept nogil:
    if p == INFINITY:
        return s if s > t else t
    if p == 1.0:
        return s + t
    if s == 0.0:
        return t
    if t == 0.0:
        return s
    return pow(pow(s, p) + pow(t, p), 1.0 / p)


def gauge_norms(double[:, ::1] Z, double[:, ::1] G):
    """Row-wise max_g g.z for a polyhedral gauge given by the rows of G."""
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], ng = G.shape[0]
    cdef Py_ssize_t i, g, k
    cdef double best, acc
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            best = -INFINITY
            for g in range(ng):
                acc = 0.0
                for k in range(d):
                    acc = acc + G[g, k] * Z[i, k]
                if acc > best:
                    best = acc
            o[i] = best if ng > 0 else 0.0
    return out


def region_max(double[:, ::1] F, double[::1] L, double[:, ::1] V,
               long[:, ::1] E, double[:, ::1] G, double[::1] x):
    """For each row s: max of the gauge distance to x over conv(V) cut by F[s].y >= L[s].

    Returns -inf where the cut region is empty.
    """
    cdef Py_ssize_t S = F.shape[0], d = F.shape[1], nv = V.shape[0]
    cdef Py_ssize_t ne = E.shape[0], ng = G.shape[0]
    cdef Py_ssize_t s, i, j, e, g, k
    cdef double acc, best, t, val, nrm
    gx_arr = np.zeros(ng)
    gv_arr = np.zeros((ng, nv))
    dv_arr = np.zeros(nv)
    gap_arr = np.zeros(nv)
    out = np.empty(S)
    cdef double[::1] GX = gx_arr, DV = dv_arr, gap = gap_arr, o = out
    cdef double[:, ::1] GV = gv_arr
    with nogil:
        for g in range(ng):
            acc = 0.0
            for k in range(d):
                acc = acc + G[g, k] * x[k]
            GX[g] = acc
            for i in range(nv):
                acc = 0.0
                for k in range(d):
                    acc = acc + G[g, k] * V[i, k]
                GV[g, i] = acc
        for i in range(nv):
            best = -INFINITY
            for g in range(ng):
                val = GX[g] - GV[g, i]
                if val > best:
                    best = val
            DV[i] = best
        for s in range(S):
            best = -INFINITY
            for i in range(nv):
                acc = 0.0
                for k in range(d):
                    acc = acc + F[s, k] * V[i, k]
                gap[i] = acc - L[s]
                if gap[i] >= 0.0 and DV[i] > best:
                    best = DV[i]
            for e in range(ne):
                i = E[e, 0]
                j = E[e, 1]
                if (gap[i] >= 0.0) == (gap[j] >= 0.0):
                    continue
                t = gap[i] / (gap[i] - gap[j])
                nrm = -INFINITY
                for g in range(ng):
                    val = GX[g] - (1.0 - t) * GV[g, i] - t * GV[g, j]
                    if val > nrm:
                        nrm = val
                if nrm > best:
                    best = nrm
            o[s] = best
    return out


def product_region_max(double[:, ::1] FL, double[:, ::1] FR, double[::1] L,
                       double[::1] x1, double[::1] x2,
                       double[:, ::1] VL, long[:, ::1] EL,
                       double[:, ::1] VR, long[:, ::1] ER,
                       double[:, ::1] GL, double[:, ::1] GR, double p,
                       double[:, ::1] A, double[:, ::1] B):
    """Region maximum over the union of products a*B_L x b*B_R for curve points (a, b).

    Row s uses the curve points A[s, :], B[s, :]. The distance is
    N_p(gauge_L(x1 - u), gauge_R(x2 - w)). Returns (values, best curve index).
    """
    cdef Py_ssize_t S = FL.shape[0], K = A.shape[1]
    cdef Py_ssize_t dl = VL.shape[1], dr = VR.shape[1]
    cdef Py_ssize_t nl = VL.shape[0], nr = VR.shape[0]
    cdef Py_ssize_t nel = EL.shape[0], ner = ER.shape[0]
    cdef Py_ssize_t ngl = GL.shape[0], ngr = GR.shape[0]
    cdef Py_ssize_t s, q, i, j, e, g, k, i2, j2
    cdef double a, b, acc, best, t, val, nl_, nr_, gi, gj, rowbest
    cdef Py_ssize_t bestk
    glx_a = np.zeros(ngl); grx_a = np.zeros(ngr)
    glv_a = np.zeros((ngl, nl)); grv_a = np.zeros((ngr, nr))
    pl_a = np.zeros(nl); pr_a = np.zeros(nr)
    dl_a = np.zeros(nl); dr_a = np.zeros(nr)
    out = np.empty(S)
    arg = np.zeros(S, dtype=np.int64)
    cdef double[::1] GLX = glx_a, GRX = grx_a, PL = pl_a, PR = pr_a, DL = dl_a, DR = dr_a, o = out
    cdef long[::1] ag = arg
    cdef double[:, ::1] GLV = glv_a, GRV = grv_a
    with nogil:
        for g in range(ngl):
            acc = 0.0
            for k in range(dl):
                acc = acc + GL[g, k] * x1[k]
            GLX[g] = acc
            for i in range(nl):
                acc = 0.0
                for k in range(dl):
                    acc = acc + GL[g, k] * VL[i, k]
                GLV[g, i] = acc
        for g in range(ngr):
            acc = 0.0
            for k in range(dr):
                acc = acc + GR[g, k] * x2[k]
            GRX[g] = acc
            for j in range(nr):
                acc = 0.0
                for k in range(dr):
                    acc = acc + GR[g, k] * VR[j, k]
                GRV[g, j] = acc
        for s in range(S):
            for i in range(nl):
                acc = 0.0
                for k in range(dl):
                    acc = acc + FL[s, k] * VL[i, k]
                PL[i] = acc
            for j in range(nr):
                acc = 0.0
                for k in range(dr):
                    acc = acc + FR[s, k] * VR[j, k]
                PR[j] = acc
            rowbest = -INFINITY
            bestk = 0
            for q in range(K):
                a = A[s, q]
                b = B[s, q]
                for i in range(nl):
                    best = -INFINITY
                    for g in range(ngl):
                        val = GLX[g] - a * GLV[g, i]
                        if val > best:
                            best = val
                    DL[i] = best if ngl > 0 else 0.0
                for j in range(nr):
                    best = -INFINITY
                    for g in range(ngr):
                        val = GRX[g] - b * GRV[g, j]
                        if val > best:
                            best = val
                    DR[j] = best if ngr > 0 else 0.0
                best = -INFINITY
                for i in range(nl):
                    for j in range(nr):
                        if a * PL[i] + b * PR[j] - L[s] >= 0.0:
                            val = _combine(DL[i], DR[j], p)
                            if val > best:
                                best = val
                # edges of the left factor times right vertices
                for e in range(nel):
                    i = EL[e, 0]
                    i2 = EL[e, 1]
                    for j in range(nr):
                        gi = a * PL[i] + b * PR[j] - L[s]
                        gj = a * PL[i2] + b * PR[j] - L[s]
                        if (gi >= 0.0) == (gj >= 0.0):
                            continue
                        t = gi / (gi - gj)
                        nl_ = -INFINITY
                        for g in range(ngl):
                            val = GLX[g] - a * ((1.0 - t) * GLV[g, i] + t * GLV[g, i2])
                            if val > nl_:
                                nl_ = val
                        if ngl == 0:
                            nl_ = 0.0
                        val = _combine(nl_, DR[j], p)
                        if val > best:
                            best = val
                # left vertices times edges of the right factor
                for e in range(ner):
                    j = ER[e, 0]
                    j2 = ER[e, 1]
                    for i in range(nl):
                        gi = a * PL[i] + b * PR[j] - L[s]
                        gj = a * PL[i] + b * PR[j2] - L[s]
                        if (gi >= 0.0) == (gj >= 0.0):
                            continue
                        t = gi / (gi - gj)
                        nr_ = -INFINITY
                        for g in range(ngr):
                            val = GRX[g] - b * ((1.0 - t) * GRV[g, j] + t * GRV[g, j2])
                            if val > nr_:
                                nr_ = val
                        if ngr == 0:
                            nr_ = 0.0
                        val = _combine(DL[i], nr_, p)
                        if val > best:
                            best = val
                if best > rowbest:
                    rowbest = best
                    bestk = q
            o[s] = rowbest
            ag[s] = bestk
    return out, arg
