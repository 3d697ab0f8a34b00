"""Hot loops, compiled when the extension is built and NumPy otherwise.

Set ``DAUGAVET_PURE_PYTHON=1`` to force the NumPy versions.
"""
from __future__ import annotations

import os

import numpy as np

if os.environ.get("DAUGAVET_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"


def _f2(a) -> np.ndarray:
    return np.ascontiguousarray(np.atleast_2d(np.asarray(a, dtype=np.float64)))


def _f1(a) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64).ravel())


def _idx(E) -> np.ndarray:
    E = np.asarray(E, dtype=np.int64)
    return np.ascontiguousarray(E.reshape(-1, 2))


def _gauge_matrix(G, dim: int) -> np.ndarray:
    G = np.asarray(G, dtype=np.float64)
    return np.ascontiguousarray(G.reshape(-1, dim))


def gauge_norms(Z, G) -> np.ndarray:
    Z = _f2(Z)
    return _impl.gauge_norms(Z, _gauge_matrix(G, Z.shape[1]))


def region_max(F, L, V, E, G, x) -> np.ndarray:
    """Max of the polyhedral distance to ``x`` over conv(V) cut by F[s].y >= L[s], per row s.

    ``E`` lists the polytope's edges; pass an empty array to restrict to vertices.
    Rows whose region is empty come back as -inf.
    """
    V = _f2(V)
    return _impl.region_max(_f2(F), _f1(L), V, _idx(E), _gauge_matrix(G, V.shape[1]), _f1(x))


def product_region_max(FL, FR, L, x1, x2, VL, EL, VR, ER, GL, GR, p, A, B):
    """Region max over a union of scaled product polytopes, see ``_kernels_py``."""
    VL, VR = _f2(VL), _f2(VR)
    return _impl.product_region_max(_f2(FL), _f2(FR), _f1(L), _f1(x1), _f1(x2),
                                    VL, _idx(EL), VR, _idx(ER),
                                    _gauge_matrix(GL, VL.shape[1]), _gauge_matrix(GR, VR.shape[1]),
                                    float(p), _f2(A), _f2(B))
