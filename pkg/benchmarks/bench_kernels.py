"""Time the compiled kernels against their NumPy versions on fixed seeded inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import math
import time

import numpy as np

from daugavet import _kernels_py as py
from daugavet.spaces import lp

try:
    from daugavet import _kernels as compiled
except ImportError:
    compiled = None


def _poly(space):
    return space.ball_vertices(), space.edges.astype(np.int64), space.dual_vertices()


def _cases(rng):
    cube = lp(math.inf, 4)
    V, E, G = _poly(cube)
    Z = rng.normal(size=(20000, 4))
    yield "gauge_norms  l_inf^4, 20000 rows", "gauge_norms", (Z, G)

    F = rng.normal(size=(5000, 4))
    F /= np.abs(F).sum(axis=1)[:, None]
    L = rng.uniform(-0.5, 1.0, 5000)
    x = np.array([0.3, -0.2, 0.1, 0.5])
    yield "region_max   l_inf^4, 5000 slices", "region_max", (F, L, V, E, G, x)

    X, Y = lp(math.inf, 2), lp(1, 3)
    VL, EL, GL = _poly(X)
    VR, ER, GR = _poly(Y)
    S, K = 200, 17
    FL, FR = rng.normal(size=(S, 2)), rng.normal(size=(S, 3))
    Ls = rng.uniform(-0.5, 0.5, S)
    A = np.tile(np.linspace(0.0, 1.0, K), (S, 1))
    B = 1.0 - A
    x1, x2 = np.array([0.2, 0.1]), np.array([-0.1, 0.3, 0.2])
    args = (FL, FR, Ls, x1, x2, VL, EL, VR, ER, GL, GR, 2.0, A, B)
    yield f"product_region_max  l_inf^2 (+)_2 l_1^3, {S}x{K}", "product_region_max", args


def _best(fn, args, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    if compiled is None:
        print("compiled extension not built; only the NumPy timings are shown")
    print(f"{'kernel':48s} {'numpy [ms]':>11s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for label, name, a in _cases(rng):
        tp = _best(getattr(py, name), a, args.repeat)
        if compiled is None:
            print(f"{label:48s} {tp * 1e3:11.2f} {'-':>14s} {'-':>8s}")
            continue
        tc = _best(getattr(compiled, name), a, args.repeat)
        print(f"{label:48s} {tp * 1e3:11.2f} {tc * 1e3:14.2f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
