"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""
import csv
import math
import os
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from daugavet import closedform as cf
from daugavet.constants import (SearchConfig, dc_exact_polyhedral, dc_sampled, dec_lower_certificate,
                                dec_sampled, is_denting, operator_inequality_check, thickness_index)
from daugavet.lipfree import (FreeElement, free_norm, ladder_experiment, ladder_space, molecule,
                              molecule_distance_bound, molecule_pair_norm, random_metric_space,
                              segment_delta_certificate)
from daugavet.spaces import AbsoluteNormProfile, PolyhedralSpace, WeightedL1, direct_sum, lp
from daugavet.sums import verify_stability

from oracles import free_norm_by_transport

THREADS = os.cpu_count() or 1


@pytest.fixture
def report(capsys):
    def _line(num, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return _line


def _ball(rng, dim, p):
    z = rng.standard_normal(dim)
    r = rng.uniform() ** (1.0 / dim)
    return z / np.linalg.norm(z, ord=p) * r


def test_01_sup_norm_parity(report):
    rng = np.random.default_rng(101)
    S = lp(math.inf, 3)
    t0 = time.perf_counter()
    worst_exact = worst_sampled = 0.0
    for _ in range(50):
        x = rng.uniform(-1, 1, 3)
        want = float(np.max(1 - np.abs(x)))
        worst_exact = max(worst_exact, abs(dc_exact_polyhedral(S, x).value - want))
        worst_sampled = max(worst_sampled, abs(dc_sampled(S, x).value - want))
    elapsed = time.perf_counter() - t0
    ok = worst_exact <= 1e-9 and worst_sampled <= 0.05 and elapsed < 60
    report(1, ok, f"exact err {worst_exact:.2e} (<=1e-9), sampled err {worst_sampled:.2e} (<=0.05), {elapsed:.1f}s (<60s)")
    assert ok


def _figure_reference(which, t):
    if which == 1:
        return max(1 / 3, 1 - t)
    if which == 2:
        f3 = lambda a: 1 + a if a <= 1 / 3 else 2 * (1 - a)
        return max(min(f3(2 / 3), f3(t)), 1 - min(2 / 3, t))
    return min(1 + t, max(1.0, (1 - t) * 2))


def test_02_figures(report, tmp_path):
    worst = 0.0
    for which in (1, 2, 3):
        out = tmp_path / f"fig{which}.csv"
        subprocess.run([sys.executable, "-m", "daugavet.cli", "figure", str(which), "--n", "3",
                        "--out", str(out)], check=True, capture_output=True)
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        assert len(rows) == 101
        for k, (t, v) in enumerate(rows):
            assert float(t) == k / 100
            worst = max(worst, abs(float(v) - _figure_reference(which, float(t))))
    ok = worst <= 1e-12
    report(2, ok, f"max pointwise error {worst:.1e} over 3x101 points (<=1e-12)")
    assert ok


def test_03_l1_formula(report):
    rng = np.random.default_rng(303)
    S = lp(1, 3)
    worst_dec = worst_dc = 0.0
    certified = 0
    for _ in range(50):
        x = _ball(rng, 3, 1)
        want = float(1 + np.abs(x).sum() - 2 * np.abs(x).max())
        worst_dec = max(worst_dec, abs(dec_sampled(S, x).value - want))
        worst_dc = max(worst_dc, abs(dc_sampled(S, x).value - want))
        certified += dec_lower_certificate(S, x, want - 0.02, 0.0).certified
    ok = worst_dec <= 0.05 and worst_dc <= 0.05 and certified == 50
    report(3, ok, f"dec err {worst_dec:.2e}, dc err {worst_dc:.2e} (<=0.05), certificates {certified}/50 at value-0.02")
    assert ok


def test_04_hilbert(report):
    # a round ball has no faces, so dc is read at a fixed slice depth; its upward
    # bias is about sqrt(2*delta), hence delta = 1e-5 rather than the default 1e-3
    rng = np.random.default_rng(404)
    S = lp(2, 3)
    shallow = SearchConfig(delta=1e-5)
    worst_dec = worst_dc = 0.0
    for _ in range(50):
        x = _ball(rng, 3, 2)
        n = float(np.linalg.norm(x))
        worst_dec = max(worst_dec, abs(dec_sampled(S, x).value - math.sqrt(max(1 - n * n, 0.0))))
        worst_dc = max(worst_dc, abs(dc_sampled(S, x, shallow).value - (1 - n)))
    ok = worst_dec <= 0.02 and worst_dc <= 0.02
    report(4, ok, f"dec err {worst_dec:.2e}, dc err {worst_dc:.2e} at slice depth 1e-5 (<=0.02)")
    assert ok


def test_05_witnesses(report):
    rng = np.random.default_rng(505)
    passed = 0
    for _ in range(100):
        n0 = int(rng.integers(3, 9))
        m = n0 + int(rng.integers(0, 4))
        den = int(rng.integers(1, 30))
        x = [Fraction(int(rng.integers(-den, den + 1)), den) for _ in range(m)]
        idx = sorted(int(i) for i in rng.choice(m, n0, replace=False))
        w = cf.dec_c0_witnesses(x, idx, n0)
        passed += w.mean_is_x() and w.in_unit_ball() and w.far_enough()
    ok = passed == 100
    report(5, ok, f"{passed}/100 instances satisfy mean, ball and distance invariants exactly")
    assert ok


def test_06_lipschitz_free_core(report):
    rng = np.random.default_rng(606)
    worst_lp = worst_mol = worst_pair = 0.0
    pairs_checked = bound_pass = bound_total = 0
    spaces = []
    for i in range(20):
        M = random_metric_space(int(rng.integers(3, 7)), rng, "graph" if i % 2 else "euclidean")
        spaces.append(M)
        for _ in range(3):
            labels = rng.choice(M.labels, size=min(3, len(M)), replace=False)
            w = {str(l): float(rng.normal()) for l in labels}
            ref = free_norm_by_transport(M.dist, M.index["0"], {M.index[k]: v for k, v in w.items()})
            worst_lp = max(worst_lp, abs(free_norm(M, FreeElement(M, w)) - ref))
        for a in M.labels:
            for b in M.labels:
                if a != b:
                    worst_mol = max(worst_mol, abs(free_norm(M, molecule(M, a, b)) - 1.0))
        for _ in range(10):
            x, y, u, v = rng.choice(M.labels, 4)
            if x == y or u == v:
                continue
            r = molecule_pair_norm(M, (x, y), (u, v))
            if r.formula_applies:
                pairs_checked += 1
                worst_pair = max(worst_pair, abs(r.formula - r.value))
    while bound_total < 1000:
        M = spaces[bound_total % 20]
        a, b, c, d = rng.choice(M.labels, 4)
        if a == b or c == d:
            continue
        bound_total += 1
        bound_pass += molecule_distance_bound(M, (a, b), (c, d)).passed
    ok = worst_lp <= 1e-8 and worst_mol <= 1e-9 and worst_pair <= 1e-7 and bound_pass == 1000
    report(6, ok, f"LP vs transport {worst_lp:.1e} (<=1e-8), molecules {worst_mol:.1e} (<=1e-9), "
                  f"pair formula {worst_pair:.1e} on {pairs_checked} cases (<=1e-7), distance bound {bound_pass}/1000")
    assert ok


def test_07_ladder(report):
    k = 8
    # segment witnesses: the segment free space is l1^k, so edge molecules give 2 - 2/k
    seg = ladder_space(1, k).restrict(["0"] + [f"s{i}" for i in range(1, k + 1)])
    path = ["0"] + [f"s{i}" for i in range(1, k + 1)]
    oracle = segment_delta_certificate(seg, path)
    assert abs(oracle.value - (2 - 2 / k)) <= 1e-9 and oracle.mean_error <= 1e-12
    t0 = time.perf_counter()
    rows = ladder_experiment(20, k, threads=THREADS)
    elapsed = time.perf_counter() - t0
    dist_ok = all(r.distance <= r.bound_4_over_n + 1e-9 for r in rows)
    dent_ok = all(r.denting for r in rows)
    cert = rows[0].delta_cert
    ok = dist_ok and dent_ok and cert >= 2 - 2 / 8 - 0.01 and elapsed < 300 and len(rows) == 20
    report(7, ok, f"distance<=4/n {dist_ok}, denting {dent_ok}, delta cert {cert:.4f} (>=1.74), {elapsed:.0f}s (<300s)")
    assert ok


def test_08_stability(report):
    cases = [(lp(math.inf, 2), lp(1, 2), AbsoluteNormProfile("l1")),
             (lp(1, 2), lp(math.inf, 2), AbsoluteNormProfile("linf")),
             (lp(math.inf, 2), lp(1, 2), AbsoluteNormProfile("lp", p=2.0))]
    violations = 0
    worst_eq = 0.0
    eq_cases = 0
    for X, Y, P in cases:
        for r in verify_stability(X, Y, P, 50, SearchConfig(seed=808, threads=THREADS), slack=0.05):
            violations += len(r.violations)
            for e in r.entries:
                if e.bound_id == "dec_l1_equality" and e.applicable:
                    eq_cases += 1
                    worst_eq = max(worst_eq, abs(e.bound - r.dec.value))
    ok = violations == 0 and worst_eq <= 0.05 and eq_cases > 0
    report(8, ok, f"{violations} violations over 3x50 trials, equality gap {worst_eq:.1e} on {eq_cases} cases (<=0.05)")
    assert ok


def test_09_operators(report):
    rng = np.random.default_rng(909)
    worst = math.inf
    count = 0
    for S in (lp(1, 3), lp(math.inf, 3)):
        for i in range(100):
            x = S.sample_sphere(1, rng)[0]
            if i % 2 == 0:
                xs = S.norming_functional(x)
            else:
                x = x * rng.uniform(0.1, 1.0)
                z = rng.standard_normal(3)
                xs = z / S.dual_norm(z) * rng.uniform(1.0, 3.0)
            r = operator_inequality_check(S, x, xs)
            worst = min(worst, r.lhs_T - r.rhs_T)
            if r.lhs_P is not None:
                worst = min(worst, r.lhs_P - r.rhs_P)
            count += 1
    ok = worst >= -1e-7
    report(9, ok, f"min slack {worst:.2e} over {count} operator pairs (>=-1e-7)")
    assert ok


def test_10_properties(report):
    rng = np.random.default_rng(1010)
    polys = [lp(1, 3), lp(math.inf, 3), WeightedL1([1.0, 2.0, 0.5]),
             PolyhedralSpace([[1, 0], [0.5, 1], [-0.5, 1], [-1, 0], [-0.5, -1], [0.5, -1]]),
             direct_sum(lp(math.inf, 2), lp(1, 2), "l1")]
    order_ok = lip_ok = dent_ok = True
    fast = SearchConfig(dual_samples=4000)
    for S in polys:
        for _ in range(8):
            x = S.sample_ball(1, rng)[0]
            y = S.sample_ball(1, rng)[0]
            dx, dy = dc_exact_polyhedral(S, x).value, dc_exact_polyhedral(S, y).value
            order_ok &= dx <= dec_sampled(S, x, fast).value + 1e-9
            lip_ok &= abs(dx - dy) <= S.norm(x - y) + 1e-9
        for v in S.ball_vertices():
            dent_ok &= is_denting(S, v) and dec_sampled(S, v, fast).value <= 1e-9
        # non-vertex sphere points: not denting and Delta > 0
        f = S.dual_vertices()[0]
        face = S.face_vertices(f)
        if len(face) >= 2:
            mid = face.mean(axis=0)
            dent_ok &= (not is_denting(S, mid)) and dec_sampled(S, mid, fast).value > 1e-6
    ts = thickness_index(lp(math.inf, 3), "ts").value
    td = thickness_index(lp(1, 3), "tdelta").value
    sup = thickness_index(lp(math.inf, 3), "sup_dc").value
    idx_ok = abs(ts) <= 0.02 and abs(td) <= 0.02 and abs(sup - 1) <= 0.02
    ok = order_ok and lip_ok and dent_ok and idx_ok
    report(10, ok, f"dc<=Delta {order_ok}, 1-Lipschitz {lip_ok}, dent<->Delta=0 {dent_ok}, "
                   f"ts {ts:.3f}, tdelta {td:.3f} (0+-0.02), sup_dc {sup:.3f} (1+-0.02)")
    assert ok


def test_11_determinism(report, tmp_path):
    outs = []
    for threads in ("1", "1", str(max(2, THREADS))):
        out = tmp_path / f"v{len(outs)}.csv"
        res = subprocess.run([sys.executable, "-m", "daugavet.cli", "verify", "--suite", "all",
                              "--seed", "42", "--threads", threads, "--out", str(out)],
                             capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] == outs[2]
    report(11, ok, f"three runs of verify --suite all --seed 42 byte-identical: {ok} ({len(outs[0])} bytes)")
    assert ok
