"""Command-line front end: ``daugavet <command> ...``.

Results go to standard output as a small table; ``--out`` writes the same
rows as CSV. Exit codes: 0 success, 1 bad input or usage, 2 a checked
invariant or bound failed.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import closedform as cf
from .constants import (SearchConfig, dc_exact_polyhedral, dc_lower_certificate, dc_sampled,
                        dc_value, dec_lower_certificate, dec_sampled, operator_inequality_check,
                        thickness_index, _delta_closed_form)
from .errors import InputError, InvariantViolation, ResourceError
from .lipfree import (FreeElement, check_dc_characterization, free_norm_with_function,
                      ladder_experiment, load_metric_space, molecule,
                      molecule_distance_bound, molecule_pair_norm, random_metric_space)
from .spaces import SumSpace, as_vector, direct_sum, load_space, lp
from .sums import dc_sum_lower_bounds, dec_sum_lower_bounds, verify_stability


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for failed checks."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


class Table:
    def __init__(self, header: Sequence[str]):
        self.header = list(header)
        self.rows: list[list[str]] = []

    def add(self, *values):
        self.rows.append([_fmt(v) for v in values])

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()

    def show(self, stream=None):
        stream = stream or sys.stdout
        cols = [self.header] + self.rows
        widths = [max(len(r[i]) for r in cols) for i in range(len(self.header))]
        for r in cols:
            stream.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def _emit(table: Table, args):
    table.show()
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(table.csv_text())


def _point(text: Optional[str], dim: Optional[int] = None) -> np.ndarray:
    if text is None:
        raise InputError("--point is required")
    try:
        vals = [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse point {text!r}") from exc
    return as_vector(vals, dim)


def _cfg(args) -> SearchConfig:
    return SearchConfig(dual_samples=args.samples, delta=args.delta, seed=args.seed,
                        threads=args.threads)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_space_show(args) -> int:
    S = load_space(args.space)
    t = Table(["field", "value"])
    t.add("space", S.describe())
    t.add("dim", S.dim)
    t.add("polyhedral", S.is_polyhedral)
    if S.is_polyhedral:
        t.add("ball_vertices", len(S.ball_vertices()))
        t.add("dual_vertices", len(S.dual_vertices()))
        t.add("edges", len(S.edges))
    _emit(t, args)
    return 0


def cmd_dc(args) -> int:
    S = load_space(args.space)
    x = _point(args.point, S.dim)
    cfg = _cfg(args)
    t = Table(["method", "value", "upper", "certified_lower"])
    if args.method in ("exact", "both"):
        if not S.is_polyhedral:
            raise InputError("exact dc needs a polytope unit ball")
        e = dc_exact_polyhedral(S, x)
        t.add(e.method, e.value, e.upper, e.certified_lower)
    if args.method in ("sampled", "both"):
        e = dc_sampled(S, x, cfg)
        t.add(e.method, e.value, e.upper, e.certified_lower)
    _emit(t, args)
    return 0


def cmd_dec(args) -> int:
    S = load_space(args.space)
    x = _point(args.point, S.dim)
    t = Table(["method", "value", "upper", "certified_lower"])
    closed = _delta_closed_form(S, x)
    if closed is not None:
        t.add("closed_form", closed, closed, closed)
    e = dec_sampled(S, x, _cfg(args))
    t.add(e.method, e.value, e.upper, e.certified_lower)
    _emit(t, args)
    return 0


def cmd_certify(args) -> int:
    S = load_space(args.space)
    x = _point(args.point, S.dim)
    if args.alpha is None:
        raise InputError("--alpha is required")
    fn = dc_lower_certificate if args.kind == "dc" else dec_lower_certificate
    c = fn(S, x, args.alpha, args.eps, _cfg(args))
    t = Table(["method", "kind", "alpha", "eps", "certified", "bound", "witnesses"])
    t.add("certificate", args.kind, c.alpha, c.eps, c.certified, c.bound, len(c.witnesses))
    _emit(t, args)
    return 0


def cmd_index(args) -> int:
    S = load_space(args.space)
    e = thickness_index(S, args.kind, _cfg(args))
    t = Table(["method", "kind", "value"])
    t.add(e.method, args.kind, e.value)
    _emit(t, args)
    return 0


def cmd_operator_check(args) -> int:
    S = load_space(args.space)
    x = _point(args.point, S.dim)
    xs = _point(args.xstar, S.dim)
    r = operator_inequality_check(S, x, xs, _cfg(args))
    t = Table(["check", "lhs", "rhs", "source"])
    t.add("rank_one_plus", r.lhs_T, r.rhs_T, "exact" if S.is_polyhedral else "sampled")
    t.add("projection", r.lhs_P, r.rhs_P, r.rhs_P_source)
    t.add("passed", r.passed, None, None)
    _emit(t, args)
    return 0 if r.passed else 2


def cmd_sum_bounds(args) -> int:
    S = load_space(args.space)
    if not isinstance(S, SumSpace):
        raise InputError("sum-bounds needs a space of type 'sum'")
    z = _point(args.point, S.dim)
    if abs(S.norm(z) - 1.0) > 1e-9:
        raise InputError("the point must lie on the unit sphere of the sum")
    cfg = _cfg(args)
    X, Y, N = S.left, S.right, S.profile
    u, w = S.split(z)
    nu, nw = X.norm(u), Y.norm(w)
    comp = {}
    for name, sp, v, n in (("x", X, u, nu), ("y", Y, w, nw)):
        if n > 0:
            vn = v / n
            comp["dc_" + name] = dc_value(sp, vn, cfg).value
            d = _delta_closed_form(sp, vn)
            comp["dec_" + name] = d if d is not None else dec_sampled(sp, vn, cfg).value
    entries = dc_sum_lower_bounds(X, Y, N, u, w, comp.get("dc_x"), comp.get("dc_y"))
    entries += dec_sum_lower_bounds(X, Y, N, nu, nw, u / nu if nu > 0 else u,
                                    w / nw if nw > 0 else w, comp.get("dec_x"), comp.get("dec_y"))
    dc = dc_value(S, z, cfg)
    dec = dec_sampled(S, z, cfg)
    t = Table(["bound", "side", "applicable", "bound_value", "computed", "method", "holds", "reason"])
    ok = True
    for e in entries:
        target = dc if e.side.endswith("dc") else dec
        holds = None
        if e.applicable:
            if e.side.startswith("lower"):
                holds = e.bound <= target.value + args.slack
            elif e.side.startswith("upper"):
                holds = e.bound >= target.value - args.slack
            else:
                holds = abs(e.bound - target.value) <= args.slack
            ok = ok and holds
        t.add(e.bound_id, e.side, e.applicable, e.bound, target.value, target.method, holds, e.reason)
    _emit(t, args)
    return 0 if ok else 2


def cmd_figure(args) -> int:
    rows = cf.figure_curve(args.which, n=args.n, points=args.points)
    t = Table(["t", "value"])
    for a, b in rows:
        t.add(a, b)
    _emit(t, args)
    if args.svg:
        titles = {1: "dc((2/3, 2/3, t))", 2: "Delta((2/3, 2/3, t)) lower bound",
                  3: f"Delta(t(e_1+...+e_{args.n})) in c0"}
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(cf.render_svg(rows, titles[args.which]))
    return 0


def _element(M, text: str) -> FreeElement:
    pairs = []
    for part in text.split(","):
        if not part.strip():
            continue
        if ":" not in part:
            raise InputError("elements are written label:weight,label:weight")
        lab, wt = part.split(":", 1)
        try:
            pairs.append((lab.strip(), float(Fraction(wt.strip()))))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad weight in {part!r}") from exc
    return FreeElement(M, pairs)


def _pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise InputError("molecules are written u,v")
    return parts[0], parts[1]


def cmd_lipfree(args) -> int:
    if args.action == "ladder":
        rows = ladder_experiment(args.N, args.grid_k, threads=args.threads)
        t = Table(["n", "distance", "bound_4_over_n", "denting", "delta_cert"])
        ok = True
        for r in rows:
            t.add(r.n, r.distance, r.bound_4_over_n, r.denting, r.delta_cert)
            ok = ok and r.distance <= r.bound_4_over_n + 1e-9 and r.denting
        _emit(t, args)
        return 0 if ok else 2
    if not args.metric:
        raise InputError("--metric is required")
    M = load_metric_space(args.metric)
    if args.molecule:
        mu = molecule(M, *_pair(args.molecule)).element
    elif args.element:
        mu = _element(M, args.element)
    else:
        raise InputError("give --molecule u,v or --element label:weight,...")
    if args.action == "norm":
        value, f = free_norm_with_function(M, mu)
        t = Table(["item", "value"])
        t.add("lp_norm", value)
        for lab in M.labels:
            t.add(f"f({lab})", f[lab])
        _emit(t, args)
        return 0
    if args.alpha is None:
        raise InputError("--alpha is required")
    rep = check_dc_characterization(M, mu, args.alpha)
    t = Table(["field", "value"])
    t.add("alpha", rep.alpha)
    t.add("alpha_upper", rep.alpha_upper)
    t.add("consistent", rep.consistent)
    t.add("coverage_instances", rep.coverage_instances)
    t.add("denting_molecules", rep.denting_molecules)
    t.add("violations", len(rep.violations))
    _emit(t, args)
    return 0 if rep.consistent else 2


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

class Suite:
    def __init__(self):
        self.table = Table(["suite", "check", "case", "value", "expected", "tolerance", "pass"])
        self.failures = 0

    def record(self, suite, check, case, value, expected, tol, passed):
        self.table.add(suite, check, case, value, expected, tol, bool(passed))
        if not passed:
            self.failures += 1


def _sup_ball_point(rng, dim):
    return rng.uniform(-1.0, 1.0, dim)


def _l1_ball_point(rng, dim):
    z = rng.standard_normal(dim)
    return z / np.abs(z).sum() * rng.uniform() ** (1.0 / dim)


def _l2_ball_point(rng, dim):
    z = rng.standard_normal(dim)
    return z / np.linalg.norm(z) * rng.uniform() ** (1.0 / dim)


def suite_closedform(s: Suite, seed: int, scale: int, cfg: SearchConfig):
    rng = np.random.default_rng([seed, 1])
    linf3, l13, l23 = lp(math.inf, 3), lp(1, 3), lp(2, 3)
    for i in range(2 * scale):
        x = _sup_ball_point(rng, 3)
        want = float(np.max(1.0 - np.abs(x)))
        ex = dc_exact_polyhedral(linf3, x).value
        s.record("closedform", "dc_linf3_exact", i, ex, want, 1e-9, abs(ex - want) <= 1e-9)
        sm = dc_sampled(linf3, x, cfg).value
        s.record("closedform", "dc_linf3_sampled", i, sm, want, 0.05, abs(sm - want) <= 0.05)
    for i in range(2 * scale):
        x = _l1_ball_point(rng, 3)
        want = float(1.0 + np.abs(x).sum() - 2.0 * np.abs(x).max())
        v = dec_sampled(l13, x, cfg).value
        s.record("closedform", "dec_l1", i, v, want, 0.05, abs(v - want) <= 0.05)
        v = dc_sampled(l13, x, cfg).value
        s.record("closedform", "dc_l1", i, v, want, 0.05, abs(v - want) <= 0.05)
    # round balls read dc at a fixed slice depth with bias about sqrt(2*delta)
    shallow = dataclasses.replace(cfg, delta=min(cfg.delta, 1e-5))
    for i in range(2 * scale):
        x = _l2_ball_point(rng, 3)
        n = float(np.linalg.norm(x))
        v = dec_sampled(l23, x, cfg).value
        want = math.sqrt(max(1.0 - n * n, 0.0))
        s.record("closedform", "dec_l2", i, v, want, 0.02, abs(v - want) <= 0.02)
        v = dc_sampled(l23, x, shallow).value
        s.record("closedform", "dc_l2", i, v, 1.0 - n, 0.02, abs(v - (1.0 - n)) <= 0.02)
    for i in range(4 * scale):
        n0 = int(rng.integers(3, 9))
        m = n0 + int(rng.integers(0, 3))
        x = [Fraction(int(rng.integers(-20, 21)), 20) for _ in range(m)]
        idx = sorted(rng.choice(m, n0, replace=False).tolist())
        w = cf.dec_c0_witnesses(x, idx, n0)
        ok = w.mean_is_x() and w.in_unit_ball() and w.far_enough()
        s.record("closedform", "c0_witnesses", i, float(w.bound), None, 0, ok)
    for which in (1, 2, 3):
        rows = cf.figure_curve(which)
        worst = 0.0
        for t, v in rows:
            if which == 1:
                ref = max(1 / 3, 1 / 3, 1 - t)
            elif which == 2:
                f3 = lambda a: 1 + a if a <= 1 / 3 else 2 * (1 - a)
                ref = max(min(f3(2 / 3), f3(t)), 1 - min(2 / 3, t))
            else:
                ref = min(1 + t, max(1.0, 2 * (1 - t)))
            worst = max(worst, abs(v - ref))
        s.record("closedform", f"figure_{which}", "max_abs_error", worst, 0.0, 1e-12, worst <= 1e-12)


def suite_stability(s: Suite, seed: int, scale: int, cfg: SearchConfig):
    cases = [("linf2+l1 l1^2", lp(math.inf, 2), lp(1, 2), "l1"),
             ("l1^2+linf linf^2", lp(1, 2), lp(math.inf, 2), "linf"),
             ("linf2+l2 l1^2", lp(math.inf, 2), lp(1, 2), 2.0)]
    for name, X, Y, prof in cases:
        S = direct_sum(X, Y, prof)
        scfg = SearchConfig(cfg.dual_samples, cfg.delta, cfg.refine_iters, seed, cfg.threads)
        reps = verify_stability(X, Y, S.profile, 3 * scale, scfg)
        for r in reps:
            s.record("stability", name, r.trial, len(r.violations), 0, 0, not r.violations)
            for e in r.entries:
                if e.bound_id == "dec_l1_equality" and e.applicable:
                    gap = abs(e.bound - r.dec.value)
                    s.record("stability", name + " equality", r.trial, gap, 0.0, 0.05, gap <= 0.05)


def suite_operators(s: Suite, seed: int, scale: int, cfg: SearchConfig):
    rng = np.random.default_rng([seed, 3])
    for name, S in (("l1^3", lp(1, 3)), ("linf^3", lp(math.inf, 3))):
        for i in range(5 * scale):
            x = S.sample_sphere(1, rng)[0] * (1.0 if i % 2 == 0 else rng.uniform(0.2, 1.0))
            if i % 2 == 0:
                xs = S.norming_functional(x)
            else:
                z = rng.standard_normal(3)
                xs = z / S.dual_norm(z) * rng.uniform(1.0, 2.0)
            r = operator_inequality_check(S, x, xs, cfg)
            slack_t = r.lhs_T - r.rhs_T
            s.record("operators", name + " rank_one_plus", i, slack_t, 0.0, 1e-7, slack_t >= -1e-7)
            if r.lhs_P is not None:
                slack_p = r.lhs_P - r.rhs_P
                s.record("operators", name + " projection", i, slack_p, 0.0, 1e-7, slack_p >= -1e-7)


def suite_lipfree(s: Suite, seed: int, scale: int, cfg: SearchConfig):
    rng = np.random.default_rng([seed, 5])
    for i in range(scale):
        M = random_metric_space(int(rng.integers(3, 7)), rng, "euclidean" if i % 2 else "graph")
        worst = max(abs(free_norm_with_function(M, molecule(M, a, b))[0] - 1.0)
                    for a in M.labels for b in M.labels if a != b)
        s.record("lipfree", "molecule_norm", i, worst, 0.0, 1e-9, worst <= 1e-9)
        for j in range(5):
            a, b, c, d = rng.choice(M.labels, 4)
            if a == b or c == d:
                continue
            pn = molecule_pair_norm(M, (a, b), (c, d))
            if pn.formula_applies:
                gap = abs(pn.formula - pn.value)
                s.record("lipfree", "pair_closed_form", f"{i}.{j}", gap, 0.0, 1e-7, gap <= 1e-7)
            db = molecule_distance_bound(M, (a, b), (c, d))
            s.record("lipfree", "distance_bound", f"{i}.{j}", db.lhs, db.rhs, 1e-9, db.passed)
    k = 4
    rows = ladder_experiment(4, k, threads=cfg.threads)
    for r in rows:
        s.record("lipfree", "ladder_distance", r.n, r.distance, r.bound_4_over_n, 1e-9,
                 r.distance <= r.bound_4_over_n + 1e-9)
        s.record("lipfree", "ladder_denting", r.n, r.denting, True, 0, r.denting)
    cert = rows[0].delta_cert
    s.record("lipfree", "ladder_delta_cert", k, cert, 2 - 2 / k - 0.01, 0, cert >= 2 - 2 / k - 0.01)


SUITES = {"closedform": suite_closedform, "stability": suite_stability,
          "operators": suite_operators, "lipfree": suite_lipfree}


def cmd_verify(args) -> int:
    name = args.suite_pos or args.suite or "all"
    if name not in list(SUITES) + ["all"]:
        raise InputError(f"unknown suite {name!r}")
    names = list(SUITES) if name == "all" else [name]
    cfg = SearchConfig(dual_samples=args.samples, delta=args.delta, seed=args.seed,
                       threads=args.threads)
    s = Suite()
    for n in names:
        SUITES[n](s, args.seed, args.scale, cfg)
    _emit(s.table, args)
    sys.stdout.write(f"failures: {s.failures}\n")
    return 0 if s.failures == 0 else 2


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=int, default=20000, help="dual functionals sampled")
    common.add_argument("--delta", type=float, default=1e-3, help="slice depth for dc searches")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", help="write the result table as CSV")

    p = _Parser(prog="daugavet", description="Daugavet and Delta constants of points in normed spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("space-show", parents=[common], help="describe a space file")
    a.add_argument("--space", required=True)
    a.set_defaults(fn=cmd_space_show)

    a = sub.add_parser("dc", parents=[common], help="Daugavet constant of a point")
    a.add_argument("--space", required=True)
    a.add_argument("--point", required=True)
    a.add_argument("--method", choices=["exact", "sampled", "both"], default="both")
    a.set_defaults(fn=cmd_dc)

    a = sub.add_parser("dec", parents=[common], help="Delta-constant of a point")
    a.add_argument("--space", required=True)
    a.add_argument("--point", required=True)
    a.set_defaults(fn=cmd_dec)

    a = sub.add_parser("certify", parents=[common], help="convex-hull lower-bound certificate")
    a.add_argument("--space", required=True)
    a.add_argument("--point", required=True)
    a.add_argument("--kind", choices=["dc", "dec"], default="dec")
    a.add_argument("--alpha", type=float)
    a.add_argument("--eps", type=float, default=0.0)
    a.set_defaults(fn=cmd_certify)

    a = sub.add_parser("index", parents=[common], help="thickness indices over the sphere")
    a.add_argument("--space", required=True)
    a.add_argument("--kind", choices=["ts", "tdelta", "sup_dc"], default="ts")
    a.set_defaults(fn=cmd_index)

    a = sub.add_parser("operator-check", parents=[common], help="rank-one operator inequalities")
    a.add_argument("--space", required=True)
    a.add_argument("--point", required=True)
    a.add_argument("--xstar", required=True)
    a.set_defaults(fn=cmd_operator_check)

    a = sub.add_parser("sum-bounds", parents=[common], help="bounds at a point of a sum space")
    a.add_argument("--space", required=True)
    a.add_argument("--point", required=True)
    a.add_argument("--slack", type=float, default=0.05)
    a.set_defaults(fn=cmd_sum_bounds)

    a = sub.add_parser("figure", parents=[common], help="curves as (t, value) CSV")
    a.add_argument("which", type=int, choices=[1, 2, 3])
    a.add_argument("--n", type=int, default=3)
    a.add_argument("--points", type=int, default=101)
    a.add_argument("--svg", help="also write a small SVG plot")
    a.set_defaults(fn=cmd_figure)

    a = sub.add_parser("lipfree", parents=[common], help="Lipschitz-free space tools")
    a.add_argument("action", choices=["norm", "ladder", "check"])
    a.add_argument("--metric", help="metric space JSON file")
    a.add_argument("--molecule", help="u,v")
    a.add_argument("--element", help="label:weight,...")
    a.add_argument("--alpha", type=float)
    a.add_argument("--N", type=int, default=20)
    a.add_argument("--grid-k", dest="grid_k", type=int, default=8)
    a.set_defaults(fn=cmd_lipfree)

    a = sub.add_parser("verify", parents=[common], help="run verification suites")
    a.add_argument("suite_pos", nargs="?", choices=list(SUITES) + ["all"])
    a.add_argument("--suite", choices=list(SUITES) + ["all"])
    a.add_argument("--scale", type=int, default=2, help="multiplier for the number of cases")
    a.set_defaults(fn=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except InvariantViolation as exc:
        sys.stderr.write(f"invariant violated: {exc}\n")
        return 2
    except (InputError, ResourceError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
