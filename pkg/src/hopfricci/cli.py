"""Command-line interface: ``hopfricci <command> [family] [options]``.

Exit status is 0 on success, 1 when a solver fails and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .ancient import ancient_iterate, spu1_ancient_hypothesis
from .einstein import einstein_list, is_einstein, sp1_uniqueness_scan
from .errors import HopfRicciError
from .geometry import (
    FamilyKind,
    FibrationFamily,
    FourParamForm,
    FourParamMetric,
    Su2Metric,
    TwoSummandMetric,
    ricci_four_param,
    ricci_su2,
    ricci_two_summand,
)
from .iteration import iterate_four_param, iterate_su2, iterate_two_summand
from .prescribed import (
    c_function,
    solvability_predicates,
    solve_four_param_homotopy,
    solve_su2,
    solve_two_summand,
)
from .records import FORMATS, emit_records

TWO_SUMMAND = tuple(k.value for k in FamilyKind)
FAMILIES = ("su2",) + TWO_SUMMAND + ("four-param",)


class UsageError(Exception):
    pass


@dataclass
class Output:
    fields: list
    records: list
    failed: bool = False


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------


def _floats(text: Optional[str], flag: str, count: Optional[int] = None) -> list:
    if text is None:
        raise UsageError(f"{flag} is required")
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{flag}: expected {count} values, got {len(vals)}")
    if any(not (v > 0 and np.isfinite(v)) for v in vals):
        raise UsageError(f"{flag}: values must be positive and finite")
    return vals


def _positive(v: Optional[float], flag: str) -> float:
    if v is None:
        raise UsageError(f"{flag} is required")
    if not (v > 0 and np.isfinite(v)):
        raise UsageError(f"{flag} must be positive")
    return v


def _grid(text: Optional[str]) -> np.ndarray:
    if text is None:
        raise UsageError("--grid lo:hi:count is required")
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise UsageError(f"--grid: expected lo:hi:count, got {text!r}") from None
    if count < 1 or not (0 < lo <= hi):
        raise UsageError("--grid: need 0 < lo <= hi and count >= 1")
    return np.linspace(lo, hi, count)


def _family(args) -> str:
    fam = args.family_pos or args.family
    if fam is None:
        raise UsageError("a family is required")
    fam = fam.replace("_", "-")
    if fam not in FAMILIES:
        raise UsageError(f"unknown family {fam!r}; choose from {', '.join(FAMILIES)}")
    return fam


def _fibration(fam: str, n: int) -> FibrationFamily:
    try:
        return FibrationFamily(fam, n)
    except ValueError as exc:
        raise UsageError(f"--n: {exc}") from None


def _metric(fam: str, args):
    if fam == "su2":
        return Su2Metric(*_floats(args.x, "--x", 3))
    if fam == "four-param":
        s = args.s if args.s is not None else 1.0
        return FourParamMetric(args.n, *_floats(args.x, "--x", 3), _positive(s, "--s"))
    t = _positive(args.t, "--t")
    s = _positive(args.s if args.s is not None else 1.0, "--s")
    return TwoSummandMetric(_fibration(fam, args.n), t, s)


def _coords(g) -> dict:
    if isinstance(g, Su2Metric):
        return {"x1": g.x1, "x2": g.x2, "x3": g.x3}
    if isinstance(g, TwoSummandMetric):
        return {"t": g.t, "s": g.s}
    return {"x1": g.x1, "x2": g.x2, "x3": g.x3, "s": g.s}


def _coord_names(fam: str) -> list:
    if fam == "su2":
        return ["x1", "x2", "x3"]
    if fam == "four-param":
        return ["x1", "x2", "x3", "s"]
    return ["t", "s"]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_ricci(args) -> Output:
    fam = _family(args)
    g = _metric(fam, args)
    rec = {"family": fam, "n": args.n, **_coords(g)}
    if fam == "su2":
        r = ricci_su2(g)
        rec.update(r1=r.r1, r2=r.r2, r3=r.r3)
        out = ["r1", "r2", "r3"]
    elif fam == "four-param":
        f = ricci_four_param(g)
        rec.update(a1=f.a1, a2=f.a2, a3=f.a3, b=f.b)
        out = ["a1", "a2", "a3", "b"]
    else:
        f = ricci_two_summand(g)
        rec.update(A=f.A, B=f.B)
        out = ["A", "B"]
    return Output(["family", "n"] + _coord_names(fam) + out, [rec])


def cmd_solve(args) -> Output:
    fam = _family(args)
    base = {"family": fam, "n": args.n}
    try:
        if fam == "su2":
            T = _floats(args.T, "--T", 3)
            fields = ["family", "n", "T1", "T2", "T3", "x1", "x2", "x3", "kappa", "residual", "status"]
            rec = {**base, "T1": T[0], "T2": T[1], "T3": T[2]}
            res = solve_su2(T, tol=args.tol)
        elif fam == "four-param":
            T = _floats(args.T, "--T", 3)
            b = _positive(args.b, "--b")
            fields = ["family", "n", "T1", "T2", "T3", "b", "x1", "x2", "x3", "s", "kappa", "residual", "status"]
            rec = {**base, "T1": T[0], "T2": T[1], "T3": T[2], "b": b}
            res = solve_four_param_homotopy(FourParamForm(args.n, *T, b))
        else:
            a = _floats(args.T, "--T", 1)[0]
            b = _positive(args.b, "--b")
            fields = ["family", "n", "a", "b", "t", "s", "kappa", "residual", "status"]
            rec = {**base, "a": a, "b": b}
            res = solve_two_summand(_fibration(fam, args.n), a, b)
            if res is None:
                rec["status"] = "Unsolvable"
                return Output(fields, [rec], failed=True)
    except HopfRicciError as exc:
        rec["status"] = type(exc).__name__
        return Output(fields, [rec], failed=True)
    rec.update(_coords(res.metric), kappa=res.kappa, residual=res.residual, status="Solved")
    return Output(fields, [rec])


def cmd_c_function(args) -> Output:
    T = _floats(args.T, "--T", 3)
    fields = ["T1", "T2", "T3", "c", "Z", "branch", "x1", "x2", "x3", "n", "below_4n_plus_8", "status"]
    rec = {"T1": T[0], "T2": T[1], "T3": T[2], "n": args.n}
    try:
        res = c_function(*T)
    except HopfRicciError as exc:
        rec["status"] = type(exc).__name__
        return Output(fields, [rec], failed=True)
    rec.update(c=res.c, Z=res.Z, branch=res.branch, **_coords(res.metric))
    rec.update(below_4n_plus_8=res.c < 4 * args.n + 8, status="Solved")
    return Output(fields, [rec])


def _trace_records(fam, n, trace) -> list:
    recs = []
    for i, g in enumerate(trace.metrics):
        rec = {"family": fam, "n": n, "step": i, **_coords(g)}
        rec["constant"] = trace.constants[i - 1] if i >= 1 else None
        rec["status"] = trace.status
        recs.append(rec)
    return recs


def cmd_iterate(args) -> Output:
    fam = _family(args)
    g = _metric(fam, args)
    if fam == "su2":
        trace = iterate_su2(g, args.max_iter, args.tol)
    elif fam == "four-param":
        trace = iterate_four_param(g, args.max_iter, args.tol)
    else:
        trace = iterate_two_summand(g, args.max_iter, args.tol)
    fields = ["family", "n", "step"] + _coord_names(fam) + ["constant", "status"]
    return Output(fields, _trace_records(fam, args.n, trace), failed=trace.failure is not None)


def _ancient_record(fam, n, g, trace) -> dict:
    last = trace.metrics[-1]
    rec = {"family": fam, "n": n}
    rec.update({f"start_{k}": v for k, v in _coords(g).items()})
    rec.update(steps_survived=trace.steps_survived, status=trace.status, lost_at_step=trace.lost_at_step)
    rec.update({f"last_{k}": v for k, v in _coords(last).items()})
    rec["fiber_length_proxy"] = trace.fiber_length_proxy[-1]
    return rec


def _ancient_fields(fam) -> list:
    names = _coord_names(fam)
    return (
        ["family", "n"]
        + [f"start_{k}" for k in names]
        + ["steps_survived", "status", "lost_at_step"]
        + [f"last_{k}" for k in names]
        + ["fiber_length_proxy"]
    )


def cmd_ancient(args) -> Output:
    fam = _family(args)
    g = _metric(fam, args)
    trace = ancient_iterate(g, args.max_steps)
    return Output(_ancient_fields(fam), [_ancient_record(fam, args.n, g, trace)])


def cmd_einstein(args) -> Output:
    fam = _family(args)
    key = {"su2": "su2", "four-param": "four_param"}.get(fam)
    if key is None:
        entries = einstein_list(_fibration(fam, args.n))
    else:
        entries = einstein_list(key, args.n)
    fields = ["family", "n", "ratio", "einstein_constant", "verified"]
    recs = []
    for e in entries:
        lam = is_einstein(e.metric)
        recs.append({"family": fam, "n": args.n, "ratio": e.ratio, "einstein_constant": e.einstein_constant, "verified": lam is not None})
    return Output(fields, recs)


def scan_solvability(args) -> Output:
    fam = _family(args)
    grid = _grid(args.grid)
    b = _positive(args.b if args.b is not None else 1.0, "--b")
    if fam == "su2":
        raise UsageError("scan solvability needs a two-summand family or four-param")
    if fam != "four-param":
        family = _fibration(fam, args.n)
        fields = ["family", "n", "ratio", "solvable", "t", "kappa"]
        recs = []
        for q in grid:
            res = solve_two_summand(family, float(q) * b, b)
            rec = {"family": fam, "n": args.n, "ratio": float(q), "solvable": res is not None}
            if res is not None:
                rec.update(t=res.metric.t, kappa=res.kappa)
            recs.append(rec)
        return Output(fields, recs)
    # four-param: T = (T1, T2, T2; b) over a square grid
    fields = ["family", "n", "T1", "T2", "T3", "b", "ratio_bound", "c_condition", "c", "solved", "kappa", "residual", "error"]
    recs = []
    for t1, t2 in itertools.product(grid, grid):
        T = FourParamForm(args.n, float(t1), float(t2), float(t2), b)
        pred = solvability_predicates(T)
        rec = {"family": fam, "n": args.n, "T1": T.a1, "T2": T.a2, "T3": T.a3, "b": b}
        rec.update(ratio_bound=pred.ratio_bound, c_condition=pred.c_condition, c=pred.c_value)
        try:
            res = solve_four_param_homotopy(T)
            rec.update(solved=True, kappa=res.kappa, residual=res.residual)
        except HopfRicciError as exc:
            rec.update(solved=False, error=type(exc).__name__)
        recs.append(rec)
    return Output(fields, recs)


def scan_ancient(args) -> Output:
    fam = _family(args)
    grid = _grid(args.grid)
    if fam == "su2":
        points = [Su2Metric(float(nu), 2.0, 2.0) for nu in grid]
    elif fam == "four-param":
        # U(1)-symmetric fibres (x1, x, x) with s = 1
        points = [FourParamMetric(args.n, float(x1), float(x), float(x), 1.0) for x1, x in itertools.product(grid, grid)]
    else:
        family = _fibration(fam, args.n)
        points = [TwoSummandMetric(family, float(r), 1.0) for r in grid]
    fields = _ancient_fields(fam)
    recs = []
    for g in points:
        rec = _ancient_record(fam, args.n, g, ancient_iterate(g, args.max_steps))
        if fam == "four-param":
            rec["hypothesis_x1_le_x_le_s"] = spu1_ancient_hypothesis(g)
        recs.append(rec)
    if fam == "four-param":
        fields.append("hypothesis_x1_le_x_le_s")
    return Output(fields, recs)


def scan_uniqueness(args) -> Output:
    if args.grid is not None:
        axis = _grid(args.grid)
        pts = np.array(list(itertools.product(axis, axis, axis)))
        rep = sp1_uniqueness_scan(args.n, points=pts)
    else:
        rep = sp1_uniqueness_scan(args.n, samples=args.samples, seed=args.seed)
    fields = ["n", "samples", "flag_count", "max_identity_defect"]
    rec = {"n": rep.n, "samples": rep.samples, "flag_count": rep.flag_count, "max_identity_defect": rep.max_identity_defect}
    return Output(fields, [rec])


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, family: bool = True) -> None:
    if family:
        p.add_argument("family_pos", nargs="?", metavar="family", help=" | ".join(FAMILIES))
        p.add_argument("--family", help="alternative to the positional family")
    p.add_argument("--n", type=int, default=1, help="quaternionic dimension parameter (default 1)")
    p.add_argument("--x", help="fibre entries x1,x2,x3")
    p.add_argument("--t", type=float, help="vertical coefficient")
    p.add_argument("--s", type=float, help="horizontal coefficient (default 1)")
    p.add_argument("--T", help="target entries, comma separated")
    p.add_argument("--b", type=float, help="target horizontal coefficient")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--grid", help="lo:hi:count")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=0, help="seed for the PCG64 generator")
    p.add_argument("--samples", type=int, default=10**6, help="random samples for scan uniqueness")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopfricci", description="Ricci curvature, prescribed Ricci and Ricci iteration on homogeneous spheres.")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers: dict[str, Callable] = {
        "ricci": cmd_ricci,
        "solve": cmd_solve,
        "iterate": cmd_iterate,
        "ancient": cmd_ancient,
        "einstein": cmd_einstein,
    }
    for name, fn in handlers.items():
        p = sub.add_parser(name)
        _common(p)
        p.set_defaults(handler=fn)
    p = sub.add_parser("c-function")
    _common(p, family=False)
    p.set_defaults(handler=cmd_c_function)
    scan = sub.add_parser("scan")
    kinds = scan.add_subparsers(dest="scan_kind", required=True)
    for name, fn in (("solvability", scan_solvability), ("ancient", scan_ancient), ("uniqueness", scan_uniqueness)):
        p = kinds.add_parser(name)
        _common(p, family=name != "uniqueness")
        p.set_defaults(handler=fn)
    return parser


def _validate(args) -> None:
    if args.n < 1:
        raise UsageError("--n must be a positive integer")
    if args.tol <= 0:
        raise UsageError("--tol must be positive")
    if args.max_iter < 1 or args.max_steps < 1:
        raise UsageError("--max-iter and --max-steps must be at least 1")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        out = args.handler(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except ValueError as exc:
        # invalid domain values caught by the library's validators
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    emit_records(out.records, out.fields, args.format, args.out)
    return 1 if out.failed else 0


if __name__ == "__main__":
    sys.exit(main())
