"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 evaluation failure (tolerance not reachable within the term cap).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import core, figure, verify
from .dominance import CrossingInstance, OneCrossingError, dominance_verify, random_instance

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_EVAL = 0, 1, 2, 3


def _max_terms() -> int:
    raw = os.environ.get("SINCPOW_MAX_TERMS")
    if raw is None:
        return core.DEFAULT_MAX_TERMS
    try:
        val = int(float(raw))
    except ValueError:
        raise SystemExit(f"SINCPOW_MAX_TERMS must be an integer, got {raw!r}")
    return val


def _default_tol(r: float, max_terms: int) -> float:
    # tightest of a fixed ladder reachable within the cap; r near 1 converges slowly
    for tol in (1e-12, 1e-10, 1e-8, 1e-6, 1e-4):
        try:
            core.terms_for_tol(r, tol, max_terms)
            return tol
        except core.EvaluationError:
            continue
    return 1e-4


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def cmd_eval(args, parser) -> int:
    if not 0.0 <= args.x <= 1.0:
        parser.error("--x must lie in [0, 1]")
    if not args.r >= 1:
        parser.error("--r must be >= 1")
    cap = _max_terms()
    tol = args.tol if args.tol is not None else _default_tol(args.r, cap)
    try:
        params = core.EvalParams(r=args.r, tol=tol, max_terms=cap)
    except ValueError as exc:
        parser.error(str(exc))
    val = core.f_r_certified(args.x, params)
    print(f"x={args.x:g} r={args.r:g} value={val.value:.17g} error_bound={val.error_bound:.3e} terms={val.terms}")
    return EXIT_OK


def cmd_minimize(args, parser) -> int:
    if not args.r >= 1:
        parser.error("--r must be >= 1")
    if not args.tol > 0:
        parser.error("--tol must be positive")
    cap = _max_terms()
    tol = args.eval_tol if args.eval_tol is not None else _default_tol(args.r, cap)
    try:
        params = core.EvalParams(r=args.r, tol=tol, max_terms=cap)
    except ValueError as exc:
        parser.error(str(exc))
    xmin = verify.find_min(args.r, args.tol)
    val = core.f_r_certified(xmin, params)
    print(f"r={args.r:g} argmin={xmin:.10f} value={val.value:.17g} error_bound={val.error_bound:.3e}")
    return EXIT_OK


def cmd_verify_all(args, parser) -> int:
    failed = []
    for rep in verify.run_all(args.level, corrupt=args.corrupt_tolerance):
        print(rep.to_json() if args.format == "jsonl" else rep.to_text(), flush=True)
        if not rep.passed:
            failed.append(rep)
    for rep in failed:
        print(f"FAILED {rep.name}: worst margin {rep.worst_margin:.3e} at witness {rep.witness!r}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_figure(args, parser) -> int:
    try:
        spec = figure.FigureSpec(
            k_values=tuple(args.k) if args.k else figure.DEFAULT_K,
            base=args.base,
            n_points=args.n_points,
            fmt=args.format,
        )
    except ValueError as exc:
        parser.error(str(exc))
    table = figure.figure_table(spec)
    out = Path(args.out)
    if spec.fmt == "svg":
        figure.render(table, out, spec.base)
        print(f"wrote {out}")
        return EXIT_OK
    figure.write_csv(table, out)
    print(f"wrote {out}")
    if not args.no_plot:
        plot = Path(args.plot) if args.plot else out.with_suffix(".svg")
        figure.render(table, plot, spec.base)
        print(f"wrote {plot}")
    return EXIT_OK


def cmd_dominance(args, parser) -> int:
    if args.x is not None or args.y is not None:
        if args.x is None or args.y is None or args.t is None:
            parser.error("--x, --y and --t go together")
        inst = CrossingInstance(_floats(args.x), _floats(args.y), args.t)
    else:
        if args.n < 2:
            parser.error("--n must be >= 2")
        inst = random_instance(args.n, args.seed)
    if not args.r >= 1:
        parser.error("--r must be >= 1")
    print("x = " + " ".join(f"{v:.6g}" for v in inst.x))
    print("y = " + " ".join(f"{v:.6g}" for v in inst.y))
    print(f"t = {inst.t:.6g}")
    try:
        res = dominance_verify(inst, args.r)
    except OneCrossingError as exc:
        print(f"hypothesis ({exc.check.hypothesis}) fails: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"step 0: sum_g={res.trace[0]:.12g}")
    for n, (step, s) in enumerate(zip(res.steps, res.trace[1:]), start=1):
        print(f"step {n}: move {step.delta:.6g} from {step.i} to {step.j}  sum_g={s:.12g}")
    print(f"margin={res.margin:.6g} passed={res.passed}")
    return EXIT_OK if res.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sincpow", description="Certified periodized sinc power sums.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="certified value of f_r(x)")
    e.add_argument("--x", type=float, required=True)
    e.add_argument("--r", type=float, required=True)
    e.add_argument("--tol", type=float, help="target error bound (default: tightest reachable of 1e-12..1e-4)")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("minimize", help="argmin of f_r on [0, 1]")
    m.add_argument("--r", type=float, required=True)
    m.add_argument("--tol", type=float, default=1e-6, help="width of the final bracket")
    m.add_argument("--eval-tol", type=float)
    m.set_defaults(func=cmd_minimize)

    v = sub.add_parser("verify-all", help="run every verification suite")
    v.add_argument("--level", choices=sorted(verify.LEVELS), default="fast")
    v.add_argument("--format", choices=("jsonl", "text"), default="jsonl")
    v.add_argument("--corrupt-tolerance", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify_all)

    f = sub.add_parser("figure", help="tabulate (and plot) f_r for r = base**k")
    f.add_argument("--out", required=True)
    f.add_argument("--format", choices=("csv", "svg"), default="csv")
    f.add_argument("--k", type=int, nargs="+")
    f.add_argument("--base", type=float, default=1.02)
    f.add_argument("--n-points", type=int, default=1001)
    f.add_argument("--plot", help="where to render the plot next to the CSV (default: OUT with .svg)")
    f.add_argument("--no-plot", action="store_true")
    f.set_defaults(func=cmd_figure)

    d = sub.add_parser("dominance", help="mass-transfer trace for a one-crossing pair")
    d.add_argument("--n", type=int, default=5)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--r", type=float, default=2.0)
    d.add_argument("--x", help="explicit x, comma or space separated")
    d.add_argument("--y")
    d.add_argument("--t", type=float)
    d.set_defaults(func=cmd_dominance)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except core.EvaluationError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_EVAL


if __name__ == "__main__":
    sys.exit(main())
