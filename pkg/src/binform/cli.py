"""Command-line front end.

Subcommands mirror the library modules:

  smooth       enumerate R-smooth integers up to Y
  dirichlet    rational approximation a/q with |q*alpha - a| <= 1/N
  expsum       evaluate one of the exponential sums (T, S, xi, weyl)
  check        verdict records for the named inequality checks
  exponents    the admissible-exponent table for one (k, l)
  search       exhaustive fractional-part minimization over a box
  reduce       the diagonalizing reduction chain for a form
  find-small   constructive small fractional part via reduce + lift
  run          execute experiment specs, appending JSONL records
  report       flatten JSONL records into a csv/md table

All JSON output is printed with sorted keys. Budgets: every potentially
expensive command takes --budget; the BINFORM_BUDGET environment variable
sets a global default.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction

from .errors import BinformError
from .expsums import (
    XiParams,
    appendix_sum,
    lemma21_check,
    lemma31_ratio,
    sum_S,
    sum_T,
    sum_Xi,
    weyl_sum,
)
from .exponents import ExponentTable
from .forms import BinaryForm, parse_form_literal
from .harness import (
    ExperimentSpec,
    SplitMix64,
    read_records,
    report as records_report,
    run as run_spec,
    write_records,
)
from .numerics import PrecReal
from .rational import dirichlet_approx
from .reduction import find_small_with_trace, reduce
from .search import SearchBox, min_fracpart, min_fracpart_smooth_y
from .smooth import enumerate_smooth

_LEMMA21_SLACK = 2.0 ** -30


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


def _real_form(text: str) -> BinaryForm:
    form = parse_form_literal(text)
    if not isinstance(form, BinaryForm):
        raise BinformError(
            "integer forms (coeffs=[...]) take only integer values; this "
            "command needs a real form: k=.. l=.. alpha_k=.. alphas=[..]")
    return form


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# ------------------------------------------------------------- subcommands


def _cmd_smooth(args) -> int:
    s = enumerate_smooth(args.Y, args.R)
    out = {"Y": s.bound_Y, "R": s.smoothness_R, "count": len(s)}
    if not args.count_only:
        out["members"] = list(s.members)
    _emit(out)
    return 0


def _cmd_dirichlet(args) -> int:
    alpha = PrecReal.parse(args.alpha)
    r = dirichlet_approx(alpha, args.N, exact_best=args.exact_best)
    _emit({"alpha": args.alpha, "N": args.N, "a": r.a, "q": r.q,
           "err": r.err, "bound_N": r.bound_N,
           "exact_best": args.exact_best})
    return 0


def _cmd_expsum(args) -> int:
    t0 = time.perf_counter()
    if args.which == "T":
        f = _real_form(args.form)
        out = sum_T(f, args.H, args.X, args.Y, workers=args.threads,
                    budget=args.budget)
        value, params = out.value, out.params
    elif args.which == "S":
        f = _real_form(args.form)
        out = sum_S(f, args.H, args.X, args.Y, args.R,
                    workers=args.threads, budget=args.budget)
        value, params = out.value, out.params
    elif args.which == "xi":
        p = XiParams(V=tuple(float(v) for v in args.V.split(",")),
                     U=args.U, L=args.L, k=args.k, l=args.l,
                     beta=PrecReal.parse(args.beta))
        value = sum_Xi(p, workers=args.threads, budget=args.budget)
        params = {"V": list(p.V), "U": p.U, "L": p.L, "k": p.k, "l": p.l,
                  "beta": args.beta, "hypothesis_ok": p.hypothesis_ok}
    else:  # weyl
        value = weyl_sum(PrecReal.parse(args.alpha), args.k, args.X, args.h)
        params = {"alpha": args.alpha, "k": args.k, "X": args.X, "h": args.h}
    elapsed = (time.perf_counter() - t0) * 1000.0
    _emit({"sum": args.which, "params": params, "value": value,
           "elapsed_ms": round(elapsed, 3)})
    return 0


def _check_lemma21(args) -> dict:
    if args.values:
        values = [PrecReal.parse(t).as_fraction()
                  for t in args.values.split(",")]
    else:
        rng = SplitMix64(args.seed)
        lo = Fraction(1, args.H)
        values = [lo + Fraction(rng.next_u64(), 1 << 64) * (1 - 2 * lo)
                  for _ in range(args.N)]
    chk = lemma21_check(values, args.H)
    passed = chk.holds_hypothesis and chk.lhs >= chk.rhs - _LEMMA21_SLACK
    return {"check": "lemma21", "H": args.H, "N": len(values),
            "holds_hypothesis": chk.holds_hypothesis, "lhs": chk.lhs,
            "rhs": chk.rhs, "passed": passed}


def _check_appendix(args) -> dict:
    alpha = float(PrecReal.parse(args.alpha))
    variants = {}
    passed = True
    for v in (1, 2, 3):
        out = appendix_sum(v, alpha, args.N, args.m)
        variants[f"variant{v}"] = {"sum": out.sum, "bound": out.bound,
                                   "ratio": out.ratio}
        passed = passed and 0 < out.ratio <= 32
    return {"check": "appendixA", "alpha": alpha, "N": args.N, "m": args.m,
            "variants": variants, "passed": passed}


def _check_lemma31(args) -> dict:
    f = _real_form(args.form)
    rows = []
    passed = True
    for X in _int_list(args.X_grid):
        H = max(2, round(X ** args.H_exp))
        out = lemma31_ratio(f, H, X, X, eps=args.eps, workers=args.threads,
                            budget=args.budget)
        ok = 0 < out["ratio"] <= 32
        passed = passed and ok
        rows.append({"X": X, "H": H, "T": out["T"], "bound": out["bound"],
                     "ratio": out["ratio"], "q1": out["q1"],
                     "q2": out["q2"], "ok": ok})
    return {"check": "lemma31-trend", "form": f.describe(),
            "eps": args.eps, "rows": rows, "passed": passed}


def _cmd_check(args) -> int:
    out = {"lemma21": _check_lemma21, "appendixA": _check_appendix,
           "lemma31-trend": _check_lemma31}[args.which](args)
    _emit(out)
    return 0 if out["passed"] else 1


def _cmd_exponents(args) -> int:
    table = ExponentTable.build(args.k, args.l, C=args.C, lam=args.lmbda)
    if args.latex:
        print(table.to_latex())
    else:
        _emit(table.to_dict())
    return 0


def _cmd_search(args) -> int:
    f = _real_form(args.form)
    box = SearchBox(x_max=args.X, y_max=args.Y,
                    include_axes=not args.no_axes)
    t0 = time.perf_counter()
    if args.smooth_R is not None:
        res = min_fracpart_smooth_y(f, args.X, args.Y, args.smooth_R,
                                    include_axes=not args.no_axes,
                                    workers=args.threads, budget=args.budget)
    else:
        res = min_fracpart(f, box, workers=args.threads, budget=args.budget)
    elapsed = (time.perf_counter() - t0) * 1000.0
    out = res.to_dict()
    out["form"] = f.describe()
    out["elapsed_ms"] = round(elapsed, 3)
    _emit(out)
    return 0


def _cmd_reduce(args) -> int:
    f = _real_form(args.form)
    trace = reduce(f, args.X, mode=args.mode, delta=args.delta,
                   eta=args.eta, eps=args.eps, H=args.H, C=args.C)
    _emit(trace.to_dict())
    return 0


def _cmd_find_small(args) -> int:
    f = _real_form(args.form)
    t0 = time.perf_counter()
    res, trace = find_small_with_trace(
        f, args.X, mode=args.mode, workers=args.threads, budget=args.budget,
        delta=args.delta, eta=args.eta, eps=args.eps, H=args.H, C=args.C)
    elapsed = (time.perf_counter() - t0) * 1000.0
    out = {"result": res.to_dict(), "trace": trace.to_dict(),
           "elapsed_ms": round(elapsed, 3)}
    _emit(out)
    return 0


def _cmd_run(args) -> int:
    with open(args.spec, encoding="utf-8") as fh:
        loaded = json.load(fh)
    if isinstance(loaded, dict):
        loaded = [loaded]
    specs = [ExperimentSpec.from_dict(d) for d in loaded]
    stamp = _now_utc() if args.timestamp is None else args.timestamp
    records = [run_spec(sp, workers=args.threads, budget=args.budget,
                        timestamp=stamp) for sp in specs]
    n = write_records(records, args.out)
    _emit({"written": n, "out": args.out, "timestamp": stamp})
    return 0


def _cmd_report(args) -> int:
    records = read_records(args.inp)
    sys.stdout.write(records_report(records, fmt=args.format))
    return 0


# ------------------------------------------------------------------ parser


def _add_form(p: argparse.ArgumentParser) -> None:
    p.add_argument("--form", required=True,
                   help='form literal, e.g. "k=3 l=1 alpha_k=sqrt2 '
                        'alphas=[pi,e]" (no spaces inside [..])')


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (default 1)")
    p.add_argument("--budget", type=int, default=None,
                   help="evaluation cap (default: BINFORM_BUDGET or 10^10)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="binform",
        description="fractional parts of binary forms: search, exponents, "
                    "exponential sums, diagonalizing reduction")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("smooth", help="enumerate R-smooth integers in [1,Y]")
    p.add_argument("--Y", type=int, required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(fn=_cmd_smooth)

    p = sub.add_parser("dirichlet",
                       help="rational approximation with |q*alpha - a| <= 1/N")
    p.add_argument("--alpha", required=True,
                   help="real token: decimal, p/q, or named (sqrt2, pi, ...)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--exact-best", action="store_true",
                   help="brute-force the best q <= N instead of convergents")
    p.set_defaults(fn=_cmd_dirichlet)

    p = sub.add_parser("expsum", help="evaluate an exponential sum")
    which = p.add_subparsers(dest="which", required=True)
    t = which.add_parser("T", help="sum over h<=H, x<=X, y<=Y of |inner sum|")
    _add_form(t)
    for name in ("H", "X", "Y"):
        t.add_argument(f"--{name}", type=int, required=True)
    _add_common(t)
    s = which.add_parser("S", help="T restricted to R-smooth y")
    _add_form(s)
    for name in ("H", "X", "Y", "R"):
        s.add_argument(f"--{name}", type=int, required=True)
    _add_common(s)
    xi = which.add_parser("xi", help="the Xi grid sum")
    xi.add_argument("--V", required=True, help="comma list, e.g. 2 or 2,2")
    xi.add_argument("--U", type=float, required=True)
    xi.add_argument("--L", type=float, required=True)
    xi.add_argument("--k", type=int, required=True)
    xi.add_argument("--l", type=int, required=True)
    xi.add_argument("--beta", required=True)
    _add_common(xi)
    w = which.add_parser("weyl", help="|sum_x e(h*alpha*x^k)|")
    w.add_argument("--alpha", required=True)
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--X", type=int, required=True)
    w.add_argument("--h", type=int, default=1)
    w.set_defaults(threads=1, budget=None)
    p.set_defaults(fn=_cmd_expsum)

    p = sub.add_parser("check", help="inequality verdict records")
    which = p.add_subparsers(dest="which", required=True)
    c = which.add_parser("lemma21",
                         help="H-fold sum lower bound under ||x_n|| >= 1/H")
    c.add_argument("--H", type=int, required=True)
    c.add_argument("--N", type=int, default=100,
                   help="number of drawn values (ignored with --values)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--values", default=None,
                   help="explicit comma list of reals instead of drawing")
    c = which.add_parser("appendixA", help="reciprocal-power sum majorants")
    c.add_argument("--alpha", required=True)
    c.add_argument("--N", type=int, required=True)
    c.add_argument("--m", type=int, required=True, help="k - l >= 2")
    c = which.add_parser("lemma31-trend",
                         help="T(alpha) vs two-factor majorant over an X grid")
    _add_form(c)
    c.add_argument("--X-grid", dest="X_grid", required=True,
                   help="comma list of X values")
    c.add_argument("--H-exp", dest="H_exp", type=float, default=0.5,
                   help="H = X^this (default 0.5)")
    c.add_argument("--eps", type=float, default=0.1)
    _add_common(c)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("exponents", help="admissible exponents for (k, l)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, default=1,
                   help="lower-block top degree, 1 <= l <= k-2 (default 1)")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--lambda", dest="lmbda", type=float, default=None)
    p.add_argument("--latex", action="store_true",
                   help="emit a LaTeX comparison table instead of JSON")
    p.set_defaults(fn=_cmd_exponents)

    p = sub.add_parser("search", help="minimize ||Psi(x,y)|| over a box")
    _add_form(p)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--Y", type=int, required=True)
    p.add_argument("--smooth-R", dest="smooth_R", type=int, default=None,
                   help="restrict y to R-smooth integers")
    p.add_argument("--no-axes", action="store_true",
                   help="exclude the x=0 column and y=0 row")
    _add_common(p)
    p.set_defaults(fn=_cmd_search)

    def add_reduce_knobs(q):
        q.add_argument("--mode", choices=("t11", "t13", "t14"),
                       default="t11")
        q.add_argument("--delta", type=float, default=0.05)
        q.add_argument("--eta", type=float, default=0.05)
        q.add_argument("--eps", type=float, default=None)
        q.add_argument("--H", type=float, default=None)
        q.add_argument("--C", type=float, default=1.0)

    p = sub.add_parser("reduce", help="diagonalizing reduction chain")
    _add_form(p)
    p.add_argument("--X", type=int, required=True)
    add_reduce_knobs(p)
    p.set_defaults(fn=_cmd_reduce)

    p = sub.add_parser("find-small",
                       help="small ||Psi|| constructively via reduce + lift")
    _add_form(p)
    p.add_argument("--X", type=int, required=True)
    add_reduce_knobs(p)
    _add_common(p)
    p.set_defaults(fn=_cmd_find_small)

    p = sub.add_parser("run", help="execute experiment specs to JSONL")
    p.add_argument("--spec", required=True,
                   help="JSON file: one spec object or a list of them")
    p.add_argument("--out", required=True, help="JSONL file to append to")
    p.add_argument("--timestamp", default=None,
                   help="pin the record timestamp (default: current UTC)")
    _add_common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("report", help="flatten JSONL records into a table")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--format", choices=("csv", "md"), default="csv")
    p.set_defaults(fn=_cmd_report)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (BinformError, ValueError, OSError) as err:
        print(f"binform: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
