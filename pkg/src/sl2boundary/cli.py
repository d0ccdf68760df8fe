"""Command-line front end: ``sl2boundary <verb> [options]``.

Exit codes: 0 pass, 1 failed verification, 2 parse error, 3 domain error,
4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from typing import List, Optional

from .errors import ParseError, Sl2BoundaryError
from .exact import format_rational
from .report import Report, Timer, emit_report

log = logging.getLogger("sl2boundary")

ORDER_ENV = "SL2BOUNDARY_ORDER"
ORDER_WARN = 40


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(message)


def _default_order() -> int:
    raw = os.environ.get(ORDER_ENV)
    if raw is None:
        return 10
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{ORDER_ENV} must be an integer, got {raw!r}")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", text, 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--deterministic", action="store_true", help="omit timing so output is byte-stable")
    common.add_argument("--output", help="write the report to this file instead of stdout")

    p = _ArgParser(prog="sl2boundary", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_ArgParser)

    s = sub.add_parser("series", parents=[common], help="coefficient table of K, G, F or H")
    s.add_argument("--kind", choices=("K", "G", "F", "H"), required=True)
    s.add_argument("--h0", default="generic")
    s.add_argument("--order", type=int)

    a = sub.add_parser("algebra", parents=[common], help="normal-order an operator word")
    a.add_argument("--word", required=True, help='e.g. "y x x" or "y O"')
    a.add_argument("--commutator", help="second word; report [word, commutator]")
    a.add_argument("--h0", default="generic", help="weight used by named blocks")
    a.add_argument("--weight", default="h0", help="weight of the target section, an expression in h0")
    a.add_argument("--order", type=int)
    a.add_argument("--contraction", action="store_true", help="I^2 = 0 contraction")

    v = sub.add_parser("solve", parents=[common], help="boundary expansion in the half-space model")
    v.add_argument("--kind", choices=("first", "second", "log", "logdensity"), required=True)
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--w0", default="0")
    v.add_argument("--f0", required=True, help="initial data as a field expression")
    v.add_argument("--order", type=int)
    v.add_argument("--logtau", help="representative of log tau (default: flat scale)")
    v.add_argument("--alpha", help="requested leading exponent (second kind)")

    g = sub.add_parser("gjms", parents=[common], help="P_k and its boundary constant")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--trials", type=int, default=5)

    q = sub.add_parser("qcurv", parents=[common], help="holographic Q-curvature of exp(omega)")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--omega", required=True)
    q.add_argument("--allow-odd", action="store_true")

    c = sub.add_parser("verify", parents=[common], help="run verification suites")
    c.add_argument("--suite", choices=("all", "sl2", "series", "model", "logops"), default="all")
    return p


def _order(args) -> int:
    order = args.order if getattr(args, "order", None) is not None else _default_order()
    if order < 0:
        raise ParseError("order must be nonnegative")
    if order > ORDER_WARN:
        log.warning("order %d exceeds %d; coefficient growth may be slow", order, ORDER_WARN)
    return order


def _cmd_series(args, rep: Report):
    from .series import series_table

    h0 = "generic" if args.h0 == "generic" else _rational(args.h0)
    rep.payload = series_table(args.kind, h0, _order(args))


def _cmd_algebra(args, rep: Report):
    from .algebra import Engine, FormalSection, commutator
    from .parsing import parse_weight_expr, parse_word
    from .series import resolve_weight

    order = _order(args)
    h0 = resolve_weight(None if args.h0 == "generic" else _rational(args.h0))
    weight = parse_weight_expr(args.weight).substitute(h0)
    target = FormalSection("f", weight)
    engine = Engine(args.contraction)
    # series blocks carry two spare orders so truncation never leaks into the kept range
    word = parse_word(args.word, h0, order + 2)
    if args.commutator:
        other = parse_word(args.commutator, h0, order + 2)
        form = commutator(word, other, target, engine=engine)
    else:
        form = word.apply(target, engine, max_degree=order if _has_series(word) else None)
    rep.payload = {"canonical": form.to_text(), "terms": form.to_json()}


def _has_series(expr) -> bool:
    from .algebra import SeriesFactor

    return any(isinstance(f, SeriesFactor) for _, fs in expr.words for f in fs)


def _cmd_solve(args, rep: Report):
    from . import model
    from .parsing import parse_field_expr

    order = _order(args)
    d = args.d
    if d < 3:
        raise model.DomainError("the model needs d >= 3")
    n = d - 1
    w0 = _rational(args.w0)
    logtau = parse_field_expr(args.logtau, n) if args.logtau else None
    if args.kind == "first":
        sol = model.solve_first_kind(parse_field_expr(args.f0, n, w0), d, order)
    elif args.kind == "second":
        h0 = d + 2 * w0
        alpha = _rational(args.alpha) if args.alpha else None
        weight = w0 if alpha == 0 else w0 - h0 + 1
        sol = model.solve_second_kind(parse_field_expr(args.f0, n, weight), d, w0, order, alpha)
    elif args.kind == "log":
        sol = model.solve_log_kind(parse_field_expr(args.f0, n, w0), d, order, logtau)
    else:
        sol = model.solve_log_density(parse_field_expr(args.f0, n, 0), d, order, logtau)
    payload = sol.to_json()
    if sol.kind in ("LOG", "LOGDENSITY"):
        payload["log_coefficient"] = sol.log_coefficient().to_text()
    rep.payload = payload
    res = sol.residual_order()
    expect = None if sol.exact else order
    ok = res is None or (expect is not None and res >= (sol.alpha + order if sol.kind == "SECOND" else order))
    rep.add("residual order", f">= {expect if expect is not None else 'inf'}", "inf" if res is None else format_rational(res), "DERIVED", passed=ok)


def _cmd_gjms(args, rep: Report):
    from .model import gjms_constant

    g = gjms_constant(args.k, args.d, args.trials)
    payload = g.to_json()
    payload["operator"] = g.operator.to_json()
    payload["boundary_operator"] = g.operator.boundary_part().to_text()
    rep.payload = payload
    if args.k % 2:
        rep.add("boundary restriction", "0", "0" if g.zero_restriction else "nonzero", "REFERENCE", passed=g.zero_restriction)
    else:
        got = "inconsistent" if g.constant is None else format_rational(abs(g.constant))
        rep.add("|c|", str(g.expected_abs), got, "REFERENCE", passed=g.passed)
    rep.add("tangential", "True", str(g.tangential), "REFERENCE")


def _cmd_qcurv(args, rep: Report):
    from .model import q_holographic
    from .parsing import parse_field_expr

    omega = parse_field_expr(args.omega, args.n, 0)
    q = q_holographic(omega, args.n, allow_odd=args.allow_odd)
    rep.payload = {"n": args.n, "Q": q.to_text(), "critical": args.n % 2 == 0}


def _cmd_verify(args, rep: Report):
    from .verify import run_suite

    rep.extend(run_suite(args.suite))


COMMANDS = {
    "series": _cmd_series,
    "algebra": _cmd_algebra,
    "solve": _cmd_solve,
    "gjms": _cmd_gjms,
    "qcurv": _cmd_qcurv,
    "verify": _cmd_verify,
}


_SIGNED = ("--w0", "--alpha", "--h0", "--weight")


def _glue_signed(argv: List[str]) -> List[str]:
    # argparse would read "--w0 -1/4" as two options
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _SIGNED and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run_command(argv: List[str]):
    """Parse and execute; returns ``(report, exit_code, args)``."""
    args = build_parser().parse_args(_glue_signed(list(argv)))
    rep = Report()
    with Timer() as t:
        COMMANDS[args.verb](args, rep)
    rep.elapsed = t.elapsed
    return rep, (0 if rep.status == "pass" else 1), args


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    fmt = "json"
    deterministic = "--deterministic" in argv
    output = None
    try:
        rep, code, args = run_command(argv)
        fmt, output = args.format, args.output
    except Sl2BoundaryError as exc:
        rep = Report(error=f"{type(exc).__name__}: {exc}")
        extra = getattr(exc, "h0", None)
        if extra is not None:
            rep.payload = {"h0": str(extra)}
        code = exc.exit_code
        if "--format" in argv:
            i = argv.index("--format")
            if i + 1 < len(argv) and argv[i + 1] in ("json", "csv", "text"):
                fmt = argv[i + 1]
    except Exception as exc:  # anything else is a bug surfaced as an internal error
        log.exception("internal error")
        rep = Report(error=f"internal: {exc}")
        code = 4
    data = emit_report(rep, fmt, deterministic)
    if output:
        with open(output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
