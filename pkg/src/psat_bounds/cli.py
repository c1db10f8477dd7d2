"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 limit exceeded, 4 inconsistency
or failed monotonicity guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bernstein import combine_dual, evaluate_grid
from .bounds_interp import METHODS, bounded_estimate
from .errors import InconsistencyError, LimitExceededError, ParseError
from .expr_core import MonotoneExpression, dual, parse_expression
from .hetero import (
    directional_derivative,
    gradient,
    log_decompose,
    polynomial_curve_bounds,
    rate_curve_bounds,
    to_fraction,
)
from .ie_expansion import truncated_taylor
from .lattice_oracle import brute_limit, count_solutions, density_of_states, exact_bezier
from .sampler import expression_oracle, graph_oracle, sample_minimal_sets
from .sat2graph import export_dot, sat_to_graph

EXIT_PARSE, EXIT_LIMIT, EXIT_INCONSISTENT = 2, 3, 4


def fmt(v) -> str:
    return f"{float(v):.12g}"


def frac(v) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def parse_probabilities(text: str, n_events: int) -> tuple[str, list]:
    """Header ``kind=prob|rate`` then ``<event> <value>`` lines; values decimal or ``p/q``."""
    kind = None
    values: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if kind is None:
            key, _, val = line.replace(" ", "").partition("=")
            if key != "kind" or val not in ("prob", "rate"):
                raise ParseError(f"line {lineno}: expected header kind=prob|rate")
            kind = val
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<event> <value>'")
        try:
            event = int(parts[0])
            value = to_fraction(parts[1])
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"line {lineno}: cannot parse {line!r}") from None
        if not 1 <= event <= n_events:
            raise ParseError(f"line {lineno}: event {event} outside [1, {n_events}]")
        if event in values:
            raise ParseError(f"line {lineno}: event {event} given twice")
        values[event] = value
    if kind is None:
        raise ParseError("probability file is empty")
    missing = [i for i in range(1, n_events + 1) if i not in values]
    if missing:
        raise ParseError(f"no value for events {missing}")
    vals = [values[i] for i in range(1, n_events + 1)]
    if kind == "prob" and any(not 0 <= v <= 1 for v in vals):
        raise ParseError("probabilities must lie in [0, 1]")
    if kind == "rate" and any(v <= 0 for v in vals):
        raise ParseError("rates must be positive")
    return kind, vals


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _load_expr(args) -> MonotoneExpression:
    if not args.expr:
        raise ParseError("--expr is required")
    return parse_expression(_read(args.expr))


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str, sidecar: dict | None = None) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if sidecar is not None:
            Path(args.out + ".json").write_text(
                json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
            )
    else:
        sys.stdout.write(text)


def _grid(args) -> np.ndarray:
    if args.grid < 2:
        raise ParseError("--grid needs at least 2 points")
    return np.linspace(0.0, 1.0, args.grid)


def cmd_exact(args) -> int:
    expr = _load_expr(args)
    beta = exact_bezier(expr, args.limit)
    ts = _grid(args)
    xi = evaluate_grid(beta, ts)
    text = _csv(["t", "xi_exact"], ([fmt(a), fmt(b)] for a, b in zip(ts, xi)))
    sidecar = {
        "n_events": expr.n_events,
        "density_of_states": list(density_of_states(expr, args.limit)),
        "beta": [frac(b) for b in beta],
        "solutions": count_solutions(expr, args.limit),
    }
    _emit(args, text, sidecar)
    return 0


def cmd_bounds(args) -> int:
    expr = _load_expr(args)
    dual_e = dual(expr)
    ts = _grid(args)
    meta: dict = {"depth": args.depth, "cut_depth": args.cut_depth, "method": args.method}
    status = 0
    if args.probs:
        kind, vals = parse_probabilities(_read(args.probs), expr.n_events)
        if kind == "prob":
            cb = polynomial_curve_bounds(
                expr, vals, args.depth, args.cut_depth, args.method,
                n=args.envelope, degree=args.degree, dual_expr=dual_e,
            )
        else:
            rd = log_decompose(vals, "rate")
            cb = rate_curve_bounds(
                expr, rd, args.depth, args.cut_depth, args.method,
                degree=args.degree, dual_expr=dual_e,
            )
        g = cb.grid(len(ts))
        lower, upper = g.get("lower"), g.get("upper")
        est = g["estimate"]
        meta.update(
            parameterization=cb.kind,
            t_star=cb.t_star,
            degree=cb.degree,
            kappa=cb.partial.kappa,
            kappa_bar=cb.partial.kappa_bar,
            estimate_at_t_star=cb.estimate(),
            diagnostics=list(cb.diagnostics),
        )
        if cb.monotone:
            lo, hi = cb.bounds()
            meta.update(lower_at_t_star=lo, upper_at_t_star=hi)
        else:
            sys.stderr.write("monotonicity guard failed; bounds withheld\n")
            status = EXIT_INCONSISTENT
    else:
        head = truncated_taylor(expr, args.depth, 0)
        tail = truncated_taylor(expr, args.cut_depth, 1, dual_expr=dual_e)
        partial = combine_dual(head, tail)
        be = bounded_estimate(partial, args.method)
        lower, est, upper = (evaluate_grid(v, ts) for v in (be.lower, be.estimate, be.upper))
        meta.update(
            parameterization="homogeneous",
            kappa=partial.kappa,
            kappa_bar=partial.kappa_bar,
            lower=[frac(v) for v in be.lower],
            upper=[frac(v) for v in be.upper],
        )
    rows = []
    for i, s in enumerate(ts):
        lo = "" if lower is None else fmt(lower[i])
        hi = "" if upper is None else fmt(upper[i])
        rows.append([fmt(s), lo, fmt(est[i]), hi])
    _emit(args, _csv(["t", "lower", "estimate", "upper"], rows), meta)
    return status


def cmd_sample(args) -> int:
    expr = _load_expr(args)
    if args.seed is None:
        raise ParseError("--seed is required for sampling")
    oracle = graph_oracle(sat_to_graph(expr)) if args.oracle == "graph" else expression_oracle(expr)
    report = sample_minimal_sets(oracle, args.samples, args.seed)
    _emit(args, json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_graph(args) -> int:
    expr = _load_expr(args)
    _emit(args, export_dot(sat_to_graph(expr)))
    return 0


def cmd_importance(args) -> int:
    expr = _load_expr(args)
    if args.probs:
        kind, vals = parse_probabilities(_read(args.probs), expr.n_events)
        if kind == "rate":
            vals = list(log_decompose(vals, "rate").probabilities())
        xs = [float(v) for v in vals]
    elif args.x is not None:
        xs = [args.x] * expr.n_events
    else:
        raise ParseError("importance needs --probs or --x")
    lim = brute_limit(args.limit)
    if expr.n_events > lim:
        raise LimitExceededError(f"N={expr.n_events} exceeds brute-force limit {lim}")
    grad = gradient(expr, xs)
    rows = [[str(i), fmt(x), fmt(g)] for i, (x, g) in enumerate(zip(xs, grad), 1)]
    if args.direction:
        try:
            direction = [float(v) for v in args.direction.split(",")]
        except ValueError:
            raise ParseError("--direction must be comma-separated numbers") from None
        if len(direction) != expr.n_events:
            raise ParseError(f"--direction needs {expr.n_events} entries")
        rows.append(["directional", "", fmt(directional_derivative(expr, xs, direction))])
    _emit(args, _csv(["event", "probability", "importance"], rows))
    return 0


COMMANDS = {
    "exact": cmd_exact,
    "bounds": cmd_bounds,
    "sample": cmd_sample,
    "graph": cmd_graph,
    "importance": cmd_importance,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="psat", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--expr", help="expression file")
    p.add_argument("--probs", help="probability or rate file")
    p.add_argument("--depth", type=int, default=1, help="strut expansion depth")
    p.add_argument("--cut-depth", type=int, default=1, help="cut expansion depth")
    p.add_argument("--method", choices=METHODS, default="linear")
    p.add_argument("--envelope", type=int, default=None, help="envelope order n")
    p.add_argument("--degree", type=int, default=None, help="Bezier degree along a curve")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--limit", type=int, default=None, help="brute-force limit on N")
    p.add_argument("--oracle", choices=("expr", "graph"), default="expr")
    p.add_argument("--x", type=float, default=None, help="homogeneous probability")
    p.add_argument("--direction", default=None, help="comma-separated direction vector")
    p.add_argument("--out", help="output path (default stdout)")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except LimitExceededError as exc:
        sys.stderr.write(f"limit exceeded: {exc}\n")
        return EXIT_LIMIT
    except InconsistencyError as exc:
        sys.stderr.write(f"inconsistent: {exc}\n")
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
