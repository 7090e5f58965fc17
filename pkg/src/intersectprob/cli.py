"""Command-line interface.

Exit codes: 0 success (certified), 1 input/parse error, 2 estimate or check
produced under violated smallness conditions, 3 enumeration budget exceeded,
4 numeric or plan-construction failure, 5 an event has probability 1.
"""

from __future__ import annotations

import argparse
import decimal
import json
import random
import sys
from fractions import Fraction

from .counting import count_integer_points, read_constraints
from .errors import (DegenerateProbabilityError, InputError, NumericError, PlanConstructionError,
                     ResourceError)
from .instance import load_instance
from .interpolate import Guarantee, estimate_log_intersection
from .jointprob import DEFAULT_ENUMERATION_BUDGET
from .model import build_dependency_graph, check_lll, check_smallness, normalize_support
from .oracle import exact_intersection_probability, full_p_polynomial, random_instance, root_localize

EXIT_OK, EXIT_INPUT, EXIT_VIOLATED, EXIT_RESOURCE, EXIT_NUMERIC, EXIT_DEGENERATE = 0, 1, 2, 3, 4, 5
DEFAULT_SEED = 20250913


def frac(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def dec(p: Fraction, digits: int = 30) -> str:
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        return str(decimal.Decimal(p.numerator) / decimal.Decimal(p.denominator))


def condition_rows(report) -> list:
    return [
        {"name": r.name, "probability": frac(r.probability), "r": r.r, "degree": r.degree, "mu": r.mu,
         "threshold": frac(r.threshold), "pass": r.passes}
        for r in report.rows
    ]


def _emit(payload: dict, fmt: str, text_lines) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines(payload):
            print(line)


def _estimate_text(d):
    yield f"value      {d['value']:.17g}"
    yield f"log_value  {d['log_value']:.17g}"
    yield f"epsilon    {d['epsilon']:g}"
    yield f"K_used     {d['K_used']}"
    yield f"guarantee  {d['guarantee']}"
    yield f"Delta      {d['Delta']}"
    yield from _condition_text(d["conditions"])
    if d["plan"]:
        p = d["plan"]
        yield f"plan       alpha={p['alpha_exact']} rho={p['rho_exact']} K={p['K']} tail_bound={p['tail_bound']:.3e}"


def _condition_text(rows):
    if rows:
        yield f"{'event':<12}{'P(A_i)':>24}{'r':>4}{'deg':>5}{'mu':>4}{'threshold':>24}  pass"
    for r in rows:
        yield (f"{r['name']:<12}{r['probability']:>24}{r['r']:>4}{r['degree']:>5}{r['mu']:>4}"
               f"{r['threshold']:>24}  {'yes' if r['pass'] else 'NO'}")


def cmd_estimate(args) -> int:
    space, events = load_instance(args.instance)
    est = estimate_log_intersection(space, events, args.epsilon, precision=args.precision, budget=args.budget)
    payload = {
        "value": est.value,
        "log_value": est.log_value,
        "epsilon": est.epsilon,
        "K_used": est.K_used,
        "guarantee": est.guarantee.value,
        "Delta": est.conditions.Delta,
        "conditions": condition_rows(est.conditions),
        "plan": est.plan.summary() if est.plan else None,
    }
    _emit(payload, args.format, _estimate_text)
    return EXIT_OK if est.guarantee is Guarantee.CERTIFIED else EXIT_VIOLATED


def cmd_exact(args) -> int:
    space, events = load_instance(args.instance)
    p = exact_intersection_probability(space, events, budget=args.budget)
    payload = {"probability": frac(p), "decimal": dec(p)}
    _emit(payload, args.format, lambda d: [f"{d['probability']}  ({d['decimal']})"])
    return EXIT_OK


def cmd_check(args) -> int:
    space, events = load_instance(args.instance)
    events = [normalize_support(space, e) for e in events]
    graph = build_dependency_graph(space, events)
    report = check_smallness(space, events, graph)
    lll = check_lll(space, events, graph)
    payload = {
        "Delta": report.Delta,
        "events": condition_rows(report),
        "smallness_passes": report.overall,
        "lll": {"s": frac(Fraction(1, report.Delta)), "passes": lll.passes,
                "lower_bound": frac(lll.lower_bound), "lower_bound_decimal": dec(lll.lower_bound, 17)},
    }

    def text(d):
        yield f"Delta {d['Delta']}"
        yield from _condition_text(d["events"])
        yield f"smallness condition: {'holds' if d['smallness_passes'] else 'FAILS'}"
        lo = d["lll"]
        yield f"LLL with s_i = {lo['s']}: {'holds' if lo['passes'] else 'fails'}; bound {lo['lower_bound']} ({lo['lower_bound_decimal']})"

    _emit(payload, args.format, text)
    return EXIT_OK if report.overall else EXIT_VIOLATED


def _instance_roots(space, events, budget):
    events = [normalize_support(space, e) for e in events]
    graph = build_dependency_graph(space, events)
    coeffs = full_p_polynomial(space, events, budget=budget)
    return root_localize(coeffs, Fraction(1, 6 * graph.Delta))


def cmd_roots(args) -> int:
    if args.random is not None:
        rng = random.Random(args.seed)
        zero_free = zero_free_disk = 0
        worst = None
        for _ in range(args.random):
            space, events = random_instance(rng, passing=True)
            rep = _instance_roots(space, events, args.budget)
            zero_free += rep.zero_free
            zero_free_disk += rep.zero_free_disk
            if rep.roots:
                margin = rep.min_dist - rep.delta
                worst = margin if worst is None else min(worst, margin)
        payload = {"instances": args.random, "seed": args.seed, "zero_free": zero_free,
                   "zero_free_disk": zero_free_disk, "worst_margin": worst}
        _emit(payload, args.format, lambda d: [f"{k}: {v}" for k, v in d.items()])
        return EXIT_OK if zero_free == args.random else EXIT_NUMERIC
    if args.instance is None:
        raise InputError("roots needs an instance file or --random N")
    space, events = load_instance(args.instance)
    rep = _instance_roots(space, events, args.budget)
    _emit(rep.to_json(), args.format, lambda d: [f"{k}: {v}" for k, v in d.items()])
    return EXIT_OK


def cmd_count(args) -> int:
    constraints = read_constraints(args.constraints)
    res = count_integer_points(constraints, args.cube_side, args.dim, args.epsilon,
                               precision=args.precision, budget=args.budget)
    est = res.result
    payload = {
        "estimate": res.estimate,
        "relative_error": args.epsilon,
        "cube_points": res.total,
        "exact": res.exact,
        "guarantee": est.guarantee.value,
        "K_used": est.K_used,
        "Delta": est.conditions.Delta,
        "conditions": condition_rows(est.conditions),
        "plan": est.plan.summary() if est.plan else None,
    }

    def text(d):
        yield f"|S| ~ {d['estimate']:.12g}  (relative error {d['relative_error']:g}, {d['guarantee']})"
        yield f"cube points {d['cube_points']}"
        if d["exact"] is not None:
            yield f"exact |S| = {d['exact']}"
        yield from _condition_text(d["conditions"])

    _emit(payload, args.format, text)
    return EXIT_OK if est.guarantee is Guarantee.CERTIFIED else EXIT_VIOLATED


def epsilon_arg(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1)")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse would exit with 2, which is reserved for violated conditions
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--budget", type=int, default=DEFAULT_ENUMERATION_BUDGET,
                        help="maximum tuples enumerated per component (default 2^24)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--precision", choices=("double", "extended"), default="double",
                        help="double switches to extended automatically when K > 64")

    parser = _Parser(prog="intersectprob",
                                     description="Probability that none of a set of dependent events occurs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="interpolation estimate of P(no event)")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=epsilon_arg, default=1e-3)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("exact", parents=[common], help="exact P(no event) by enumeration")
    p.add_argument("instance")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("check", parents=[common], help="smallness and Local Lemma conditions")
    p.add_argument("instance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("roots", parents=[common], help="roots of the full-degree p(z)")
    p.add_argument("instance", nargs="?")
    p.add_argument("--random", type=int, metavar="N", help="summarize N generated instances instead")
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("count-integer-points", parents=[common], help="count cube points satisfying constraints")
    p.add_argument("constraints")
    p.add_argument("--cube-side", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--epsilon", type=epsilon_arg, default=1e-2)
    p.set_defaults(func=cmd_count)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (NumericError, PlanConstructionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DegenerateProbabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
