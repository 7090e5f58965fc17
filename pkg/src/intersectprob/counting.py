"""Counting integer points of {0..c}^m that satisfy a system of constraints.

Each coordinate is uniform on {0, ..., c}.  A constraint given as a boolean
predicate yields the bad event "predicate fails"; a bare arithmetic
expression l(x) is read as l(x) <= 0, so its bad event is l(x) > 0.  The
count is (c + 1)^m times P(no bad event).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError, ResourceError
from .interpolate import Estimate, estimate_log_intersection
from .jointprob import DEFAULT_ENUMERATION_BUDGET
from .model import CoordinateSpace, ProductSpace
from .predparse import (ARITH, Compare, Node, Not, Num, compile_predicate, evaluate, node_type,
                        parse_predicate)


@dataclass(frozen=True)
class CountResult:
    estimate: float
    log_estimate: float
    total: int
    exact: int | None
    result: Estimate


def cube_space(cube_side: int, dim: int) -> ProductSpace:
    if cube_side < 1 or dim < 1:
        raise InputError("cube side and dimension must be positive")
    return ProductSpace(tuple(CoordinateSpace.uniform(f"x{j + 1}", range(cube_side + 1)) for j in range(dim)))


def violation(constraint: Node) -> Node:
    """The bad event for a constraint."""
    if node_type(constraint) == ARITH:
        return Compare(">", constraint, Num(Fraction(0)))
    return Not(constraint)


def read_constraints(path) -> list[str]:
    """A JSON list of strings, or one constraint per line ('#' starts a comment)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        items = json.loads(text)
        if not all(isinstance(s, str) for s in items):
            raise InputError("constraint file must be a list of strings")
        return items
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    return [ln for ln in lines if ln]


def parse_constraints(texts, dim: int) -> list[Node]:
    return [parse_predicate(t, dim, allow_arithmetic=True) for t in texts]


def exact_count(space: ProductSpace, constraints: list[Node], budget: int = DEFAULT_ENUMERATION_BUDGET) -> int:
    """Number of cube points satisfying every constraint, by enumerating the cube."""
    dims = space.dims(range(space.m))
    if math.prod(dims) > budget:
        raise ResourceError(f"cube has {math.prod(dims)} points, over the budget of {budget}")
    env = {}
    for j, c in enumerate(space.coords):
        shape = [1] * space.m
        shape[j] = c.size
        env[j + 1] = np.array(c.atoms, dtype=object).reshape(shape)
    ok = np.ones(dims, dtype=bool)
    for node in constraints:
        ok &= ~np.broadcast_to(evaluate(violation(node), env), dims)
    return int(ok.sum())


def count_integer_points(constraints, cube_side: int, dim: int, epsilon: float, *,
                         precision: str = "double", budget: int = DEFAULT_ENUMERATION_BUDGET,
                         with_exact: bool = True) -> CountResult:
    """Estimate |{x in {0..c}^m : all constraints hold}| within relative error ``epsilon``
    (certified when every bad event passes the smallness condition)."""
    space = cube_space(cube_side, dim)
    nodes = [parse_constraints([c], dim)[0] if isinstance(c, str) else c for c in constraints]
    events = [compile_predicate(space, violation(node), f"l{i + 1}") for i, node in enumerate(nodes)]
    if not 0 < epsilon < 1:
        raise InputError("epsilon must lie in (0, 1)")
    # |log error| <= log(1 + eps) keeps the relative error of |S| within eps
    est = estimate_log_intersection(space, events, math.log1p(epsilon), precision=precision, budget=budget)
    total = (cube_side + 1) ** dim
    exact = None
    if with_exact and total <= budget:
        exact = exact_count(space, nodes, budget)
    log_est = math.log(total) + est.log_value
    return CountResult(math.exp(log_est), log_est, total, exact, est)
