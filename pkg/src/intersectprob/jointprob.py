"""Exact joint probabilities of event intersections and the k-wise sums sigma_k."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError
from .model import DependencyGraph, Event, ProductSpace, build_dependency_graph, event_mass, mass

DEFAULT_ENUMERATION_BUDGET = 2**24
DEFAULT_SUBSET_BUDGET = 2**22


def event_probability(space: ProductSpace, event: Event) -> Fraction:
    return event_mass(space, event)


class JointProbability:
    """Joint probabilities of event subsets with a per-run component cache.

    A subset is split into connected components of the induced dependency
    subgraph.  Components have disjoint coordinate supports, so the joint
    probability is the product of the component probabilities.  Each
    component is computed by enumerating the union of its supports.

    The cache is keyed by the sorted index tuple of a component.  Writes are
    idempotent, so sharing an instance between threads is harmless.
    """

    def __init__(self, space: ProductSpace, events: Sequence[Event], graph: DependencyGraph | None = None,
                 budget: int = DEFAULT_ENUMERATION_BUDGET):
        self.space = space
        self.events = tuple(events)
        self.graph = graph if graph is not None else build_dependency_graph(space, self.events)
        self.budget = budget
        self.cache: dict[tuple, Fraction] = {}

    def component(self, comp: tuple) -> Fraction:
        hit = self.cache.get(comp)
        if hit is not None:
            return hit
        union = sorted(set().union(*(self.events[i].support for i in comp)))
        dims = self.space.dims(union)
        size = math.prod(dims)
        if size > self.budget:
            names = ", ".join(self.events[i].name for i in comp)
            raise ResourceError(
                f"component {{{names}}} spans {size} coordinate tuples, over the budget of {self.budget}"
            )
        pos = {j: a for a, j in enumerate(union)}
        mask = np.ones(dims, dtype=bool)
        for i in comp:
            e = self.events[i]
            shape = [1] * len(union)
            for j, d in zip(e.support, e.table.shape):
                shape[pos[j]] = d
            # supports are sorted, so a reshape is enough to align axes
            mask &= e.table.reshape(shape)
        value = mass(self.space, union, mask)
        self.cache[comp] = value
        return value

    def __call__(self, subset: Iterable[int]) -> Fraction:
        subset = set(subset)
        if any(i < 0 or i >= len(self.events) for i in subset):
            raise InputError(f"subset {sorted(subset)} has indices outside 0..{len(self.events) - 1}")
        result = Fraction(1)
        for comp in self.graph.components(subset):
            result *= self.component(comp)
            if result == 0:
                break
        return result


def joint_probability(space: ProductSpace, events: Sequence[Event], subset: Iterable[int], *,
                      graph: DependencyGraph | None = None, budget: int = DEFAULT_ENUMERATION_BUDGET) -> Fraction:
    """P(intersection of events[i] for i in subset); 1 for the empty subset."""
    return JointProbability(space, events, graph, budget)(subset)


@dataclass(frozen=True)
class IntersectionSeries:
    """sigma_0..sigma_K and the coefficients a_k = (-1)^k sigma_k of p(z)."""

    K: int
    sigma: tuple

    @property
    def coeffs(self) -> tuple:
        return tuple(s if k % 2 == 0 else -s for k, s in enumerate(self.sigma))

    def padded(self, K: int) -> tuple:
        """Coefficients a_0..a_K, zero beyond the computed order."""
        c = self.coeffs
        return c[: K + 1] + (Fraction(0),) * max(0, K + 1 - len(c))


def sigma_series(space: ProductSpace, events: Sequence[Event], graph: DependencyGraph | None, K: int, *,
                 budget: int = DEFAULT_ENUMERATION_BUDGET, subset_budget: int = DEFAULT_SUBSET_BUDGET,
                 joint: JointProbability | None = None) -> IntersectionSeries:
    n = len(events)
    if not 0 <= K <= n:
        raise InputError(f"truncation order {K} outside 0..{n}")
    n_subsets = sum(math.comb(n, k) for k in range(1, K + 1))
    if n_subsets > subset_budget:
        raise ResourceError(f"sigma_1..sigma_{K} need {n_subsets} subsets, over the budget of {subset_budget}")
    if joint is None:
        joint = JointProbability(space, events, graph, budget)
    sigma = [Fraction(1)]
    for k in range(1, K + 1):
        sigma.append(sum((joint(s) for s in combinations(range(n), k)), Fraction(0)))
    return IntersectionSeries(K, tuple(sigma))
