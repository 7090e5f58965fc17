"""Finite product probability spaces, events with minimal support, and the
dependency graph between events.

Coordinates are indexed from 0 inside the library.  File formats and the
predicate language use 1-based indices and convert at the boundary.

All probabilities are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

DELTA_FLOOR = 5


def as_fraction(value) -> Fraction:
    """Exact conversion of ints, Fractions and ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"expected an exact rational, got {type(value).__name__} {value!r}")


@dataclass(frozen=True)
class CoordinateSpace:
    """One finite factor of the product space."""

    name: str
    atoms: tuple
    probs: tuple

    def __post_init__(self):
        atoms = tuple(self.atoms)
        probs = tuple(as_fraction(p) for p in self.probs)
        if not atoms:
            raise InputError(f"coordinate {self.name!r} has no atoms")
        if len(atoms) != len(probs):
            raise InputError(
                f"coordinate {self.name!r}: {len(atoms)} atoms but {len(probs)} probabilities"
            )
        if len(set(atoms)) != len(atoms):
            raise InputError(f"coordinate {self.name!r} has repeated atoms")
        if any(p < 0 for p in probs):
            raise InputError(f"coordinate {self.name!r} has a negative probability")
        if sum(probs) != 1:
            raise InputError(f"coordinate {self.name!r}: probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, name: str, atoms: Sequence) -> "CoordinateSpace":
        atoms = tuple(atoms)
        return cls(name, atoms, (Fraction(1, len(atoms)),) * len(atoms))

    @property
    def size(self) -> int:
        return len(self.atoms)

    @property
    def is_numeric(self) -> bool:
        return all(isinstance(a, int) and not isinstance(a, bool) for a in self.atoms)

    def index_of(self, atom) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise InputError(f"{atom!r} is not an atom of coordinate {self.name!r}") from None

    def integer_weights(self) -> tuple[tuple[int, ...], int]:
        """Probabilities as integer numerators over one common denominator."""
        den = math.lcm(*(p.denominator for p in self.probs))
        return tuple(p.numerator * (den // p.denominator) for p in self.probs), den


@dataclass(frozen=True)
class ProductSpace:
    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise InputError("a product space needs at least one coordinate")
        for c in coords:
            if not isinstance(c, CoordinateSpace):
                raise InputError("coordinates must be CoordinateSpace instances")
        object.__setattr__(self, "coords", coords)

    @property
    def m(self) -> int:
        return len(self.coords)

    def dims(self, support: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.coords[j].size for j in support)

    def __len__(self):
        return len(self.coords)


def mass(space: ProductSpace, support: Sequence[int], mask: np.ndarray) -> Fraction:
    """Exact probability of the set of support tuples where ``mask`` is true."""
    mask = np.asarray(mask, dtype=bool)
    if not support:
        return Fraction(int(bool(mask)))
    weights = [space.coords[j].integer_weights() for j in support]
    den = math.prod(d for _, d in weights)
    bound = mask.size * math.prod(max(w) for w, _ in weights)
    # int64 contraction is exact as long as no partial sum can overflow
    dtype = np.int64 if bound < 2**62 else object
    acc = mask.astype(dtype)
    for w, _ in reversed(weights):
        acc = np.tensordot(acc, np.array(w, dtype=dtype), axes=([acc.ndim - 1], [0]))
    return Fraction(int(acc), den)


@dataclass(frozen=True, eq=False)
class Event:
    """A named event given by its coordinate support and a boolean table.

    ``table[t]`` is true when the point whose support coordinates take atom
    indices ``t`` lies in the event.  The table for an empty support is a
    0-d array (a constant event).
    """

    name: str
    support: tuple
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        support = tuple(int(j) for j in self.support)
        if list(support) != sorted(set(support)):
            raise InputError(f"event {self.name!r}: support must be strictly increasing")
        table = np.array(self.table, dtype=bool)
        if table.ndim != len(support):
            raise InputError(
                f"event {self.name!r}: table has {table.ndim} axes for a support of size {len(support)}"
            )
        table.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "table", table)

    @property
    def r(self) -> int:
        return len(self.support)

    def validate_against(self, space: ProductSpace) -> None:
        if any(j < 0 or j >= space.m for j in self.support):
            raise InputError(f"event {self.name!r} refers to a coordinate outside the space")
        if self.table.shape != space.dims(self.support):
            raise InputError(
                f"event {self.name!r}: table shape {self.table.shape} does not match "
                f"coordinate sizes {space.dims(self.support)}"
            )

    def is_minimal(self) -> bool:
        return all(not _constant_along(self.table, ax) for ax in range(self.table.ndim))

    def contains(self, space: ProductSpace, point: Sequence) -> bool:
        """Membership of a full point given by atom values."""
        idx = tuple(space.coords[j].index_of(point[j]) for j in self.support)
        return bool(self.table[idx])

    def __eq__(self, other):
        if not isinstance(other, Event):
            return NotImplemented
        return (
            self.name == other.name
            and self.support == other.support
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.name, self.support, self.table.tobytes()))

    @classmethod
    def from_tuples(cls, space: ProductSpace, name: str, support, tuples) -> "Event":
        """Event true exactly on the listed atom-value tuples over ``support``."""
        support = tuple(support)
        order = sorted(range(len(support)), key=lambda i: support[i])
        if len(set(support)) != len(support):
            raise InputError(f"event {name!r}: repeated coordinate in support")
        sorted_support = tuple(support[i] for i in order)
        for j in sorted_support:
            if j < 0 or j >= space.m:
                raise InputError(f"event {name!r} refers to coordinate {j + 1}, space has {space.m}")
        table = np.zeros(space.dims(sorted_support), dtype=bool)
        for tup in tuples:
            if len(tup) != len(support):
                raise InputError(f"event {name!r}: tuple {tup!r} has the wrong length")
            idx = tuple(space.coords[support[i]].index_of(tup[i]) for i in order)
            table[idx] = True
        return normalize_support(space, cls(name, sorted_support, table))


def _constant_along(table: np.ndarray, axis: int) -> bool:
    first = np.take(table, [0], axis=axis)
    return bool(np.all(table == first))


def normalize_support(space: ProductSpace, raw_event: Event) -> Event:
    """Project out every coordinate the event's table does not depend on."""
    raw_event.validate_against(space)
    table = raw_event.table
    keep = []
    for ax, j in enumerate(raw_event.support):
        if not _constant_along(table, ax):
            keep.append(j)
    if len(keep) == raw_event.r:
        return raw_event
    # dropping a constant axis never changes constancy along the others
    idx = tuple(slice(None) if j in keep else 0 for j in raw_event.support)
    return Event(raw_event.name, tuple(keep), table[idx])


@dataclass(frozen=True)
class DependencyGraph:
    n: int
    adjacency: tuple  # frozenset of neighbours per event
    r: tuple

    @property
    def degrees(self) -> tuple:
        return tuple(len(a) for a in self.adjacency)

    @property
    def Delta(self) -> int:
        return max((DELTA_FLOOR, *self.degrees))

    @property
    def mu(self) -> tuple:
        return tuple(min(r, d + 1) for r, d in zip(self.r, self.degrees))

    def components(self, subset: Iterable[int]) -> list[tuple]:
        """Connected components of the subgraph induced by ``subset``."""
        remaining = set(subset)
        comps = []
        while remaining:
            start = min(remaining)
            stack, comp = [start], {start}
            remaining.discard(start)
            while stack:
                i = stack.pop()
                for j in self.adjacency[i] & remaining:
                    remaining.discard(j)
                    comp.add(j)
                    stack.append(j)
            comps.append(tuple(sorted(comp)))
        return comps


def build_dependency_graph(space: ProductSpace, events: Sequence[Event]) -> DependencyGraph:
    for e in events:
        e.validate_against(space)
        if not e.is_minimal():
            raise InputError(f"event {e.name!r} is not normalized; call normalize_support first")
    by_coord: dict[int, set] = {}
    for i, e in enumerate(events):
        for j in e.support:
            by_coord.setdefault(j, set()).add(i)
    adjacency = []
    for i, e in enumerate(events):
        nbrs = set()
        for j in e.support:
            nbrs |= by_coord[j]
        nbrs.discard(i)
        adjacency.append(frozenset(nbrs))
    return DependencyGraph(len(events), tuple(adjacency), tuple(e.r for e in events))


def event_mass(space: ProductSpace, event: Event) -> Fraction:
    return mass(space, event.support, event.table)


@dataclass(frozen=True)
class EventCondition:
    name: str
    probability: Fraction
    r: int
    degree: int
    mu: int
    threshold: Fraction
    passes: bool


@dataclass(frozen=True)
class SmallnessReport:
    Delta: int
    rows: tuple
    overall: bool


def smallness_threshold(Delta: int, mu: int) -> Fraction:
    return Fraction(1, (3 * Delta) ** (3 * mu))


def check_smallness(space: ProductSpace, events: Sequence[Event], graph: DependencyGraph) -> SmallnessReport:
    """Compare each P(A_i) with (3 Delta)^(-3 mu_i), strictly and exactly."""
    Delta = graph.Delta
    rows = []
    for e, deg, mu in zip(events, graph.degrees, graph.mu):
        p = event_mass(space, e)
        thr = smallness_threshold(Delta, mu)
        rows.append(EventCondition(e.name, p, e.r, deg, mu, thr, p < thr))
    return SmallnessReport(Delta, tuple(rows), all(r.passes for r in rows))


@dataclass(frozen=True)
class LLLReport:
    passes: bool
    lower_bound: Fraction
    s: tuple
    per_event: tuple  # (P(A_i), s_i * prod_{j in Gamma_i} (1 - s_j))


def check_lll(space: ProductSpace, events: Sequence[Event], graph: DependencyGraph, s=None) -> LLLReport:
    """Local Lemma condition with weights ``s`` (default ``1/Delta`` for every event).

    ``lower_bound`` is ``prod (1 - s_i)`` whether or not the condition holds.
    """
    n = len(events)
    if s is None:
        s = (Fraction(1, graph.Delta),) * n
    s = tuple(as_fraction(x) for x in s)
    if len(s) != n:
        raise InputError(f"expected {n} LLL weights, got {len(s)}")
    if any(not (0 < x < 1) for x in s):
        raise InputError("LLL weights must lie strictly between 0 and 1")
    rows = []
    for i, e in enumerate(events):
        rhs = s[i] * math.prod((1 - s[j] for j in graph.adjacency[i]), start=Fraction(1))
        rows.append((event_mass(space, e), rhs))
    lower = math.prod((1 - x for x in s), start=Fraction(1))
    return LLLReport(all(p <= rhs for p, rhs in rows), lower, s, tuple(rows))
