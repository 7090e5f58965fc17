"""Ground truth at desk scale.

Full-space enumeration of P(no event), the full-degree polynomial p(z), complex
root localization, and a seeded generator of random small instances.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import InputError, NumericError, ResourceError
from .jointprob import DEFAULT_ENUMERATION_BUDGET, sigma_series
from .model import (CoordinateSpace, Event, ProductSpace, build_dependency_graph, check_smallness,
                    normalize_support)

RESIDUAL_TOL = 1e-8


def _full_grid(space: ProductSpace, budget: int):
    dims = space.dims(range(space.m))
    size = math.prod(dims)
    if size > budget:
        raise ResourceError(f"full space has {size} points, over the budget of {budget}")
    return dims, np.indices(dims, sparse=True)


def _membership(event: Event, grid) -> np.ndarray:
    if not event.support:
        return np.asarray(event.table)
    return event.table[tuple(grid[j] for j in event.support)]


def _point_mass(space: ProductSpace, mask: np.ndarray) -> Fraction:
    # explicit per-point weights; deliberately not shared with model.mass
    weights = [np.array([p.numerator * (c.integer_weights()[1] // p.denominator) for p in c.probs], dtype=object)
               for c in space.coords]
    den = math.prod(c.integer_weights()[1] for c in space.coords)
    point_weights = functools.reduce(np.multiply.outer, weights)
    mask = np.broadcast_to(mask, point_weights.shape)
    return Fraction(int(sum(point_weights[mask].tolist())), den)


def exact_intersection_probability(space: ProductSpace, events: Sequence[Event], *,
                                   budget: int = DEFAULT_ENUMERATION_BUDGET) -> Fraction:
    """P(no event occurs) by enumerating every point of the product space."""
    dims, grid = _full_grid(space, budget)
    good = np.ones(dims, dtype=bool)
    for e in events:
        e.validate_against(space)
        good &= ~_membership(e, grid)
    return _point_mass(space, good)


def exact_joint_probability(space: ProductSpace, events: Sequence[Event], subset, *,
                            budget: int = DEFAULT_ENUMERATION_BUDGET) -> Fraction:
    """P(all events in ``subset`` occur) by full-space enumeration."""
    dims, grid = _full_grid(space, budget)
    inside = np.ones(dims, dtype=bool)
    for i in subset:
        inside &= _membership(events[i], grid)
    return _point_mass(space, inside)


def full_p_polynomial(space: ProductSpace, events: Sequence[Event], *,
                      budget: int = DEFAULT_ENUMERATION_BUDGET) -> tuple:
    """Coefficients a_0..a_n of p(z) = E prod (1 - z [A_i])."""
    events = [normalize_support(space, e) for e in events]
    graph = build_dependency_graph(space, events)
    return sigma_series(space, events, graph, len(events), budget=budget, subset_budget=2**len(events)).coeffs


@dataclass(frozen=True)
class RootReport:
    roots: tuple
    min_dist: float  # inf when p is constant
    delta: float
    zero_free: bool
    min_dist_error: float
    disk_clearance: float  # min |root - 1| - (1 + delta)
    zero_free_disk: bool
    max_residual: float

    def to_json(self) -> dict:
        finite = math.isfinite(self.min_dist)
        return {
            "roots": [[r.real, r.imag] for r in self.roots],
            "min_dist": self.min_dist if finite else None,
            "delta": self.delta,
            "zero_free": self.zero_free,
            "min_dist_error": self.min_dist_error,
            "disk_clearance": self.disk_clearance if math.isfinite(self.disk_clearance) else None,
            "zero_free_disk": self.zero_free_disk,
        }


def point_segment_distance(z: complex) -> float:
    x = min(max(z.real, 0.0), 1.0)
    return abs(z - x)


def root_localize(coeffs: Sequence, delta=Fraction(1, 30), *, maxsteps: int = 200) -> RootReport:
    """All complex roots of sum a_k z^k (a_0 = 1), with distances to [0, 1].

    Companion-matrix eigenvalues seed a Durand-Kerner iteration in extended
    precision; residuals are checked against ``1e-8 (1 + max |a_k|)``.
    """
    a = [Fraction(x) if not isinstance(x, float) else x for x in coeffs]
    if not a or a[0] != 1:
        raise InputError("root localization needs a_0 = 1")
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    deg = len(a) - 1
    delta = float(delta)
    if deg == 0:
        return RootReport((), math.inf, delta, True, 0.0, math.inf, True, 0.0)
    with mpmath.workprec(256):
        mp_a = [mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x) for x in a]
        high_first = mp_a[::-1]
        seeds = np.roots([float(x) for x in high_first])
        init = [mpmath.mpc(complex(s)) for s in seeds] if len(seeds) == deg and np.all(np.isfinite(seeds)) else None
        try:
            roots = mpmath.polyroots(high_first, maxsteps=maxsteps, extraprec=256, roots_init=init)
        except mpmath.libmp.NoConvergence:
            try:
                roots = mpmath.polyroots(high_first, maxsteps=10 * maxsteps, extraprec=512)
            except mpmath.libmp.NoConvergence as exc:
                raise NumericError(f"root iteration did not converge for degree {deg}",
                                   partial=[complex(s) for s in seeds]) from exc
        roots = [mpmath.mpc(r) for r in roots]
        scale = 1 + max(abs(x) for x in mp_a)
        residuals = [abs(mpmath.polyval(high_first, r)) for r in roots]
        derivs = [abs(mpmath.polyval(high_first, r, derivative=True)[1]) for r in roots]
        worst = max(residuals)
        if worst > RESIDUAL_TOL * scale:
            raise NumericError(f"root residual {float(worst):.3e} above tolerance",
                               partial=[complex(r) for r in roots])
        # a disk of radius deg |p(r)/p'(r)| around r contains a root
        errs = [deg * float(res / d) if d != 0 else math.inf for res, d in zip(residuals, derivs)]
        croots = tuple(complex(r) for r in roots)
    dists = [point_segment_distance(r) for r in croots]
    k = int(np.argmin(dists))
    min_dist = dists[k]
    clearance = min(abs(r - 1) for r in croots) - (1 + delta)
    return RootReport(croots, min_dist, delta, min_dist > delta, errs[k], clearance, clearance > 0,
                      float(worst / scale))


# ---------------------------------------------------------------- generator

RARE_EXPONENTS = (1, 2, 3, 4, 5)


def _random_probs(rng: random.Random, k: int, rare: bool) -> tuple:
    if not rare:
        raw = [rng.randint(1, 6) for _ in range(k)]
        total = sum(raw)
        return tuple(Fraction(x, total) for x in raw)
    # one common atom soaks up the mass left by a few rare ones
    probs = [Fraction(0)] * k
    common = rng.randrange(k)
    for i in range(k):
        if i != common:
            probs[i] = Fraction(rng.randint(1, 9), 4 * 10 ** rng.choice(RARE_EXPONENTS))
    probs[common] = 1 - sum(probs)
    return tuple(probs)


def random_instance(seed_or_rng, *, m_range=(1, 6), atoms_range=(2, 4), n_range=(1, 10),
                    support_max: int = 3, density: float = 0.3, rare: bool = True,
                    passing: bool = False, name_prefix: str = "A") -> tuple[ProductSpace, list]:
    """A seeded random instance (space, normalized events).

    With ``passing`` set, true table entries are removed (heaviest first, from
    a failing event) until every event meets the smallness condition.
    """
    rng = seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)
    m = rng.randint(*m_range)
    coords = []
    for j in range(m):
        k = rng.randint(*atoms_range)
        coords.append(CoordinateSpace(f"xi{j + 1}", tuple(range(k)), _random_probs(rng, k, rare)))
    space = ProductSpace(tuple(coords))
    events = []
    for i in range(rng.randint(*n_range)):
        r = rng.randint(1, min(support_max, m))
        support = tuple(sorted(rng.sample(range(m), r)))
        dims = space.dims(support)
        table = np.array([rng.random() < density for _ in range(math.prod(dims))], dtype=bool).reshape(dims)
        events.append(normalize_support(space, Event(f"{name_prefix}{i + 1}", support, table)))
    if passing:
        events = make_passing(space, events)
    return space, events


def _tuple_weight(space: ProductSpace, event: Event, idx) -> Fraction:
    return math.prod((space.coords[j].probs[t] for j, t in zip(event.support, idx)), start=Fraction(1))


def make_passing(space: ProductSpace, events: list) -> list:
    events = list(events)
    while True:
        graph = build_dependency_graph(space, events)
        report = check_smallness(space, events, graph)
        failing = [i for i, row in enumerate(report.rows) if not row.passes]
        if not failing:
            return events
        i = failing[0]
        e = events[i]
        trues = [tuple(int(v) for v in idx) for idx in np.argwhere(e.table)]
        heaviest = max(trues, key=lambda t: (_tuple_weight(space, e, t), t))
        table = e.table.copy()
        table[heaviest] = False
        events[i] = normalize_support(space, Event(e.name, e.support, table))
