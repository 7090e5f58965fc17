import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from intersectprob import (CoordinateSpace, Event, ProductSpace, build_dependency_graph, check_lll,
                           check_smallness, exact_intersection_probability, normalize_support)
from intersectprob.errors import InputError
from intersectprob.oracle import random_instance


def test_coordinate_invariants():
    with pytest.raises(InputError):
        CoordinateSpace("c", (0, 1), ("1/2", "1/3"))
    with pytest.raises(InputError):
        CoordinateSpace("c", (0, 0), ("1/2", "1/2"))
    with pytest.raises(InputError):
        CoordinateSpace("c", (0, 1), ("3/2", "-1/2"))
    c = CoordinateSpace("c", ("a", "b", "z"), ("0", "1/3", "2/3"))  # zero atoms allowed
    assert c.probs[0] == 0
    with pytest.raises(InputError):
        ProductSpace(())


def test_normalize_drops_ignored_coordinate(bit_space):
    table = np.array([[False, False], [True, True]])  # depends on coordinate 1 only
    e = normalize_support(bit_space, Event("E", (0, 1), table))
    assert e.support == (0,)
    assert e.table.tolist() == [False, True]


def test_normalize_minimal_unchanged(two_events):
    space, (a1, a2) = two_events
    assert normalize_support(space, a2) is a2


def _points(space):
    return itertools.product(*(c.atoms for c in space.coords))


def test_normalize_three_coordinates_bruteforce():
    bit = CoordinateSpace.uniform("b", (0, 1))
    space = ProductSpace((bit, bit, bit))
    table = np.zeros((2, 2, 2), dtype=bool)
    for x1, x2, x3 in itertools.product((0, 1), repeat=3):
        table[x1, x2, x3] = (x1 ^ x3) == 1
    raw = Event("E", (0, 1, 2), table)
    norm = normalize_support(space, raw)
    assert norm.support == (0, 2)
    assert norm.table.size == 4
    for pt in _points(space):
        assert raw.contains(space, pt) == norm.contains(space, pt)


def test_malformed_table_rejected(bit_space):
    with pytest.raises(InputError):
        normalize_support(bit_space, Event("E", (0,), np.zeros(3, dtype=bool)))
    with pytest.raises(InputError):
        Event("E", (0, 1), np.zeros(2, dtype=bool))


def test_graph_disjoint(bit_space):
    a = Event.from_tuples(bit_space, "a", [0], [(1,)])
    b = Event.from_tuples(bit_space, "b", [1], [(1,)])
    g = build_dependency_graph(bit_space, [a, b])
    assert g.adjacency == (frozenset(), frozenset())
    assert g.degrees == (0, 0) and g.Delta == 5


def test_graph_overlap(two_events):
    space, events = two_events
    g = build_dependency_graph(space, events)
    assert g.adjacency == (frozenset({1}), frozenset({0}))
    assert g.degrees == (1, 1)
    assert g.Delta == 5
    assert g.mu == (1, 2)


def test_graph_star():
    bit = CoordinateSpace.uniform("b", (0, 1))
    space = ProductSpace((bit,) * 7)
    events = [Event.from_tuples(space, f"E{i}", [0, i], [(1, 1)]) for i in range(1, 7)]
    g = build_dependency_graph(space, events)
    assert g.degrees == (5,) * 6
    assert g.Delta == 5


def test_graph_requires_normalized(bit_space):
    raw = Event("E", (0, 1), np.array([[False, False], [True, True]]))
    with pytest.raises(InputError):
        build_dependency_graph(bit_space, [raw])


def test_smallness_threshold_delta5_mu1():
    from conftest import rare_space

    space = rare_space(Fraction(1, 4000))
    e = Event.from_tuples(space, "A", [0], [(1,)])
    rep = check_smallness(space, [e], build_dependency_graph(space, [e]))
    assert rep.rows[0].threshold == Fraction(1, 3375)
    assert rep.rows[0].passes and rep.overall


def test_smallness_zero_probability_passes(bit_space):
    e = Event("never", (), np.array(False))
    rep = check_smallness(bit_space, [e], build_dependency_graph(bit_space, [e]))
    assert rep.rows[0].probability == 0 and rep.overall


def test_smallness_mu2_fails():
    c = CoordinateSpace("c", (0, 1), (Fraction(2, 3375), Fraction(3373, 3375)))
    space = ProductSpace((c, CoordinateSpace.uniform("u", (0, 1))))
    e0 = Event.from_tuples(space, "E0", [0, 1], [(0, 0)])  # P = 1/3375, r = 2
    e1 = Event.from_tuples(space, "E1", [1], [(1,)])
    g = build_dependency_graph(space, [e0, e1])
    rep = check_smallness(space, [e0, e1], g)
    assert g.Delta == 5 and g.mu[0] == 2
    assert rep.rows[0].probability == Fraction(1, 3375)
    assert rep.rows[0].threshold == Fraction(1, 15**6)
    assert not rep.rows[0].passes and not rep.overall


def test_lll_single_event():
    space = ProductSpace((CoordinateSpace("c", (0, 1, 2, 3), ("1/4",) * 4),))
    e = Event.from_tuples(space, "A", [0], [(0,)])
    rep = check_lll(space, [e], build_dependency_graph(space, [e]), s=[Fraction(1, 2)])
    assert rep.passes and rep.lower_bound == Fraction(1, 2)


def test_lll_one_neighbour_rhs(two_events):
    space, events = two_events
    g = build_dependency_graph(space, events)
    rep = check_lll(space, events, g)
    assert rep.s == (Fraction(1, 5),) * 2
    assert [rhs for _, rhs in rep.per_event] == [Fraction(4, 25)] * 2
    assert not rep.passes  # P(A1) = 1/2 > 4/25
    assert rep.lower_bound == Fraction(16, 25)


def test_lll_rejects_bad_weights(two_events):
    space, events = two_events
    g = build_dependency_graph(space, events)
    with pytest.raises(InputError):
        check_lll(space, events, g, s=[0, Fraction(1, 2)])
    with pytest.raises(InputError):
        check_lll(space, events, g, s=[1, Fraction(1, 2)])


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_normalize_idempotent_and_faithful(seed):
    space, events = random_instance(seed, rare=False, m_range=(1, 4), atoms_range=(2, 3), support_max=3)
    rng = np.random.default_rng(seed)
    # re-embed every event into a padded, non-minimal support
    for e in events:
        extra = sorted(set(e.support) | {int(rng.integers(space.m))})
        pos = [extra.index(j) for j in e.support]
        shape = [1] * len(extra)
        for p, d in zip(pos, e.table.shape):
            shape[p] = d
        raw = Event(e.name, tuple(extra), np.broadcast_to(e.table.reshape(shape), space.dims(extra)))
        once = normalize_support(space, raw)
        assert normalize_support(space, once) == once
        for pt in _points(space):
            assert raw.contains(space, pt) == once.contains(space, pt)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_graph_invariants(seed):
    space, events = random_instance(seed, rare=False)
    g = build_dependency_graph(space, events)
    for i, nbrs in enumerate(g.adjacency):
        assert i not in nbrs
        for j in nbrs:
            assert i in g.adjacency[j]
    assert g.Delta >= 5 and all(g.Delta >= d for d in g.degrees)
    assert all(mu <= r and mu <= d + 1 for mu, r, d in zip(g.mu, g.r, g.degrees))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_lll_bound_holds(seed):
    space, events = random_instance(seed, passing=bool(seed % 2))
    rep = check_lll(space, events, build_dependency_graph(space, events))
    if rep.passes:
        assert exact_intersection_probability(space, events) >= rep.lower_bound


def test_no_events_is_legal(bit_space):
    g = build_dependency_graph(bit_space, [])
    assert g.Delta == 5
    assert check_smallness(bit_space, [], g).overall
    assert check_lll(bit_space, [], g).lower_bound == 1
