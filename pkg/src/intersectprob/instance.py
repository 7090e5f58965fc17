"""JSON instance files.

::

    {"coordinates": [{"name": "x1", "values": [0, 1], "probs": ["1/2", "1/2"] | "uniform"}, ...],
     "events": [{"name": "A1", "predicate": "x[1] == 1"},
                {"name": "A2", "vars": [1, 2], "tuples": [[1, 1]]}]}

``vars`` are 1-based coordinate indices.  Each event has exactly one of
``predicate`` and ``tuples``; ``vars`` is required with ``tuples``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InputError
from .model import CoordinateSpace, Event, ProductSpace, as_fraction
from .predparse import compile_predicate, parse_predicate


def _coordinate(item, j) -> CoordinateSpace:
    if not isinstance(item, dict) or "values" not in item:
        raise InputError(f"coordinate {j + 1}: expected an object with 'values'")
    values = item["values"]
    if not isinstance(values, list) or not values:
        raise InputError(f"coordinate {j + 1}: 'values' must be a nonempty list")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, str)):
            raise InputError(f"coordinate {j + 1}: values must be integers or strings, got {v!r}")
    name = item.get("name", f"x{j + 1}")
    probs = item.get("probs", "uniform")
    if probs == "uniform":
        return CoordinateSpace.uniform(name, values)
    if not isinstance(probs, list):
        raise InputError(f"coordinate {name!r}: 'probs' must be a list of \"p/q\" strings or \"uniform\"")
    for p in probs:
        if not isinstance(p, (str, int)) or isinstance(p, bool):
            raise InputError(f"coordinate {name!r}: probability {p!r} must be an exact \"p/q\" string")
    return CoordinateSpace(name, tuple(values), tuple(as_fraction(p) for p in probs))


def _event(item, i, space: ProductSpace) -> Event:
    if not isinstance(item, dict):
        raise InputError(f"event {i + 1}: expected an object")
    name = item.get("name", f"A{i + 1}")
    has_pred, has_tuples = "predicate" in item, "tuples" in item
    if has_pred == has_tuples:
        raise InputError(f"event {name!r}: give exactly one of 'predicate' and 'tuples'")
    if has_pred:
        ast = parse_predicate(item["predicate"], space.m)
        event = compile_predicate(space, ast, name)
        if "vars" in item and not set(event.support) <= {v - 1 for v in item["vars"]}:
            raise InputError(f"event {name!r}: predicate uses coordinates outside 'vars'")
        return event
    if "vars" not in item:
        raise InputError(f"event {name!r}: 'tuples' needs 'vars'")
    vars_ = item["vars"]
    if not all(isinstance(v, int) and 1 <= v <= space.m for v in vars_):
        raise InputError(f"event {name!r}: 'vars' must be coordinate indices 1..{space.m}")
    return Event.from_tuples(space, name, [v - 1 for v in vars_], [tuple(t) for t in item["tuples"]])


def instance_from_dict(data) -> tuple[ProductSpace, list]:
    if not isinstance(data, dict) or "coordinates" not in data:
        raise InputError("instance must be an object with 'coordinates' and 'events'")
    space = ProductSpace(tuple(_coordinate(c, j) for j, c in enumerate(data["coordinates"])))
    events = [_event(e, i, space) for i, e in enumerate(data.get("events", []))]
    return space, events


def load_instance(path) -> tuple[ProductSpace, list]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    return instance_from_dict(data)


def _fraction_str(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def instance_to_dict(space: ProductSpace, events) -> dict:
    """Serialize with explicit satisfying tuples, so any instance round-trips."""
    out_events = []
    for e in events:
        tuples = [[space.coords[j].atoms[int(t)] for j, t in zip(e.support, idx)] for idx in np.argwhere(e.table)]
        if not e.support:
            # constant events: a predicate is the only way to say "always" / "never"
            out_events.append({"name": e.name, "predicate": "0 == 0" if bool(e.table) else "0 == 1"})
            continue
        out_events.append({"name": e.name, "vars": [j + 1 for j in e.support], "tuples": tuples})
    return {
        "coordinates": [
            {"name": c.name, "values": list(c.atoms), "probs": [_fraction_str(p) for p in c.probs]}
            for c in space.coords
        ],
        "events": out_events,
    }
