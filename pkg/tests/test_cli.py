import json
import math
from fractions import Fraction

import pytest

from intersectprob import CoordinateSpace, Event, ProductSpace
from intersectprob.cli import main
from intersectprob.instance import instance_to_dict
from intersectprob.oracle import random_instance


def write(tmp_path, data, name="inst.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


TWO_EVENTS = {
    "coordinates": [{"name": "x1", "values": [0, 1], "probs": "uniform"},
                    {"name": "x2", "values": [0, 1], "probs": ["1/2", "1/2"]}],
    "events": [{"name": "A1", "predicate": "x[1] == 1"},
               {"name": "A2", "vars": [1, 2], "tuples": [[1, 1]]}],
}


def test_estimate_no_events(tmp_path, capsys):
    path = write(tmp_path, {"coordinates": [{"values": [0, 1]}], "events": []})
    code, d = run_json(capsys, "estimate", path)
    assert code == 0 and d["value"] == 1.0 and d["guarantee"] == "certified-by-assumption"


def test_estimate_agrees_with_exact(tmp_path, capsys):
    for seed in range(5):
        path = write(tmp_path, instance_to_dict(*random_instance(seed, passing=True)), f"g{seed}.json")
        code, est = run_json(capsys, "estimate", path, "--epsilon", "1e-4")
        assert code == 0
        _, ex = run_json(capsys, "exact", path)
        exact = float(Fraction(ex["probability"]))
        assert abs(est["value"] - exact) <= 1e-4 * exact * 1.0001


def test_estimate_violated_exit_code(tmp_path, capsys):
    code, d = run_json(capsys, "estimate", write(tmp_path, TWO_EVENTS))
    assert code == 2 and d["guarantee"] == "conditions-violated"
    assert abs(d["log_value"] - math.log(0.5)) < 1e-3
    assert [r["pass"] for r in d["conditions"]] == [False, False]


def test_estimate_text_format(tmp_path, capsys):
    code, out, _ = run(capsys, "estimate", write(tmp_path, TWO_EVENTS), "--format", "text")
    assert code == 2 and "conditions-violated" in out and "log_value" in out


def test_json_is_byte_identical(tmp_path, capsys):
    path = write(tmp_path, instance_to_dict(*random_instance(3, passing=True)))
    outs = [run(capsys, "estimate", path, "--seed", "5")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "roots", "--random", "4", "--seed", "9")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_exact_independent_pair(tmp_path, capsys):
    data = {"coordinates": [{"values": [0, 1], "probs": ["1/2", "1/2"]},
                            {"values": ["a", "b", "c", "d"], "probs": "uniform"}],
            "events": [{"predicate": "x[1] == 1"}, {"vars": [2], "tuples": [["d"]]}]}
    code, d = run_json(capsys, "exact", write(tmp_path, data))
    assert code == 0 and d["probability"] == "3/8" and d["decimal"] == "0.375"


def test_exact_two_events(tmp_path, capsys):
    code, d = run_json(capsys, "exact", write(tmp_path, TWO_EVENTS))
    assert code == 0 and d["probability"] == "1/2"


def test_oversize_instances_exit_3(tmp_path, capsys):
    path = write(tmp_path, TWO_EVENTS)
    code, _, err = run(capsys, "exact", path, "--budget", "2")
    assert code == 3 and "budget" in err
    code, _, err = run(capsys, "estimate", path, "--budget", "2")
    assert code == 3 and "component {A2}" in err


def test_input_errors_exit_1(tmp_path, capsys):
    bad = dict(TWO_EVENTS, events=[{"predicate": "x[1] == "}])
    assert run(capsys, "estimate", write(tmp_path, bad))[0] == 1
    assert run(capsys, "exact", str(tmp_path / "missing.json"))[0] == 1
    with pytest.raises(SystemExit) as exc:
        main(["estimate", write(tmp_path, TWO_EVENTS), "--epsilon", "2"])
    assert exc.value.code == 1
    both = dict(TWO_EVENTS, events=[{"predicate": "x[1] == 1", "vars": [1], "tuples": [[1]]}])
    assert run(capsys, "check", write(tmp_path, both))[0] == 1


def test_certain_event_exit_5(tmp_path, capsys):
    data = dict(TWO_EVENTS, events=[{"predicate": "x[1] >= 0"}])
    assert run(capsys, "estimate", write(tmp_path, data))[0] == 5


def test_check_six_event_star(tmp_path, capsys):
    coords = [{"values": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]} for _ in range(10)]
    events = [{"name": "centre", "predicate": "x[1] + x[2] + x[3] + x[4] + x[5] == 45"}]
    events += [{"name": f"leaf{i}", "predicate": f"x[{i}] == 9 and x[{i + 5}] == 9"} for i in range(1, 6)]
    code, d = run_json(capsys, "check", write(tmp_path, {"coordinates": coords, "events": events}))
    assert d["Delta"] == 5
    rows = {r["name"]: r for r in d["events"]}
    assert rows["centre"]["degree"] == 5 and rows["centre"]["mu"] == 5
    assert rows["centre"]["threshold"] == f"1/{15 ** 15}"
    for i in range(1, 6):
        assert rows[f"leaf{i}"]["degree"] == 1 and rows[f"leaf{i}"]["mu"] == 2
        assert rows[f"leaf{i}"]["threshold"] == f"1/{15 ** 6}"
    # ten-valued coordinates are far too coarse for these thresholds
    assert code == 2 and not d["smallness_passes"]


def test_check_no_events(tmp_path, capsys):
    code, d = run_json(capsys, "check", write(tmp_path, {"coordinates": [{"values": [0, 1]}], "events": []}))
    assert code == 0 and d["Delta"] == 5 and d["smallness_passes"] and d["lll"]["passes"]
    assert d["lll"]["lower_bound"] == "1/1"


def test_check_threshold_for_mu_one(tmp_path, capsys):
    data = {"coordinates": [{"values": [0, 1], "probs": ["3999/4000", "1/4000"]}],
            "events": [{"predicate": "x[1] == 1"}]}
    code, d = run_json(capsys, "check", write(tmp_path, data))
    assert code == 0 and d["events"][0]["threshold"] == "1/3375" and d["events"][0]["mu"] == 1
    code, out, _ = run(capsys, "check", write(tmp_path, data), "--format", "text")
    assert "1/3375" in out


def test_check_failing_exit_2(tmp_path, capsys):
    code, d = run_json(capsys, "check", write(tmp_path, TWO_EVENTS))
    assert code == 2 and not d["smallness_passes"]


def test_roots_single_event(tmp_path, capsys):
    data = {"coordinates": [{"values": [0, 1, 2, 3]}], "events": [{"predicate": "x[1] == 3"}]}
    code, d = run_json(capsys, "roots", write(tmp_path, data))
    assert code == 0 and len(d["roots"]) == 1
    assert abs(complex(*d["roots"][0]) - 4) < 1e-12 and abs(d["min_dist"] - 3) < 1e-12


def test_roots_two_events(tmp_path, capsys):
    code, d = run_json(capsys, "roots", write(tmp_path, TWO_EVENTS))
    assert code == 0 and abs(d["min_dist"] - math.sqrt(2)) < 1e-9 and d["zero_free"]


def test_roots_batch(capsys):
    code, d = run_json(capsys, "roots", "--random", "25", "--seed", "1")
    assert code == 0 and d["instances"] == 25 and d["zero_free"] == 25


def test_roots_needs_input(capsys):
    assert run(capsys, "roots")[0] == 1


def test_count_full_cube(tmp_path, capsys):
    path = tmp_path / "none.txt"
    path.write_text("# nothing\n")
    code, d = run_json(capsys, "count-integer-points", str(path), "--cube-side", "2", "--dim", "3")
    assert code == 0 and d["estimate"] == 27 and d["exact"] == 27


def test_count_small_system(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(["x[1]+x[2] <= 3"]))
    code, d = run_json(capsys, "count-integer-points", str(path), "--cube-side", "2", "--dim", "2")
    assert d["exact"] == 8 and code == 2  # P(x1 + x2 > 3) = 1/9 is far above the threshold
    assert abs(d["estimate"] - 8) <= 8 * 1e-2
