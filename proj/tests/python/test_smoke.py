"""Smoke tests for the _qid module against the built-in constructions."""

import json
import math

import _qid


def test_version():
    assert _qid.version() == "0.1.0"


def test_example2_report_is_rid():
    cfg = _qid.builtin_examples()["example2"]
    report_text, code = _qid.run_scenario(cfg)
    assert code == 0
    report = json.loads(report_text)
    assert report["criteria"]["verdict"] == "RID"
    assert report["criteria"]["dominated"] is True
    assert abs(report["triplet"]["w_mass"] - math.log(1.4)) < 1e-8
    assert report["triplet"]["lambda_abs_sum"] < 1e-10


def test_example3_counterexample_diverges():
    cfg = json.loads(_qid.builtin_examples()["example3"])
    cfg["task"] = "counterexample"
    report_text, code = _qid.run_scenario(json.dumps(cfg))
    assert code == 1
    report = json.loads(report_text)
    assert report["counterexample"]["diverging"] is True
    ratios = [row["ratio"] for row in report["counterexample"]["rows"]]
    assert ratios == sorted(ratios)
    assert ratios[-1] > 1e3


def test_invalid_config_is_rejected():
    cfg = json.loads(_qid.builtin_examples()["example1"])
    cfg["mixture"]["weights"]["d"] = "0.9"
    try:
        _qid.run_scenario(json.dumps(cfg))
    except ValueError as err:
        assert "weights" in str(err)
    else:
        raise AssertionError("bad weights were accepted")


def test_eval_cf_normalization():
    mixture = json.loads(_qid.builtin_examples()["example2"])["mixture"]
    value = _qid.eval_cf(json.dumps(mixture), 0.0)
    assert abs(value - 1.0) < 1e-12
    tail = _qid.eval_cf(json.dumps(mixture), 2.0 * math.pi)
    assert abs(tail) <= 1.0


def test_power_norm_bounds_soundness():
    exact = _qid.exact_power_norm(1, [[0], [1]], [1.0, 1.0], 3)
    assert abs(exact - 8.0) < 1e-12
    exact, b13, b15 = _qid.power_norm_bounds(1, [[1]], [1.0], 1)
    assert abs(exact - 1.0) < 1e-12
    assert abs(b13 - math.pi / math.sqrt(6.0)) < 1e-12
    assert b15 >= exact
