"""Smoke tests for the _rmdf extension module."""

import json
import os
import subprocess

import pytest

_rmdf = pytest.importorskip("_rmdf")


def test_parse_and_roundtrip():
    spec = _rmdf.example_spec("fig11c")
    assert "Camera" in spec.actor_ids
    assert spec.mode_count == 2
    text = _rmdf.serialize_spec(spec)
    again = _rmdf.parse_spec(text)
    assert _rmdf.serialize_spec(again) == text


def test_check_and_analyze():
    good = _rmdf.example_spec("fig11c")
    report = _rmdf.check(good)
    assert report["ok"] is True

    bad = _rmdf.example_spec("fig9e")
    report = _rmdf.check(bad)
    assert report["ok"] is False
    assert {v["rule"] for v in report["violations"]} == {"R5"}

    analysis = _rmdf.analyze(good)
    assert analysis["ok"] is True
    assert len(analysis["modes"]) == 2
    for mode in analysis["modes"]:
        assert mode["consistent"] and mode["live"]
        assert mode["hyperperiod_ms"] == "100"
        assert mode["repetition"]["Motors"] == 50


def test_timing_and_feasibility():
    spec = _rmdf.example_spec("fig11c")
    windows = _rmdf.timing_windows(spec)
    cells = {(w["actor"], w["job"]): w for w in windows["windows"]}
    assert cells[("Camera", 1)]["release"] == "0"
    assert cells[("Camera", 1)]["deadline"] == "7/5"
    assert cells[("Camera", 3)]["window"] == "11/15"
    assert cells[("FeatureMatch", 2)]["deadline"] == "184/5"

    single = _rmdf.window(spec, "Motors", 7)
    assert single["release"] == "13"
    assert single["deadline"] == "15"

    assert _rmdf.feasibility(spec)["feasible"] is True
    bounds = _rmdf.max_feasible_wcet(spec)["max_feasible_wcet_ms"]
    assert bounds["Motors"] == "2"
    assert bounds["CS"] == "73/75"


def test_rate_helpers():
    assert _rmdf.tokens_at_job(2, "2/3") == 1
    assert _rmdf.tokens_at_job(1, "2/3", "2/3") == 1
    assert _rmdf.rate_from_sequence([1, 1, 0]) == ("2/3", "2/3")
    assert _rmdf.rate_from_sequence([0, 0, 1], "cons") == ("1/3", "2/3")
    assert _rmdf.rate_from_sequence([2, 0, 1]) is None


def test_desugar():
    plain = _rmdf.desugar(_rmdf.example_spec("fig5a_routed"))
    assert "SPL" not in plain.actor_ids
    doc = json.loads(_rmdf.serialize_spec(plain))
    c1 = next(c for c in doc["channels"] if c["id"] == "c1")
    assert c1["prod"] == "2/3"
    assert c1["init"] == "2/3"


def test_parse_error():
    with pytest.raises(_rmdf.ParseError):
        _rmdf.parse_spec("{ not json")


@pytest.mark.skipif("RMDF_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_agrees_with_module(tmp_path):
    cli = os.environ["RMDF_CLI"]
    spec_file = tmp_path / "fig11c.json"
    spec_file.write_text(_rmdf.serialize_spec(_rmdf.example_spec("fig11c")))
    out = subprocess.run([cli, "analyze", str(spec_file), "--format", "json"],
                         capture_output=True, text=True, check=True)
    report = json.loads(out.stdout)
    assert report["ok"] is True
    assert report == _rmdf.analyze(_rmdf.example_spec("fig11c"))
