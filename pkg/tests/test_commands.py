from __future__ import annotations

import json

import pytest

from almostperiods.commands import (
    EXIT_CHECK_FAILED,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    check_command,
    get_command,
    job_from_flags,
    run,
)

FIXTURE = [["t^(1)", "t^(1)"], ["t^(1)", "t^(2)"]]


def _run(command, payload, **kwargs):
    return run(job_from_flags(command, payload, **kwargs))


def test_envelope():
    report, code = _run("eldiv", {"op": "length", "g": ["2", "1/2"]})
    assert code == EXIT_OK
    assert report["status"] == "ok"
    assert report["schema_version"] == 1
    assert report["command"] == "eldiv"
    assert report["params"]["N"] == "8/1"
    assert report["result"] == {"value": "5/2"}


def test_eldiv_two_sequences():
    report, _ = _run("eldiv", {"op": "majorizes", "g": ["3"], "h": ["2", "1"]})
    assert report["result"] == {"value": True}


def test_snf_fixture():
    report, code = _run("snf", {"matrix": FIXTURE})
    assert code == EXIT_OK
    result = report["result"]
    assert result["divisors"] == ["1/1", "1/1"]
    assert result["infinite"] == 0
    assert result["det_valuation"] == "2/1"


def test_koszul_table():
    report, code = _run("koszul", {"n": 1, "L": 1, "m": 1, "p": 2})
    assert code == EXIT_OK
    assert len(report["result"]["rows"]) == 4
    assert "passed" not in report["result"]


def test_failed_check_exits_one():
    report, code = _run("tower", {"r": 1, "kmax": 2, "perturbation": "q"})
    assert code == EXIT_CHECK_FAILED
    assert report["status"] == "failed"


def test_precision_error_suggests_n():
    report, code = _run("tower", {"r": 1, "kmax": 4})
    assert code == EXIT_INPUT_ERROR
    assert report["error"]["type"] == "PrecisionExhaustedError"
    assert report["error"]["suggested_N"] == "10/1"


@pytest.mark.parametrize(
    "command, payload",
    [
        ("eldiv", {"op": "length", "g": ["-1"]}),
        ("eldiv", {"op": "length"}),
        ("eldiv", {"op": "frobnicate", "g": ["1"], "h": ["1"]}),
        ("check", {"suite": "shift"}),
        ("linalg", {"op": "cohomology", "d_in": [[1]], "d_out": [[1]]}),
    ],
)
def test_input_errors_exit_two(command, payload):
    report, code = _run(command, payload)
    assert code == EXIT_INPUT_ERROR
    assert report["status"] == "error"


def test_check_single_suite(quick_config_path):
    report, code = _run(
        "check", {"suite": "shift", "config": str(quick_config_path)}, seed=7
    )
    assert code == EXIT_OK
    assert list(report["result"]["suites"]) == ["shift"]
    assert report["seed"] == 7


def test_check_is_reproducible(quick_config_path):
    payload = {"suite": "metric", "config": str(quick_config_path)}
    assert _run("check", payload, seed=9) == _run("check", payload, seed=9)


@pytest.mark.slow
def test_full_check_report_is_reproducible(quick_config_path):
    job = job_from_flags("check", {"suite": "all", "config": str(quick_config_path)}, seed=11)
    first = json.dumps(check_command(job), sort_keys=True)
    second = json.dumps(check_command(job), sort_keys=True)
    assert first == second


def test_as_solve():
    report, code = _run("as-solve", {"values": ["t^(1)"]})
    assert code == EXIT_OK
    (row,) = report["result"]["solutions"]
    assert row["residual_zero"]


def test_unknown_command():
    with pytest.raises(KeyError, match="Available"):
        get_command("plot")
