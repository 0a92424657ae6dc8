from __future__ import annotations

import json

import pytest

from almostperiods.cli import main

FIXTURE = json.dumps([["t^(1)", "t^(1)"], ["t^(1)", "t^(2)"]])


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


def test_snf_report(capsys):
    assert main(["snf", "--matrix", FIXTURE]) == 0
    report = _report(capsys)
    assert report["status"] == "ok"
    assert report["result"]["divisors"] == ["1/1", "1/1"]


def test_koszul(capsys):
    assert main(["koszul", "--n", "1", "--L", "1", "--m", "1", "--p", "2"]) == 0
    assert _report(capsys)["result"]["summary"]["integral_ranks"] == {"0": 1, "1": 1}


def test_koszul_degree_selection(capsys):
    assert main(["koszul", "--n", "2", "--p", "2", "--q-range", "1"]) == 0
    rows = _report(capsys)["result"]["rows"]
    assert {row["q"] for row in rows} == {1}


def test_koszul_budget_exceeded(capsys):
    assert main(["koszul", "--n", "2", "--p", "3", "--budget", "10"]) == 2
    assert _report(capsys)["error"]["type"] == "BudgetExceededError"


def test_budget_is_a_koszul_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["snf", "--matrix", FIXTURE, "--budget", "5"])
    assert info.value.code == 2
    assert "--budget" in capsys.readouterr().err


def test_perturbed_tower_fails(capsys):
    assert main(["tower", "--r", "1", "--kmax", "2", "--perturbation", "q"]) == 1
    assert _report(capsys)["status"] == "failed"


def test_invalid_params(capsys):
    assert main(["eldiv", "--op", "length", "--g", "[1]", "--params", '{"p": 4}']) == 2
    assert _report(capsys)["status"] == "error"


def test_params_flag(capsys):
    code = main(["periods", "xi", "--params", '{"p": 3, "L": 4, "N": "4", "m": 2}'])
    assert code == 0
    assert _report(capsys)["params"]["p"] == 3


def test_job_file(tmp_path, capsys):
    job = tmp_path / "job.json"
    job.write_text(
        json.dumps(
            {
                "schema_version": 1,
                "command": "eldiv",
                "payload": {"op": "norm", "g": ["3/2", "1/2"]},
            }
        )
    )
    assert main(["eldiv", "--op", "norm", "--input", str(job)]) == 0
    assert _report(capsys)["result"] == {"value": "3/2"}


def test_job_file_for_another_command(tmp_path, capsys):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"schema_version": 1, "command": "snf", "payload": {}}))
    assert main(["eldiv", "--op", "norm", "--input", str(job)]) == 2
    assert "snf" in _report(capsys)["error"]["message"]


def test_output_file(tmp_path, capsys):
    out = tmp_path / "reports" / "snf.json"
    assert main(["snf", "--matrix", FIXTURE, "--output", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["result"]["infinite"] == 0


def test_identical_reports_from_flags_and_file(tmp_path, capsys):
    main(["eldiv", "--op", "length", "--g", '["2", "1"]'])
    from_flags = capsys.readouterr().out
    job = tmp_path / "job.json"
    job.write_text(
        json.dumps(
            {"schema_version": 1, "command": "eldiv", "payload": {"op": "length", "g": ["2", "1"]}}
        )
    )
    main(["eldiv", "--op", "length", "--input", str(job)])
    assert capsys.readouterr().out == from_flags
