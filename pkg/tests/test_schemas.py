from __future__ import annotations

from fractions import Fraction

import pytest
from pydantic import ValidationError

from almostperiods.schemas import DEFAULT_PARAMS, JobSpec


def _job(**overrides) -> JobSpec:
    data = {"schema_version": 1, "command": "eldiv", **overrides}
    return JobSpec(**data)


def test_default_params():
    job = _job()
    assert job.params.to_json() == {"p": 2, "s": 1, "L": 2, "N": "8/1", "m": 1, "d": 1}
    assert job.payload == {}
    assert job.seed is None


def test_partial_params_are_merged_with_defaults():
    job = _job(params={"p": 3, "N": "9/1"})
    assert job.params.p == 3
    assert job.params.N == Fraction(9)
    assert job.params.L == DEFAULT_PARAMS["L"]


@pytest.mark.parametrize(
    "overrides",
    [
        {"schema_version": 2},
        {"command": "plot"},
        {"extra": True},
        {"params": {"p": 4}},
        {"params": {"N": "1/3"}},
        {"seed": -1},
        {"seed": 2**64},
    ],
)
def test_rejected_jobs(overrides):
    with pytest.raises(ValidationError):
        _job(**overrides)


def test_to_json():
    job = _job(payload={"op": "length", "g": ["1"]}, seed=2**64 - 1)
    assert job.to_json() == {
        "schema_version": 1,
        "command": "eldiv",
        "params": {"p": 2, "s": 1, "L": 2, "N": "8/1", "m": 1, "d": 1},
        "payload": {"op": "length", "g": ["1"]},
        "seed": 2**64 - 1,
    }
