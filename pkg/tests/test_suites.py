from __future__ import annotations

import json
from fractions import Fraction

import numpy as np
import pytest

from almostperiods.config import CheckConfig
from almostperiods.errors import InvariantViolation, PrecisionExhaustedError
from almostperiods.suites import SuiteResult, get_suite, suite_names
from almostperiods.suites.algebra import resolve_eps
from almostperiods.suites.base import require

EXPECTED_SUITES = [
    "artin_schreier",
    "determinism",
    "exact_sequences",
    "finite_difference",
    "koszul",
    "metric",
    "shift",
    "snf",
    "tdr",
    "tower",
    "xi",
]


@pytest.fixture
def quick(quick_config_path) -> CheckConfig:
    return CheckConfig.from_yaml(quick_config_path)


def _run(name: str, config: CheckConfig, seed: int = 11):
    return get_suite(name).run(config, np.random.default_rng(seed))


# ── Registry ─────────────────────────────────────────────────────────────────


def test_registry():
    assert suite_names() == EXPECTED_SUITES
    assert get_suite("shift").name == "shift"
    with pytest.raises(KeyError, match="Available"):
        get_suite("nope")


def test_resolve_eps():
    assert resolve_eps("1/p", 3) == Fraction(1, 3)
    assert resolve_eps("3/2", 2) == Fraction(3, 2)


# ── Result bookkeeping ───────────────────────────────────────────────────────


def test_attempt_records_failures_and_skips():
    result = SuiteResult("demo")

    def failing() -> None:
        require(False, "always", "no", {"x": 1})

    def starved() -> None:
        raise PrecisionExhaustedError("out of digits")

    result.attempt(lambda: None)
    result.attempt(failing)
    result.attempt(starved)
    assert result.trials == 3
    assert result.skipped == 1
    assert not result.passed
    assert result.to_json()["failures"] == [
        {"invariant": "always", "detail": "no", "witness": {"x": 1}}
    ]


def test_require_passes_silently():
    require(True, "fine", "unused")
    with pytest.raises(InvariantViolation) as info:
        require(False, "broken", "detail")
    assert info.value.invariant == "broken"


# ── Cheap suites on the smoke config ─────────────────────────────────────────


def test_shift_suite(quick):
    result = _run("shift", quick)
    assert result.passed
    assert result.trials == quick.shift.sequences


def test_finite_difference_suite(quick):
    assert _run("finite_difference", quick).passed


def test_koszul_suite(quick):
    result = _run("koszul", quick)
    assert result.passed
    assert result.trials == 3
    assert result.stats == {"1,1,1,2": 2, "2,1,1,3": 9}


def test_tower_suite(quick):
    result = _run("tower", quick)
    assert result.passed, result.failures
    assert result.trials == 4


def test_artin_schreier_suite(quick):
    result = _run("artin_schreier", quick)
    assert result.passed, result.failures
    assert result.trials == quick.artin_schreier.trials


def test_metric_suite(quick):
    result = _run("metric", quick)
    assert result.passed, result.failures
    assert result.stats["agreements"] == quick.metric.trials


def test_determinism_suite(quick):
    result = _run("determinism", quick)
    assert result.passed
    assert result.trials == 2


def test_suite_reports_replay(quick):
    first = json.dumps(_run("shift", quick, 3).to_json(), sort_keys=True)
    second = json.dumps(_run("shift", quick, 3).to_json(), sort_keys=True)
    assert first == second


# ── Heavier suites ───────────────────────────────────────────────────────────


@pytest.mark.slow
@pytest.mark.parametrize("name", ["snf", "exact_sequences", "xi", "tdr"])
def test_heavier_suites(quick, name):
    result = _run(name, quick)
    assert result.passed, result.failures
    assert result.trials > 0
