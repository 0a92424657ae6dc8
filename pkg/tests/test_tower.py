from __future__ import annotations

import pytest

from almostperiods.config import ModelParams
from almostperiods.errors import PrecisionExhaustedError
from almostperiods.tower import PERTURBATIONS, frobenius_tower_check


def test_canonical_tower_passes(p2):
    report = frobenius_tower_check(p2, 2, 2)
    assert report.passed
    names = {c.name for c in report.checks}
    assert names == {
        "p_q_is_t",
        "short_exact_sequence",
        "divisor_growth",
        "twist_module",
        "twist_q",
        "twist_p",
    }
    assert report.to_json()["passed"] is True


def test_canonical_tower_over_three():
    params = ModelParams(p=3, s=1, L=1, N=9, m=1, d=1)
    assert frobenius_tower_check(params, 1, 2).passed


@pytest.mark.parametrize("perturbation", PERTURBATIONS)
def test_perturbations_are_detected(p2, perturbation):
    report = frobenius_tower_check(p2, 1, 2, perturbation)
    assert not report.passed
    assert report.failures


def test_twist_perturbation_breaks_only_twists(p2):
    report = frobenius_tower_check(p2, 1, 1, "phi")
    failed = {c.name for c in report.failures}
    assert failed <= {"twist_q", "twist_p"}
    assert "twist_q" in failed


def test_precision_requirement(p2):
    with pytest.raises(PrecisionExhaustedError) as info:
        frobenius_tower_check(p2, 1, 4)
    assert info.value.needed == 2


def test_argument_validation(p2):
    with pytest.raises(ValueError):
        frobenius_tower_check(p2, 1, 0)
    with pytest.raises(ValueError):
        frobenius_tower_check(p2, 1, 1, "psi")


def test_growth_is_read_off_the_maps(p2):
    report = frobenius_tower_check(p2, 2, 2, "middle")
    failed = {c.name for c in report.failures}
    assert "divisor_growth" in failed
    canonical = frobenius_tower_check(p2, 2, 2)
    growth = [c for c in canonical.checks if c.name == "divisor_growth"]
    assert growth and all(c.passed for c in growth)
