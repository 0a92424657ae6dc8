from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from almostperiods.config import ModelParams
from almostperiods.errors import PrecisionExhaustedError
from almostperiods.sampling import random_matrix, random_unimodular
from almostperiods.snf import (
    MatrixOverO,
    det_valuation,
    free_rank,
    relative_divisors,
    smith_normal_form,
)

FIXTURE = [["t^(1)", "t^(1)"], ["t^(1)", "t^(2)"]]


def test_fixture_divisors(p2):
    A = MatrixOverO.from_strings(p2, FIXTURE)
    snf = smith_normal_form(A)
    assert snf.to_json() == {"divisors": ["1/1", "1/1"], "rank": 2, "infinite": 0}
    assert det_valuation(A) == 2
    assert (snf.U @ A @ snf.V).equals(snf.diagonal_matrix())


def test_transforms_are_inverse(p2):
    A = MatrixOverO.from_strings(p2, FIXTURE)
    snf = smith_normal_form(A)
    identity = MatrixOverO.identity(p2, 2)
    assert (snf.U @ snf.U_inv).equals(identity)
    assert (snf.V @ snf.V_inv).equals(identity)


def test_singular_matrix_reports_infinite_divisor(p2):
    A = MatrixOverO.from_strings(p2, [["t^(1)", "t^(1)"], ["t^(1)", "t^(1)"]])
    snf = smith_normal_form(A)
    assert snf.diagonal_report == ["inf", "1/1"]
    assert free_rank(A) == 1
    with pytest.raises(PrecisionExhaustedError):
        det_valuation(A)


def test_rectangular_matrix(p3):
    A = MatrixOverO.from_strings(p3, [["t^(1/3)", "t^(1)", "1"]])
    snf = smith_normal_form(A)
    assert snf.exponents == (Fraction(0),)
    assert snf.divisors.is_zero()
    assert free_rank(A) == 0


def test_low_precision_zero_blocks_pivot(p2):
    A = MatrixOverO.from_strings(p2, [["t^(2)", "O(t^(1))"]])
    with pytest.raises(PrecisionExhaustedError):
        smith_normal_form(A)


def test_length_equals_det_valuation_under_mixing():
    params = ModelParams(p=2, s=1, L=2, N=16, m=1, d=1)
    rng = np.random.default_rng(5)
    for _ in range(5):
        A = random_matrix(rng, params, 3, 3, 2)
        snf = smith_normal_form(A)
        if snf.infinite:
            continue
        assert sum(snf.exponents, Fraction(0)) == det_valuation(A)
        U = random_unimodular(rng, params, 3, 2)
        V = random_unimodular(rng, params, 3, 2)
        assert smith_normal_form(U @ A @ V).diagonal_report == snf.diagonal_report


def test_relative_divisors(p2):
    lattice = MatrixOverO.from_strings(p2, [["t^(1)"]])
    sub = MatrixOverO.from_strings(p2, [["t^(5/2)"]])
    assert relative_divisors(lattice, sub).entries == (Fraction(3, 2),)
    with pytest.raises(ValueError):
        relative_divisors(sub, lattice)


def test_json_shape_is_checked(p2):
    A = MatrixOverO.from_strings(p2, FIXTURE)
    assert MatrixOverO.from_json(p2, A.to_json()).equals(A)
    with pytest.raises(ValueError):
        MatrixOverO.from_json(p2, {"rows": 3, "cols": 2, "entries": FIXTURE})
