from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from almostperiods.cyclotomic import (
    CyclotomicRing,
    cyclotomic_coefficients,
    zeta_minus_one_valuation,
)


def test_cyclotomic_coefficients():
    assert cyclotomic_coefficients(2, 1) == (1, 1)
    assert cyclotomic_coefficients(3, 1) == (1, 1, 1)
    assert cyclotomic_coefficients(2, 2) == (1, 0, 1)


@pytest.mark.parametrize(
    "p,level,expected",
    [(2, 1, Fraction(1)), (2, 2, Fraction(1, 2)), (3, 1, Fraction(1, 2)), (3, 2, Fraction(1, 6))],
)
def test_zeta_minus_one_valuation(p, level, expected):
    assert zeta_minus_one_valuation(p, level) == expected


def test_level_zero_has_no_valuation():
    with pytest.raises(ValueError):
        zeta_minus_one_valuation(2, 0)


def test_roots_of_unity_multiply():
    ring = CyclotomicRing(3, 1, 2)
    assert ring.degree == 2
    assert np.array_equal(ring.zeta_power(3), ring.one())
    assert np.array_equal(ring.mul(ring.zeta_power(1), ring.zeta_power(2)), ring.one())
    assert np.array_equal(ring.zeta_power(-1), ring.zeta_power(2))


def test_uniformizer_power_is_p_times_unit():
    ring = CyclotomicRing(3, 1, 1)
    pi = ring.uniformizer()
    assert not ring.is_zero(pi)
    assert ring.is_zero(ring.power(pi, ring.ramification))
    ring2 = CyclotomicRing(2, 2, 2)
    assert not ring2.is_zero(ring2.power(ring2.uniformizer(), 3))
    assert ring2.is_zero(ring2.power(ring2.uniformizer(), 4))


def test_multiplication_matrix_acts_on_columns():
    ring = CyclotomicRing(2, 2, 3)
    c = np.array([3, 5], dtype=np.int64)
    v = np.array([1, 6], dtype=np.int64)
    assert np.array_equal(ring.apply(ring.multiplication_matrix(c), v), ring.mul(c, v))


def test_level_zero_ring():
    ring = CyclotomicRing(5, 0, 2)
    assert ring.degree == 1
    assert ring.uniformizer().tolist() == [5]
    assert ring.mul(np.array([7]), np.array([4])).tolist() == [3]
