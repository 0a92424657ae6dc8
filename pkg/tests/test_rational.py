from __future__ import annotations

from fractions import Fraction

import pytest

from almostperiods.rational import (
    format_exponent,
    format_fraction,
    is_prime,
    p_adic_valuation,
    parse_fraction,
)


def test_parse_accepts_exact_forms():
    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse_fraction(" 5 ") == Fraction(5)
    assert parse_fraction(7) == Fraction(7)
    assert parse_fraction(Fraction(1, 3)) == Fraction(1, 3)


@pytest.mark.parametrize("bad", ["0.5", "1e3", ""])
def test_parse_rejects_inexact_strings(bad):
    with pytest.raises(ValueError):
        parse_fraction(bad)


def test_parse_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        parse_fraction(0.5)
    with pytest.raises(TypeError):
        parse_fraction(True)


def test_format_always_has_denominator():
    assert format_fraction(Fraction(1)) == "1/1"
    assert format_fraction(Fraction(6, 4)) == "3/2"
    assert format_exponent(Fraction(5)) == "5"
    assert format_exponent(Fraction(3, 2)) == "3/2"


def test_p_adic_valuation():
    assert p_adic_valuation(24, 2) == 3
    assert p_adic_valuation(-9, 3) == 2
    assert p_adic_valuation(7, 5) == 0
    with pytest.raises(ValueError):
        p_adic_valuation(0, 2)


def test_is_prime():
    assert [n for n in range(12) if is_prime(n)] == [2, 3, 5, 7, 11]
    assert is_prime(1_000_003)
    assert not is_prime(1_000_001)
    assert not is_prime(-7)
