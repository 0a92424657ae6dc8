from __future__ import annotations

from fractions import Fraction

import pytest

from almostperiods.errors import (
    LevelOverflowError,
    ParameterMismatchError,
    PrecisionExhaustedError,
)
from almostperiods.puiseux import (
    PuiseuxElem,
    ZeroAtPrecision,
    artin_schreier_solve,
    artin_schreier_solve_vector,
    gcd,
)
from almostperiods.sampling import random_element


def _el(params, text):
    return PuiseuxElem.parse(params, text)


# ── Ring arithmetic ──────────────────────────────────────────────────────────


def test_characteristic_two(p2):
    t = _el(p2, "t^(1)")
    assert (t + t).is_zero()


def test_fractional_exponents_multiply(p2):
    root = _el(p2, "t^(1/2)")
    assert root * root == _el(p2, "t^(1)")


def test_freshman_dream(p2):
    assert _el(p2, "1+t^(1)") ** 2 == _el(p2, "1+t^(2)")


def test_valuation_and_zero_marker(p2):
    assert _el(p2, "t^(3/2)+t^(2)").valuation() == Fraction(3, 2)
    zero = PuiseuxElem.zero(p2, 5)
    assert zero.is_zero()
    assert zero.valuation() == ZeroAtPrecision(Fraction(5))


def test_product_precision_tracks_valuations(p2):
    a = _el(p2, "t^(1)+O(t^(3))")
    b = _el(p2, "t^(2)+O(t^(4))")
    assert (a * b).prec == Fraction(5)


def test_inverse_and_divide(p2):
    u = _el(p2, "1+t^(1/4)")
    assert u * u.inverse() == PuiseuxElem.one(p2)
    assert _el(p2, "t^(2)+t^(3)").divide(_el(p2, "t^(1)")) == _el(p2, "t^(1)+t^(2)")
    with pytest.raises(ZeroDivisionError):
        _el(p2, "t^(1)").inverse()
    with pytest.raises(ValueError):
        _el(p2, "t^(1)").divide(_el(p2, "t^(2)"))


def test_shift_must_stay_integral(p2):
    assert _el(p2, "t^(3/2)").shift(Fraction(-1)) == _el(p2, "t^(1/2)")
    with pytest.raises(ValueError):
        _el(p2, "t^(1/2)").shift(-1)


def test_operands_must_share_parameters(p2, p3):
    with pytest.raises(ParameterMismatchError):
        _el(p2, "t^(1)") + _el(p3, "t^(1)")


def test_elements_are_unhashable(p2):
    with pytest.raises(TypeError):
        hash(PuiseuxElem.one(p2))


def test_coefficient_beyond_precision(p2):
    x = _el(p2, "t^(1)+O(t^(2))")
    assert x.coefficient(1) == 1
    with pytest.raises(PrecisionExhaustedError):
        x.coefficient(3)


# ── Parsing and display ──────────────────────────────────────────────────────


def test_parse_and_str(p2):
    x = _el(p2, "1*t^(1/2) + t^(1) + O(t^(5))")
    assert x.prec == Fraction(5)
    assert str(x) == "1*t^(1/2)+1*t^(1)+O(t^(5))"
    assert str(_el(p2, "1")) == "1*t^(0)+O(t^(8))"


@pytest.mark.parametrize("bad", ["", "t^(1/2", "2*s^(1)", "O(t^(1))+O(t^(2))"])
def test_parse_rejects_malformed(p2, bad):
    with pytest.raises(ValueError):
        _el(p2, bad)


def test_exponent_beyond_level(p2):
    with pytest.raises(LevelOverflowError):
        _el(p2, "t^(1/8)")


# ── Frobenius ────────────────────────────────────────────────────────────────


def test_frobenius_of_root(p2):
    assert _el(p2, "t^(1/2)").frobenius() == _el(p2, "t^(1)")


def test_frobenius_over_three(p3):
    assert _el(p3, "1+t^(1)").frobenius() == _el(p3, "1+t^(3)")


def test_frobenius_inverse_respects_level(p2):
    assert _el(p2, "t^(1)").frobenius_inverse() == _el(p2, "t^(1/2)")
    assert _el(p2, "t^(1)").frobenius_power(-2) == _el(p2, "t^(1/4)")
    with pytest.raises(LevelOverflowError):
        _el(p2, "t^(1/4)").frobenius_inverse()


def test_frobenius_precision_is_capped_at_n(p2):
    x = _el(p2, "1+t^(1/2)")
    assert x.prec == p2.N
    assert x.frobenius().prec == p2.N
    assert x.frobenius_power(1).prec == 2 * p2.N
    assert _el(p2, "t^(1)+O(t^(2))").frobenius().prec == 4


# ── Valuation-ring operations ────────────────────────────────────────────────


def test_gcd_is_lowest_monomial(p2):
    assert gcd([_el(p2, "t^(1)"), _el(p2, "t^(1/2)")]) == _el(p2, "t^(1/2)")
    assert gcd([_el(p2, "t^(1)+t^(2)"), _el(p2, "t^(3)")]) == _el(p2, "t^(1)")
    with pytest.raises(ValueError):
        gcd([PuiseuxElem.zero(p2)])


def test_artin_schreier_example(p2):
    a = _el(p2, "t^(1)")
    x = artin_schreier_solve(a)
    assert x == _el(p2, "t^(1)+t^(2)+t^(4)")
    assert (x**2 - x - a).is_zero()


def test_artin_schreier_over_three(p3):
    a = _el(p3, "2*t^(1/3)+t^(2)")
    x = artin_schreier_solve(a)
    assert (x**3 - x - a).is_zero()
    assert artin_schreier_solve_vector([a, a]) == [x, x]


def test_artin_schreier_needs_positive_valuation(p2):
    with pytest.raises(ValueError):
        artin_schreier_solve(_el(p2, "1+t^(1)"))
    assert artin_schreier_solve(PuiseuxElem.zero(p2)).is_zero()


# ── Random identities ────────────────────────────────────────────────────────


def _triple(rng, params):
    return [random_element(rng, params, 3, Fraction(2)) for _ in range(3)]


def test_ring_axioms_on_random_triples(rng, p2):
    for _ in range(20):
        a, b, c = _triple(rng, p2)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero()


def test_valuation_is_additive(rng, p2):
    for _ in range(20):
        a, b, _ = _triple(rng, p2)
        assert (a * b).valuation() == a.valuation() + b.valuation()


def test_frobenius_is_a_ring_map(rng, p3):
    for _ in range(20):
        a, b, _ = _triple(rng, p3)
        assert (a * b).frobenius() == a.frobenius() * b.frobenius()
        assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        assert a.frobenius().frobenius_inverse() == a
