from __future__ import annotations

import pytest

from almostperiods.puiseux import PuiseuxElem
from almostperiods.sampling import random_witt
from almostperiods.witt import (
    WittElem,
    teichmuller,
    teichmuller_mul,
    witt_add,
    witt_coordinates,
    witt_div_p,
    witt_eq,
    witt_frobenius,
    witt_mul,
    witt_neg,
    witt_one,
    witt_p_mul,
    witt_scalar,
    witt_sub,
    witt_tables,
    witt_zero,
)


def _el(params, text):
    return PuiseuxElem.parse(params, text)


def _sample(params):
    root = _el(params, f"1+t^(1/{params.p})")
    return WittElem(params, (root, _el(params, "t^(1)")))


def test_universal_sum_polynomials_for_two():
    tables = witt_tables(2, 2)
    # variables X0, X1, Y0, Y1
    assert set(tables.sums[0]) == {(1, (1, 0, 0, 0)), (1, (0, 0, 1, 0))}
    assert set(tables.sums[1]) == {
        (1, (0, 1, 0, 0)),
        (1, (0, 0, 0, 1)),
        (1, (1, 0, 1, 0)),
    }
    assert set(tables.products[0]) == {(1, (1, 0, 1, 0))}


def test_one_plus_one_is_p(witt2):
    one = witt_one(witt2)
    assert witt_eq(witt_add(one, one), witt_p_mul(one))
    assert witt_eq(witt_scalar(witt2, 2), witt_p_mul(one))
    assert witt_scalar(witt2, 4).is_zero()


def test_doubling_a_teichmuller_lift(witt2):
    x = teichmuller(_el(witt2, "t^(1/2)"))
    doubled = witt_add(x, x)
    assert doubled.digits[0].is_zero()
    assert doubled.digits[1] == _el(witt2, "t^(1/2)")


def test_teichmuller_is_multiplicative(witt2):
    x, y = _el(witt2, "1+t^(1/2)"), _el(witt2, "t^(1)")
    assert witt_eq(witt_mul(teichmuller(x), teichmuller(y)), teichmuller(x * y))
    assert witt_eq(teichmuller_mul(y, teichmuller(x)), teichmuller(x * y))


def test_additive_inverse_and_identity(witt2, witt3):
    for params in (witt2, witt3):
        a = _sample(params)
        assert witt_sub(a, a).is_zero()
        assert witt_eq(witt_add(a, witt_zero(params)), a)
        assert witt_eq(witt_add(a, witt_neg(a)), witt_zero(params))
        assert witt_eq(witt_mul(a, witt_one(params)), a)


def test_frobenius_is_a_ring_map(witt3):
    a = _sample(witt3)
    b = WittElem(witt3, (_el(witt3, "2*t^(1/3)"), _el(witt3, "1")))
    assert witt_eq(
        witt_frobenius(witt_mul(a, b)), witt_mul(witt_frobenius(a), witt_frobenius(b))
    )
    assert witt_eq(
        witt_frobenius(witt_add(a, b)), witt_add(witt_frobenius(a), witt_frobenius(b))
    )


def test_division_by_p(witt2):
    a = witt_p_mul(_sample(witt2))
    assert witt_div_p(a).digits == (_el(witt2, "1+t^(1/2)"),)
    with pytest.raises(ValueError):
        witt_div_p(_sample(witt2))


def test_coordinates_are_frobenius_powers(witt2):
    coords = witt_coordinates(_sample(witt2))
    assert coords[0] == _el(witt2, "1+t^(1/2)")
    assert coords[1] == _el(witt2, "t^(2)")


def test_json_digits(witt2):
    a = _sample(witt2)
    assert witt_eq(WittElem.from_json(witt2, a.to_json()), a)
    with pytest.raises(ValueError):
        WittElem.from_json(witt2, {"digits": ["1", "1", "1"]})


# ── Random identities ────────────────────────────────────────────────────────


def test_ring_axioms_on_random_triples(rng, witt2, witt3):
    for params in (witt2, witt3):
        for _ in range(6):
            a, b, c = (random_witt(rng, params) for _ in range(3))
            assert witt_eq(witt_add(witt_add(a, b), c), witt_add(a, witt_add(b, c)))
            assert witt_eq(witt_mul(witt_mul(a, b), c), witt_mul(a, witt_mul(b, c)))
            assert witt_eq(
                witt_mul(a, witt_add(b, c)), witt_add(witt_mul(a, b), witt_mul(a, c))
            )
            assert witt_eq(witt_mul(a, b), witt_mul(b, a))
