from __future__ import annotations

import pytest
import sympy

from almostperiods.residue import CONWAY, ResidueField, residue_field


@pytest.mark.parametrize("key", sorted(CONWAY))
def test_shipped_polynomials_are_irreducible(key):
    p, s = key
    x = sympy.Symbol("x")
    coeffs = [1, *reversed(CONWAY[key])]
    assert sympy.Poly(coeffs, x, modulus=p).is_irreducible


@pytest.mark.parametrize("key", [k for k in sorted(CONWAY) if k[1] > 1])
def test_generator_is_primitive(key):
    p, s = key
    field = residue_field(p, s)
    g = p  # the generator has digits (0, 1, 0, ...)
    order = p**s - 1
    assert field.pow(g, order) == 1
    for q in sympy.primefactors(order):
        assert field.pow(g, order // q) != 1


@pytest.mark.parametrize("p,s", [(2, 3), (3, 2), (5, 1)])
def test_field_axioms_on_every_element(p, s):
    field = residue_field(p, s)
    for a in range(1, field.order):
        assert field.mul(a, field.inv(a)) == 1
        assert field.add(a, field.neg(a)) == 0
        assert field.frobenius_inverse(field.frobenius(a)) == a
        assert field.frobenius(a) == field.pow(a, p)


def test_inverse_of_zero_and_unknown_field():
    with pytest.raises(ZeroDivisionError):
        residue_field(3, 2).inv(0)
    with pytest.raises(ValueError, match="available"):
        ResidueField(11, 1)
    with pytest.raises(ValueError):
        residue_field(2, 2).element(4)
