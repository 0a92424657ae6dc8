from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from almostperiods.modules import exact_sequence_check
from almostperiods.sampling import (
    MAX_SEED,
    block_triangular_sequence,
    random_eldiv,
    random_exponent,
    random_module,
    random_unimodular,
    random_witt,
    spawn_generators,
)
from almostperiods.snf import smith_normal_form


def test_spawned_streams_are_reproducible():
    first = [g.integers(0, 2**32, size=4).tolist() for g in spawn_generators(7, 3)]
    second = [g.integers(0, 2**32, size=4).tolist() for g in spawn_generators(7, 3)]
    assert first == second
    assert first[0] != first[1]
    assert len(spawn_generators(MAX_SEED, 1)) == 1


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_outside_u64(seed):
    with pytest.raises(ValueError):
        spawn_generators(seed, 1)


def test_exponent_range(rng):
    for _ in range(50):
        e = random_exponent(rng, Fraction(2), 2, 3, Fraction(1, 9), strict_min=True)
        assert Fraction(1, 9) < e <= 2
        assert 9 % e.denominator == 0
    with pytest.raises(ValueError):
        random_exponent(rng, Fraction(1, 4), 1, 2, Fraction(1, 4), strict_min=True)


def test_eldiv_length(rng):
    for _ in range(30):
        g = random_eldiv(rng, 3)
        assert len(g) <= 3
        assert all(v > 0 for v in g.entries)


def test_closed_modules(rng, p2):
    M = random_module(rng, p2, 4, allow_open=False)
    assert 1 <= M.rank <= 4
    assert not any(M.open_flags)


def test_unimodular_has_trivial_divisors(rng, p2):
    U = random_unimodular(rng, p2, 3)
    snf = smith_normal_form(U)
    assert snf.infinite == 0
    assert all(e == 0 for e in snf.exponents)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_block_triangular_sequences_are_exact(seed, p2):
    params = p2.with_(L=1)
    f, g = block_triangular_sequence(np.random.default_rng(seed), params, 2)
    assert f.target == g.source
    report = exact_sequence_check(f, g)
    assert report.exact
    assert report.lambda_lhs == report.lambda_rhs


def test_witt_with_unit_leading_digit(rng, witt3):
    y = random_witt(rng, witt3, digit_zero="unit")
    assert y.length == witt3.m
    assert y.digits[0].valuation() == 0
    assert not y.is_zero()


@pytest.mark.parametrize("seed", [3, 5, 8, 13])
def test_witt_with_nonunit_leading_digit(seed, witt3):
    y = random_witt(np.random.default_rng(seed), witt3, digit_zero="nonunit")
    lead = y.digits[0]
    assert lead.is_zero() or lead.valuation() > 0
    assert lead.is_zero() or lead.valuation() <= 1
    assert any(not x.is_zero() for x in y.digits[1:])
