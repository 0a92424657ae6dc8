from __future__ import annotations

from fractions import Fraction

import pytest

from almostperiods.eldiv import (
    EldivSeq,
    finite_approximation,
    indexwise_sum,
    length,
    linf_dist,
    majorizes,
    merge_sorted,
    norm,
    rank_profile,
    shift_eps,
)
from almostperiods.sampling import random_eldiv


def _seq(*values):
    return EldivSeq.of(values)


def test_normalisation_sorts_and_drops_zeros():
    assert _seq(1, 0, "3/2").entries == (Fraction(3, 2), Fraction(1))
    with pytest.raises(ValueError):
        _seq(-1)
    with pytest.raises(ValueError):
        EldivSeq((Fraction(1), Fraction(2)))


def test_length_and_norm():
    assert length(_seq(2, 1)) == 3
    assert norm(_seq(2, 1)) == 2
    assert length(EldivSeq()) == 0
    assert norm(EldivSeq()) == 0


def test_linf_distance_pads_with_zeros():
    assert linf_dist(_seq(1), _seq(1, "1/2")) == Fraction(1, 2)
    assert linf_dist(EldivSeq(), EldivSeq()) == 0


def test_majorization_is_by_prefix_sums():
    assert majorizes(_seq(2), _seq(1, 1))
    assert not majorizes(_seq(1, 1), _seq(2))
    assert majorizes(_seq(2, 1), _seq(2, 1))


def test_shift_eps():
    assert shift_eps(_seq(1, "1/2", "1/4"), "1/2") == _seq("1/2")
    with pytest.raises(ValueError):
        shift_eps(_seq(1), 0)


def test_indexwise_and_merged_sums():
    assert indexwise_sum(_seq(1), _seq(1)) == _seq(2)
    assert merge_sorted(_seq(2), _seq(1, 1)) == _seq(2, 1, 1)
    assert indexwise_sum(_seq(3, 1), _seq(2)) == _seq(5, 1)


def test_rank_profile_determines_sequence():
    g = _seq(3, 2, 2, "1/2")
    assert [rank_profile(g, x) for x in (0, "1/2", 1, 2, 3)] == [4, 3, 3, 1, 0]


def test_finite_approximation_is_within_eps():
    g = _seq(2, "1/2", "1/3", "1/8")
    approx = finite_approximation(g, "1/2")
    assert approx == _seq(2)
    assert linf_dist(g, approx) <= Fraction(1, 2)


def test_json_form():
    assert _seq(2, "1/2").to_json() == {"entries": ["2/1", "1/2"]}
    assert EldivSeq.from_json({"entries": ["1/2", "2"]}) == _seq(2, "1/2")


# ── Random identities ────────────────────────────────────────────────────────


def _eps(rng):
    return Fraction(int(rng.integers(1, 13)), int(rng.integers(1, 7)))


def test_majorization_is_a_partial_order(rng):
    for _ in range(50):
        g, h, k = (random_eldiv(rng, 4) for _ in range(3))
        assert majorizes(g, g)
        if majorizes(g, h) and majorizes(h, g):
            assert g == h
        if majorizes(g, h) and majorizes(h, k):
            assert majorizes(g, k)
        a, b = _eps(rng), _eps(rng)
        smaller, smallest = shift_eps(g, a), shift_eps(g, a + b)
        assert majorizes(g, smaller) and majorizes(smaller, smallest)
        assert majorizes(g, smallest)


def test_linf_triangle_inequality(rng):
    for _ in range(50):
        g, h, k = (random_eldiv(rng, 4) for _ in range(3))
        assert linf_dist(g, k) <= linf_dist(g, h) + linf_dist(h, k)
        assert linf_dist(g, h) == linf_dist(h, g)
        assert linf_dist(g, g) == 0


def test_shift_composes_additively(rng):
    for _ in range(50):
        g = random_eldiv(rng, 4)
        a, b = _eps(rng), _eps(rng)
        assert shift_eps(shift_eps(g, a), b) == shift_eps(g, a + b)
        assert linf_dist(g, shift_eps(g, a)) <= a
