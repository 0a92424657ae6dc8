"""Seeded random objects for the property suites and the tests.

All randomness flows through :class:`numpy.random.Generator` (PCG64).
Independent streams come from ``SeedSequence(seed).spawn(k)``, so a suite
sees the same stream whether it runs alone or with the others.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Literal, Optional

import numpy as np

from almostperiods.config import ModelParams
from almostperiods.eldiv import EldivSeq
from almostperiods.modules import FPTorsionModule, ModuleMap
from almostperiods.puiseux import PuiseuxElem
from almostperiods.residue import residue_field
from almostperiods.snf import MatrixOverO, smith_normal_form
from almostperiods.witt import WittElem

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1

DigitZero = Literal["any", "unit", "nonunit"]


def spawn_generators(seed: int, k: int) -> list[np.random.Generator]:
    """``k`` independent PCG64 streams derived from a 64-bit *seed*."""
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


# ── Scalars ──────────────────────────────────────────────────────────────────


def random_exponent(
    rng: np.random.Generator,
    max_value: Fraction,
    level: int,
    p: int,
    min_value: Fraction = Fraction(0),
    strict_min: bool = False,
) -> Fraction:
    """A rational in ``[min_value, max_value]`` with denominator dividing ``p^level``."""
    den = p**level
    lo = math.ceil(min_value * den)
    if strict_min and Fraction(lo, den) == min_value:
        lo += 1
    hi = int(max_value * den)
    if hi < lo:
        raise ValueError(f"empty exponent range [{min_value}, {max_value}] at level {level}")
    return Fraction(int(rng.integers(lo, hi + 1)), den)


def random_coefficient(rng: np.random.Generator, params: ModelParams, nonzero: bool = True) -> int:
    order = residue_field(params.p, params.s).order
    return int(rng.integers(1 if nonzero else 0, order))


def random_element(
    rng: np.random.Generator,
    params: ModelParams,
    max_terms: int = 2,
    max_exponent: Fraction = Fraction(2),
    level: Optional[int] = None,
    min_valuation: Fraction = Fraction(0),
    strict: bool = False,
) -> PuiseuxElem:
    """A sparse element with at least one term, exponents ``>= min_valuation``.

    With *strict* the valuation is ``> min_valuation``.
    """
    level = params.L if level is None else min(level, params.L)
    terms: dict[Fraction, int] = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        e = random_exponent(rng, max_exponent, level, params.p, min_valuation, strict)
        terms[e] = random_coefficient(rng, params)
    return PuiseuxElem.from_terms(params, terms)


def random_unit(
    rng: np.random.Generator, params: ModelParams, level: Optional[int] = None
) -> PuiseuxElem:
    lead = PuiseuxElem.monomial(params, 0, random_coefficient(rng, params))
    if rng.random() < 0.5:
        return lead
    tail = random_element(rng, params, 1, Fraction(1), level, Fraction(0), strict=True)
    return lead + tail


# ── Matrices ─────────────────────────────────────────────────────────────────


def random_matrix(
    rng: np.random.Generator,
    params: ModelParams,
    rows: int,
    cols: int,
    level: Optional[int] = None,
    max_exponent: Fraction = Fraction(1),
    density: float = 0.8,
) -> MatrixOverO:
    zero = PuiseuxElem.zero(params)
    entries = [
        [
            random_element(rng, params, 2, max_exponent, level)
            if rng.random() < density
            else zero
            for _ in range(cols)
        ]
        for _ in range(rows)
    ]
    return MatrixOverO.from_rows(params, entries, cols)


def random_unimodular(
    rng: np.random.Generator, params: ModelParams, n: int, level: Optional[int] = None
) -> MatrixOverO:
    """``L·D·R`` with unitriangular ``L``, ``R`` and a diagonal of units."""
    zero = PuiseuxElem.zero(params)
    one = PuiseuxElem.one(params)

    def triangular(lower: bool) -> MatrixOverO:
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j:
                    row.append(one)
                elif (i > j) == lower and rng.random() < 0.6:
                    row.append(random_element(rng, params, 1, Fraction(1), level))
                else:
                    row.append(zero)
            rows.append(row)
        return MatrixOverO.from_rows(params, rows, n)

    units = [
        [random_unit(rng, params, level) if i == j else zero for j in range(n)]
        for i in range(n)
    ]
    return triangular(True) @ MatrixOverO.from_rows(params, units, n) @ triangular(False)


# ── Sequences and modules ────────────────────────────────────────────────────


def random_eldiv(
    rng: np.random.Generator, max_length: int, max_value: int = 4, max_den: int = 6
) -> EldivSeq:
    size = int(rng.integers(0, max_length + 1))
    return EldivSeq.of(
        Fraction(int(rng.integers(0, max_value * max_den + 1)), int(rng.integers(1, max_den + 1)))
        for _ in range(size)
    )


def random_module(
    rng: np.random.Generator,
    params: ModelParams,
    max_summands: int,
    max_gamma: Fraction = Fraction(3),
    level: Optional[int] = None,
    allow_open: bool = True,
) -> FPTorsionModule:
    level = params.L if level is None else level
    rank = int(rng.integers(1, max_summands + 1))
    gammas = [random_exponent(rng, max_gamma, level, params.p) for _ in range(rank)]
    flags = [bool(rng.random() < 0.3) if allow_open else False for _ in range(rank)]
    return FPTorsionModule.of(params, gammas, flags)


def block_triangular_sequence(
    rng: np.random.Generator,
    params: ModelParams,
    max_summands: int,
    max_gamma: Fraction = Fraction(2),
) -> tuple[ModuleMap, ModuleMap]:
    """A short exact sequence ``0 -> M' -> M -> M'' -> 0`` with random extension data.

    ``M`` is the cokernel of ``P = [[D', C], [0, D'']]``; its Smith form
    ``U P V = diag(t^δ)`` gives the diagonal model of ``M``, the inclusion
    ``U·[I; 0]`` and the projection ``[0 | I]·U^{-1}``.
    """
    sub = random_module(rng, params, max_summands, max_gamma, allow_open=False)
    quot = random_module(rng, params, max_summands, max_gamma, allow_open=False)
    r1, r2 = sub.rank, quot.rank
    n = r1 + r2
    zero = PuiseuxElem.zero(params)
    rows: list[list[PuiseuxElem]] = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                g = sub.gammas[i] if i < r1 else quot.gammas[i - r1]
                row.append(PuiseuxElem.monomial(params, g))
            elif i < r1 <= j and rng.random() < 0.7:
                row.append(random_element(rng, params, 1, max_gamma))
            else:
                row.append(zero)
        rows.append(row)
    presentation = MatrixOverO.from_rows(params, rows, n)
    snf = smith_normal_form(presentation)
    gammas = [Fraction(0)] * n
    for (i, _), e in zip(snf.positions, snf.exponents):
        gammas[i] = e
    middle = FPTorsionModule.of(params, gammas)

    f_rows = [[snf.U[i, j] for j in range(r1)] for i in range(n)]
    g_rows = [[snf.U_inv[r1 + i, j] for j in range(n)] for i in range(r2)]
    f = ModuleMap(sub, middle, MatrixOverO.from_rows(params, f_rows, r1))
    g = ModuleMap(middle, quot, MatrixOverO.from_rows(params, g_rows, n))
    logger.debug("block-triangular sequence %s -> %s -> %s", sub, middle, quot)
    return f, g


# ── Witt vectors ─────────────────────────────────────────────────────────────


def random_witt(
    rng: np.random.Generator,
    params: ModelParams,
    length: Optional[int] = None,
    level: int = 1,
    max_exponent: Fraction = Fraction(1),
    digit_zero: DigitZero = "any",
) -> WittElem:
    """Sparse digits with denominators dividing ``p^level``.

    *digit_zero* constrains the leading digit: ``"unit"`` makes it a unit;
    ``"nonunit"`` makes it zero or of valuation in ``(0, max_exponent]`` and
    then forces a nonzero higher digit, so the element is nonzero but not a unit.
    """
    n = params.m if length is None else length
    digits = []
    for i in range(n):
        if i == 0 and digit_zero == "unit":
            digits.append(PuiseuxElem.monomial(params, 0, random_coefficient(rng, params)))
        elif i == 0 and digit_zero == "nonunit":
            if n > 1 and rng.random() < 0.5:
                digits.append(PuiseuxElem.zero(params))
            else:
                digits.append(
                    random_element(rng, params, 1, max_exponent, level, Fraction(0), strict=True)
                )
        elif rng.random() < 0.6:
            digits.append(random_element(rng, params, 1, max_exponent, level))
        else:
            digits.append(PuiseuxElem.zero(params))
    if digit_zero == "nonunit" and n > 1 and all(x.is_zero() for x in digits[1:]):
        digits[1] = random_element(rng, params, 1, max_exponent, level)
    return WittElem(params, tuple(digits))
