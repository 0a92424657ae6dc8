"""Truncated Puiseux series over ``F_{p^s}``: the model of ``O_{K♭}``.

An element is a finite sum ``Σ c_e t^e`` with exponents ``e`` in
``p^{-L} Z_{>=0}`` together with a precision ``prec``: the element is known
modulo ``t^prec``.  Exponents are stored internally as integers in units of
``1/p^L`` so that all arithmetic stays exact and fast.

Precision is explicit.  Every operation computes the precision it can
guarantee from the precisions of its inputs and truncates to it; nothing
is silently assumed beyond it.  "No terms below ``prec``" is the only zero,
and equality is tested up to the smaller precision of the operands.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from almostperiods.config import ModelParams
from almostperiods.errors import (
    LevelOverflowError,
    ParameterMismatchError,
    PrecisionExhaustedError,
)
from almostperiods.rational import RationalLike, format_exponent, parse_fraction
from almostperiods.residue import ResidueField, residue_field

logger = logging.getLogger(__name__)

_TERM_RE = re.compile(r"^(?:(\d+)\*)?t\^\(([^)]*)\)$")
_BIG_O_RE = re.compile(r"^O\(t\^\(([^)]*)\)\)$")


@dataclass(frozen=True)
class ZeroAtPrecision:
    """Valuation marker for an element with no terms below ``prec``."""

    prec: Fraction

    def __str__(self) -> str:
        return f"inf@{format_exponent(self.prec)}"


Valuation = Union[Fraction, ZeroAtPrecision]


class PuiseuxElem:
    """An element of ``F_{p^s}[[t^{1/p^L}]]`` known modulo ``t^prec``.

    Instances are immutable.  Use the constructors :meth:`zero`,
    :meth:`one`, :meth:`monomial`, :meth:`from_terms` and :meth:`parse`.
    """

    __slots__ = ("params", "_terms", "_prec")
    __hash__ = None  # equality is only defined up to precision

    def __init__(
        self,
        params: ModelParams,
        terms: Mapping[int, int],
        prec: int,
    ) -> None:
        # Internal constructor: ``terms`` maps scaled exponents to encoded
        # coefficients; zero coefficients and exponents >= prec are dropped.
        if prec < 0:
            raise ValueError(f"negative precision {prec}")
        clean = tuple(
            sorted((e, c) for e, c in terms.items() if c and e < prec)
        )
        if clean and clean[0][0] < 0:
            raise ValueError("negative exponent: element is not integral")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_prec", prec)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("PuiseuxElem is immutable")

    # ── Constructors ─────────────────────────────────────────────────────

    @classmethod
    def zero(cls, params: ModelParams, prec: Optional[RationalLike] = None) -> PuiseuxElem:
        return cls(params, {}, _scaled(params, params.N if prec is None else prec))

    @classmethod
    def one(cls, params: ModelParams, prec: Optional[RationalLike] = None) -> PuiseuxElem:
        return cls.monomial(params, 0, 1, prec)

    @classmethod
    def monomial(
        cls,
        params: ModelParams,
        exponent: RationalLike,
        coeff: int = 1,
        prec: Optional[RationalLike] = None,
    ) -> PuiseuxElem:
        field = residue_field(params.p, params.s)
        e = _scaled(params, exponent)
        return cls(
            params,
            {e: field.element(coeff)},
            _scaled(params, params.N if prec is None else prec),
        )

    @classmethod
    def from_terms(
        cls,
        params: ModelParams,
        terms: Mapping[RationalLike, int],
        prec: Optional[RationalLike] = None,
    ) -> PuiseuxElem:
        """Build ``Σ c t^e`` from a mapping ``{e: c}`` of rational exponents."""
        field = residue_field(params.p, params.s)
        scaled: dict[int, int] = {}
        for exponent, coeff in terms.items():
            e = _scaled(params, exponent)
            scaled[e] = field.add(scaled.get(e, 0), field.element(coeff))
        return cls(params, scaled, _scaled(params, params.N if prec is None else prec))

    @classmethod
    def parse(cls, params: ModelParams, text: str) -> PuiseuxElem:
        """Read the textual syntax ``1*t^(1/2)+2*t^(3/2)+O(t^(5))``.

        The ``O(...)`` term is optional and defaults to ``O(t^N)``.
        Raises ``ValueError`` on malformed input.
        """
        pieces = [piece.strip() for piece in text.replace(" ", "").split("+") if piece]
        if not pieces:
            raise ValueError("empty element string")
        terms: dict[Fraction, int] = {}
        prec: Optional[Fraction] = None
        field = residue_field(params.p, params.s)
        for piece in pieces:
            big_o = _BIG_O_RE.match(piece)
            if big_o:
                if prec is not None:
                    raise ValueError(f"two precision terms in {text!r}")
                prec = parse_fraction(big_o.group(1))
                continue
            if piece.isdigit():
                coeff, exponent = int(piece), Fraction(0)
            else:
                term = _TERM_RE.match(piece)
                if not term:
                    raise ValueError(f"cannot parse term {piece!r} in {text!r}")
                coeff = int(term.group(1)) if term.group(1) else 1
                exponent = parse_fraction(term.group(2))
            terms[exponent] = field.add(terms.get(exponent, 0), field.element(coeff))
        return cls.from_terms(params, terms, prec)

    # ── Accessors ────────────────────────────────────────────────────────

    @property
    def field(self) -> ResidueField:
        return residue_field(self.params.p, self.params.s)

    @property
    def prec(self) -> Fraction:
        return Fraction(self._prec, self.params.scale)

    @property
    def terms(self) -> tuple[tuple[Fraction, int], ...]:
        scale = self.params.scale
        return tuple((Fraction(e, scale), c) for e, c in self._terms)

    @property
    def scaled_terms(self) -> tuple[tuple[int, int], ...]:
        return self._terms

    @property
    def scaled_prec(self) -> int:
        return self._prec

    def is_zero(self) -> bool:
        return not self._terms

    def valuation(self) -> Valuation:
        """Least exponent with nonzero coefficient, or :class:`ZeroAtPrecision`."""
        if not self._terms:
            return ZeroAtPrecision(self.prec)
        return Fraction(self._terms[0][0], self.params.scale)

    def scaled_valuation(self) -> int:
        """Valuation in units of ``1/p^L``; ``prec`` for a zero element."""
        return self._terms[0][0] if self._terms else self._prec

    def leading_coefficient(self) -> int:
        if not self._terms:
            raise ValueError("zero element has no leading coefficient")
        return self._terms[0][1]

    def coefficient(self, exponent: RationalLike) -> int:
        e = _scaled(self.params, exponent)
        if e >= self._prec:
            raise PrecisionExhaustedError(
                f"coefficient of t^{exponent} requested at precision {self.prec}",
                needed=Fraction(e - self._prec + 1, self.params.scale),
            )
        return dict(self._terms).get(e, 0)

    # ── Ring structure ───────────────────────────────────────────────────

    def _check(self, other: PuiseuxElem) -> None:
        if other.params is not self.params and other.params != self.params:
            raise ParameterMismatchError(
                f"incompatible model parameters: {self.params} vs {other.params}"
            )

    def __add__(self, other: PuiseuxElem) -> PuiseuxElem:
        if not isinstance(other, PuiseuxElem):
            return NotImplemented
        self._check(other)
        prec = min(self._prec, other._prec)
        out = dict(t for t in self._terms if t[0] < prec)
        add = self.field.add
        for e, c in other._terms:
            if e < prec:
                out[e] = add(out.get(e, 0), c)
        return PuiseuxElem(self.params, out, prec)

    def __neg__(self) -> PuiseuxElem:
        neg = self.field.neg
        return PuiseuxElem(self.params, {e: neg(c) for e, c in self._terms}, self._prec)

    def __sub__(self, other: PuiseuxElem) -> PuiseuxElem:
        if not isinstance(other, PuiseuxElem):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Union[PuiseuxElem, int]) -> PuiseuxElem:
        if isinstance(other, int):
            scalar = self.field.scalar
            return PuiseuxElem(
                self.params, {e: scalar(other, c) for e, c in self._terms}, self._prec
            )
        if not isinstance(other, PuiseuxElem):
            return NotImplemented
        self._check(other)
        va, vb = self.scaled_valuation(), other.scaled_valuation()
        prec = min(self._prec + vb, other._prec + va)
        out: dict[int, int] = {}
        field = self.field
        p = self.params.p
        fast = self.params.s == 1
        for ea, ca in self._terms:
            limit = prec - ea
            for eb, cb in other._terms:
                if eb >= limit:
                    break
                e = ea + eb
                if fast:
                    out[e] = (out.get(e, 0) + ca * cb) % p
                else:
                    out[e] = field.add(out.get(e, 0), field.mul(ca, cb))
        return PuiseuxElem(self.params, out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> PuiseuxElem:
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PuiseuxElem.one(self.params, max(self.params.N, self.prec))
        result: Optional[PuiseuxElem] = None
        base = self
        while True:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if not n:
                return result
            base = base * base

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PuiseuxElem):
            return NotImplemented
        return (self - other).is_zero()

    def equals(self, other: PuiseuxElem) -> bool:
        """Equality up to the smaller of the two precisions."""
        return self == other

    # ── Precision management ─────────────────────────────────────────────

    def truncate(self, prec: RationalLike) -> PuiseuxElem:
        """Forget everything from ``t^prec`` on (never raises precision)."""
        new = min(self._prec, _scaled(self.params, prec))
        return PuiseuxElem(self.params, dict(self._terms), new)

    def extend_precision(self, prec: RationalLike) -> PuiseuxElem:
        """Declare the stored terms exact up to ``t^prec``.

        Only valid when the caller knows the missing digits are zero, e.g.
        for representatives that are then pushed through an operation whose
        output precision is re-derived independently.
        """
        new = _scaled(self.params, prec)
        return PuiseuxElem(self.params, dict(self._terms), max(new, self._prec))

    # ── Monomial shifts and division ─────────────────────────────────────

    def shift(self, exponent: RationalLike) -> PuiseuxElem:
        """Multiply by ``t^exponent``; a negative shift must stay integral."""
        k = _scaled(self.params, exponent, allow_negative=True)
        if k < 0 and self.scaled_valuation() < -k:
            raise ValueError(
                f"t^{format_exponent(Fraction(k, self.params.scale))} times "
                f"an element of valuation {self.valuation()} is not integral"
            )
        return PuiseuxElem(
            self.params, {e + k: c for e, c in self._terms}, self._prec + k
        )

    def inverse(self) -> PuiseuxElem:
        """Inverse of a unit (valuation 0) by Newton iteration.

        The result is known to the same precision as ``self``.
        """
        if not self._terms or self._terms[0][0] != 0:
            raise ZeroDivisionError(f"{self} is not a unit")
        field = self.field
        target = self._prec
        c0 = self._terms[0][1]
        good = self._terms[1][0] if len(self._terms) > 1 else target
        x = PuiseuxElem(self.params, {0: field.inv(c0)}, target)
        two = PuiseuxElem(self.params, {0: field.scalar(2, 1)}, target)
        while good < target:
            good = min(2 * good, target)
            x = x * (two - self * x)
            x = PuiseuxElem(self.params, dict(x._terms), good).extend_precision(
                Fraction(target, self.params.scale)
            )
            logger.debug("unit inverse: %d/%d digits", good, target)
        return PuiseuxElem(self.params, dict(x._terms), target)

    def divide(self, other: PuiseuxElem) -> PuiseuxElem:
        """Quotient ``self / other`` in ``O`` (requires ``v(self) >= v(other)``)."""
        self._check(other)
        if other.is_zero():
            raise PrecisionExhaustedError(
                f"division by an element that is zero at precision {other.prec}"
            )
        vb = other.scaled_valuation()
        if self.scaled_valuation() < vb:
            raise ValueError(
                f"{self} is not divisible by {other} in the valuation ring"
            )
        shift = Fraction(-vb, self.params.scale)
        return self.shift(shift) * other.shift(shift).inverse()

    # ── Frobenius ────────────────────────────────────────────────────────

    def frobenius(self) -> PuiseuxElem:
        """``x -> x^p``: exponents scale by ``p``, precision by ``p`` up to ``N``.

        An input already known past ``N`` keeps its own precision.  Only
        :meth:`frobenius_power`, which Witt-coordinate evaluation uses, goes
        to the full ``p·prec``.
        """
        out = self._frobenius_uncapped()
        cap = max(_scaled(self.params, self.params.N), self._prec)
        return PuiseuxElem(self.params, dict(out._terms), min(out._prec, cap))

    def _frobenius_uncapped(self) -> PuiseuxElem:
        p = self.params.p
        frob = self.field.frobenius
        return PuiseuxElem(
            self.params, {p * e: frob(c) for e, c in self._terms}, p * self._prec
        )

    def frobenius_inverse(self) -> PuiseuxElem:
        """Exact ``p``-th root; raises :class:`LevelOverflowError` past level L."""
        p = self.params.p
        out: dict[int, int] = {}
        root = self.field.frobenius_inverse
        for e, c in self._terms:
            if e % p:
                raise LevelOverflowError(
                    f"p-th root of t^{format_exponent(Fraction(e, self.params.scale))} "
                    f"needs denominators beyond p^L with L={self.params.L}"
                )
            out[e // p] = root(c)
        return PuiseuxElem(self.params, out, self._prec // p)

    def frobenius_power(self, k: int) -> PuiseuxElem:
        """Apply Frobenius ``k`` times (its inverse for negative ``k``).

        Precision scales by ``p^k`` with no cap at ``N``.
        """
        out = self
        for _ in range(abs(k)):
            out = out._frobenius_uncapped() if k > 0 else out.frobenius_inverse()
        return out

    # ── Display ──────────────────────────────────────────────────────────

    def __str__(self) -> str:
        scale = self.params.scale
        parts = [
            f"{c}*t^({format_exponent(Fraction(e, scale))})" for e, c in self._terms
        ]
        parts.append(f"O(t^({format_exponent(self.prec)}))")
        return "+".join(parts)

    def __repr__(self) -> str:
        return f"PuiseuxElem({self})"


# ── Helpers ──────────────────────────────────────────────────────────────────


def _scaled(params: ModelParams, value: RationalLike, allow_negative: bool = False) -> int:
    """Convert a rational exponent to units of ``1/p^L``."""
    frac = parse_fraction(value)
    scaled = frac * params.scale
    if scaled.denominator != 1:
        raise LevelOverflowError(
            f"exponent {frac} has denominator beyond p^L = {params.scale}"
        )
    if scaled < 0 and not allow_negative:
        raise ValueError(f"negative exponent {frac}")
    return int(scaled)


# ── Valuation-ring operations ────────────────────────────────────────────────


def gcd(elems: Iterable[PuiseuxElem]) -> PuiseuxElem:
    """Greatest common divisor in the valuation ring.

    Any element of minimal valuation is a gcd; the monomial normal form
    ``t^{min v}`` is returned.  Raises ``ValueError`` if every element is
    zero at its precision (or the list is empty).
    """
    elems = list(elems)
    nonzero = [a for a in elems if not a.is_zero()]
    if not nonzero:
        raise ValueError("gcd of elements that are all zero at precision")
    best = min(a.scaled_valuation() for a in nonzero)
    for a in elems:
        if a.is_zero() and a.scaled_prec < best:
            raise PrecisionExhaustedError(
                f"zero element at precision {a.prec} may hide a smaller valuation",
                needed=Fraction(best - a.scaled_prec, a.params.scale),
            )
    params = nonzero[0].params
    return PuiseuxElem.monomial(params, Fraction(best, params.scale))


def artin_schreier_solve(a: PuiseuxElem) -> PuiseuxElem:
    """Solve ``x^p - x = a`` for ``v(a) > 0``.

    Uses ``x = -(a + a^p + a^{p^2} + ...)``; the series converges t-adically
    and the result is exact to the precision of ``a``.  Raises
    ``ValueError`` when ``v(a) <= 0``.
    """
    if a.is_zero():
        return PuiseuxElem.zero(a.params, a.prec)
    if a.scaled_valuation() <= 0:
        raise ValueError(
            f"Artin-Schreier solving needs positive valuation, got {a.valuation()}"
        )
    prec = a.prec
    total = PuiseuxElem.zero(a.params, prec)
    term = a
    steps = 0
    while not term.truncate(prec).is_zero():
        total = total + term.truncate(prec)
        term = term.frobenius()
        steps += 1
    logger.debug("Artin-Schreier series: %d terms at precision %s", steps, prec)
    return -total


def artin_schreier_solve_vector(values: Iterable[PuiseuxElem]) -> list[PuiseuxElem]:
    """Coordinate-wise Artin-Schreier solving on ``(K♭)^r``."""
    return [artin_schreier_solve(a) for a in values]
