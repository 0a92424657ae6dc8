"""Truncated Witt vectors over the Puiseux model.

A :class:`WittElem` of length ``n`` is ``Σ_{i<n} p^i [x_i]`` with digits
``x_i`` in the perfect ring ``O_{K♭}``.  Its Witt coordinates are
``A_i = x_i^{p^i}``, and ring operations act on coordinates through the
universal Witt polynomials.  Those are generated once per ``(p, n)`` by the
ghost-component recursion in sympy, exactly divided over the integers and
stored as ``(coefficient mod p, exponent vector)`` tables.

Precision is a single t-adic digit precision ``P``: the set of vectors with
every digit divisible by ``t^P`` is an ideal, so sums and products of
elements known to ``P_a`` and ``P_b`` are known to ``min(P_a, P_b)``.
Representatives are treated as exact while evaluating the polynomials;
digit ``n`` needs its coordinate to precision ``p^n·P`` before the
``p^n``-th root is taken.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

import sympy

from almostperiods.config import ModelParams
from almostperiods.errors import ParameterMismatchError
from almostperiods.puiseux import PuiseuxElem

logger = logging.getLogger(__name__)

PolyTable = tuple[tuple[int, tuple[int, ...]], ...]


# ── Universal polynomials ────────────────────────────────────────────────────


@dataclass(frozen=True)
class WittTables:
    """Sum, product and negation polynomials for length ``m`` over ``Z``.

    ``sums[n]`` and ``products[n]`` are in the variables
    ``X_0..X_{m-1}, Y_0..Y_{m-1}``; ``negations[n]`` in ``X_0..X_{m-1}``.
    """

    p: int
    m: int
    sums: tuple[PolyTable, ...]
    products: tuple[PolyTable, ...]
    negations: tuple[PolyTable, ...]


def _ghost(vs: Sequence[sympy.Expr], n: int, p: int) -> sympy.Expr:
    return sum(p**i * vs[i] ** (p ** (n - i)) for i in range(n + 1))


def _to_table(expr: sympy.Expr, gens: Sequence[sympy.Symbol], p: int) -> PolyTable:
    poly = sympy.Poly(sympy.expand(expr), *gens, domain=sympy.ZZ)
    terms = []
    for monom, coeff in poly.terms():
        c = int(coeff) % p
        if c:
            terms.append((c, tuple(int(e) for e in monom)))
    return tuple(sorted(terms, key=lambda t: t[1]))


@functools.lru_cache(maxsize=None)
def witt_tables(p: int, m: int) -> WittTables:
    """Generate the universal polynomials by the ghost-component method.

    ``S_n``, ``P_n`` and ``N_n`` are the unique integer polynomials with
    ``w_n(S) = w_n(X) + w_n(Y)``, ``w_n(P) = w_n(X) w_n(Y)`` and
    ``w_n(N) = -w_n(X)`` where ``w_n(X) = Σ_i p^i X_i^{p^{n-i}}``.
    """
    xs = sympy.symbols(f"X0:{m}")
    ys = sympy.symbols(f"Y0:{m}")
    sums: list[sympy.Expr] = []
    products: list[sympy.Expr] = []
    negations: list[sympy.Expr] = []
    for n in range(m):
        lower_s = sum(p**i * sums[i] ** (p ** (n - i)) for i in range(n))
        lower_p = sum(p**i * products[i] ** (p ** (n - i)) for i in range(n))
        lower_n = sum(p**i * negations[i] ** (p ** (n - i)) for i in range(n))
        sums.append(
            sympy.expand((_ghost(xs, n, p) + _ghost(ys, n, p) - lower_s) / p**n)
        )
        products.append(
            sympy.expand((_ghost(xs, n, p) * _ghost(ys, n, p) - lower_p) / p**n)
        )
        negations.append(sympy.expand((-_ghost(xs, n, p) - lower_n) / p**n))
        logger.debug("Witt polynomials for p=%d, n=%d generated", p, n)
    gens2 = xs + ys
    return WittTables(
        p=p,
        m=m,
        sums=tuple(_to_table(e, gens2, p) for e in sums),
        products=tuple(_to_table(e, gens2, p) for e in products),
        negations=tuple(_to_table(e, xs, p) for e in negations),
    )


# ── Elements ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class WittElem:
    """``Σ_{i<len} p^i [x_i]`` known modulo ``p^len`` and digitwise mod ``t^prec``."""

    params: ModelParams
    digits: tuple[PuiseuxElem, ...]

    def __post_init__(self) -> None:
        for x in self.digits:
            if x.params != self.params:
                raise ParameterMismatchError("Witt digit with foreign parameters")

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def prec(self) -> Fraction:
        if not self.digits:
            return self.params.N
        return min(x.prec for x in self.digits)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.digits)

    def truncate(self, prec: Fraction) -> WittElem:
        return WittElem(self.params, tuple(x.truncate(prec) for x in self.digits))

    def to_json(self) -> dict[str, Any]:
        return {"digits": [str(x) for x in self.digits]}

    @classmethod
    def from_json(cls, params: ModelParams, data: dict[str, Any]) -> WittElem:
        digits = tuple(PuiseuxElem.parse(params, s) for s in data["digits"])
        if not 1 <= len(digits) <= params.m:
            raise ValueError(f"a Witt element needs 1..{params.m} digits, got {len(digits)}")
        return cls(params, digits)

    def __str__(self) -> str:
        return " + ".join(f"p^{i}[{x}]" for i, x in enumerate(self.digits))

    def __add__(self, other: WittElem) -> WittElem:
        return witt_add(self, other)

    def __sub__(self, other: WittElem) -> WittElem:
        return witt_sub(self, other)

    def __neg__(self) -> WittElem:
        return witt_neg(self)

    def __mul__(self, other: WittElem) -> WittElem:
        return witt_mul(self, other)


def teichmuller(x: PuiseuxElem, length: Optional[int] = None) -> WittElem:
    """The Teichmüller lift ``[x]``: digits ``(x, 0, ..., 0)``."""
    n = x.params.m if length is None else length
    zero = PuiseuxElem.zero(x.params, x.prec)
    return WittElem(x.params, (x,) + (zero,) * (n - 1))


def witt_zero(params: ModelParams, length: Optional[int] = None) -> WittElem:
    return teichmuller(PuiseuxElem.zero(params), length)


def witt_one(params: ModelParams, length: Optional[int] = None) -> WittElem:
    return teichmuller(PuiseuxElem.one(params), length)


def witt_coordinates(a: WittElem) -> list[PuiseuxElem]:
    """Classical Witt coordinates ``A_i = x_i^{p^i}``."""
    return [x.frobenius_power(i) for i, x in enumerate(a.digits)]


# ── Polynomial evaluation ────────────────────────────────────────────────────


def _power(
    x: PuiseuxElem,
    e: int,
    prec: Fraction,
    cache: dict[tuple[int, int], PuiseuxElem],
    key: int,
) -> PuiseuxElem:
    # x^e = Π_j frob^j(x)^{e_j} over the base-p digits e_j of e.
    hit = cache.get((key, e))
    if hit is not None:
        return hit
    p = x.params.p
    out: Optional[PuiseuxElem] = None
    j, rest = 0, e
    while rest:
        rest, digit = divmod(rest, p)
        if digit:
            base = cache.get((key, -(j + 1)))
            if base is None:
                base = x.frobenius_power(j).truncate(prec)
                cache[(key, -(j + 1))] = base
            factor = (base**digit).truncate(prec)
            out = factor if out is None else (out * factor).truncate(prec)
        j += 1
    assert out is not None
    cache[(key, e)] = out
    return out


def _evaluate(
    table: PolyTable, values: Sequence[PuiseuxElem], prec: Fraction, params: ModelParams
) -> PuiseuxElem:
    total = PuiseuxElem.zero(params, prec)
    cache: dict[tuple[int, int], PuiseuxElem] = {}
    zero_vars = {i for i, v in enumerate(values) if v.is_zero()}
    for coeff, exps in table:
        if any(e and i in zero_vars for i, e in enumerate(exps)):
            continue
        term: Optional[PuiseuxElem] = None
        for i, e in enumerate(exps):
            if e:
                factor = _power(values[i], e, prec, cache, i)
                term = factor if term is None else (term * factor).truncate(prec)
        if term is None:
            term = PuiseuxElem.one(params, prec)
        total = total + term * coeff
    return total


def _coordinates_for_digit(
    rep: Sequence[PuiseuxElem], n: int, P: Fraction, width: int
) -> list[PuiseuxElem]:
    # Coordinates A_0..A_{width-1} known to p^n·P; only A_0..A_n are used.
    p = rep[0].params.p
    target = P * p**n
    out = []
    for i, x in enumerate(rep):
        if i > n:
            out.append(PuiseuxElem.zero(x.params, target))
        else:
            out.append(x.extend_precision(target / p**i).frobenius_power(i))
    out.extend(PuiseuxElem.zero(rep[0].params, target) for _ in range(width - len(rep)))
    return out


def _apply(
    tables: Sequence[PolyTable],
    operands: Sequence[WittElem],
    length: int,
) -> WittElem:
    params = operands[0].params
    for w in operands[1:]:
        if w.params != params:
            raise ParameterMismatchError("Witt operands with different parameters")
    p = params.p
    P = min(w.prec for w in operands)
    reps = [[x.truncate(P) for x in w.digits[:length]] for w in operands]
    digits = []
    for n in range(length):
        values: list[PuiseuxElem] = []
        for rep in reps:
            values.extend(_coordinates_for_digit(rep, n, P, length))
        coordinate = _evaluate(tables[n], values, P * p**n, params)
        digits.append(coordinate.frobenius_power(-n))
    return WittElem(params, tuple(digits))


# ── Ring operations ──────────────────────────────────────────────────────────


def witt_add(a: WittElem, b: WittElem) -> WittElem:
    n = min(a.length, b.length)
    return _apply(witt_tables(a.params.p, n).sums, (a, b), n)


def witt_mul(a: WittElem, b: WittElem) -> WittElem:
    n = min(a.length, b.length)
    return _apply(witt_tables(a.params.p, n).products, (a, b), n)


def witt_neg(a: WittElem) -> WittElem:
    return _apply(witt_tables(a.params.p, a.length).negations, (a,), a.length)


def witt_sub(a: WittElem, b: WittElem) -> WittElem:
    return witt_add(a, witt_neg(b))


def witt_frobenius(a: WittElem) -> WittElem:
    """``Σ p^i [x_i] -> Σ p^i [x_i^p]``."""
    return WittElem(a.params, tuple(x.frobenius() for x in a.digits))


def witt_p_mul(a: WittElem) -> WittElem:
    """Multiplication by ``p``: the digits move up one place."""
    if not a.digits:
        return a
    zero = PuiseuxElem.zero(a.params, a.prec)
    return WittElem(a.params, (zero,) + a.digits[:-1])


def witt_p_pow_mul(a: WittElem, e: int) -> WittElem:
    for _ in range(e):
        a = witt_p_mul(a)
    return a


def witt_div_p(a: WittElem) -> WittElem:
    """Exact division by ``p`` of a vector with zero digit 0.

    The result is one digit shorter: it is only known modulo ``p^{len-1}``.
    """
    if not a.digits or not a.digits[0].is_zero():
        raise ValueError("only vectors with vanishing digit 0 are divisible by p")
    return WittElem(a.params, a.digits[1:])


def teichmuller_mul(z: PuiseuxElem, a: WittElem) -> WittElem:
    """``[z]·Σ p^i [x_i] = Σ p^i [z x_i]``."""
    return WittElem(a.params, tuple(z * x for x in a.digits))


def witt_scalar(params: ModelParams, k: int, length: Optional[int] = None) -> WittElem:
    """The integer ``k`` as a Witt vector (double-and-add on ``[1]``)."""
    n = params.m if length is None else length
    result = witt_zero(params, n)
    base = witt_one(params, n)
    sign = k < 0
    k = abs(k) % params.p**n
    while k:
        if k & 1:
            result = witt_add(result, base)
        base = witt_add(base, base)
        k >>= 1
    return witt_neg(result) if sign else result


def witt_eq(a: WittElem, b: WittElem) -> bool:
    """Equality modulo ``p^{min length}`` and the smaller digit precision."""
    return witt_sub(a, b).is_zero()
