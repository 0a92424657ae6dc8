"""Exact rational parsing and formatting helpers.

Rationals travel through JSON as strings ``"a/b"``; integers and plain
``"a"`` strings are accepted on input.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import sympy

RationalLike = Union[Fraction, int, str]


def parse_fraction(value: RationalLike) -> Fraction:
    """Convert *value* to a :class:`Fraction`, rejecting floats.

    Raises ``ValueError`` for malformed strings and ``TypeError`` for
    floats or other types (floating point never enters the system).
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot read {type(value).__name__} as an exact rational")


def format_fraction(value: Fraction) -> str:
    """Serialise as ``"a/b"`` (always with a denominator)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_exponent(value: Fraction) -> str:
    """Compact form used inside element strings: ``"3/2"`` or ``"5"``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def p_adic_valuation(n: int, p: int) -> int:
    """Exponent of *p* in the nonzero integer *n*."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    return bool(sympy.isprime(n))
