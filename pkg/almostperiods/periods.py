"""The generator ``ξ`` of ``ker θ``, division by ``ξ`` and ``B_dR^+ / Fil^d``.

With ``ε = 1 + t`` (so ``ε^{1/p} = 1 + t^{1/p}`` in characteristic p) the
element ``ξ = Σ_{j<p} [ε^{j/p}]`` generates ``ker θ``: its digit 0 is
``(ε - 1)/(ε^{1/p} - 1) = t^{(p-1)/p}`` exactly and its digit 1 is a unit.
``θ`` itself is never built; membership in ``ker θ`` is divisibility by
``ξ``, decided digit by digit.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from almostperiods.config import ModelParams
from almostperiods.errors import InvariantViolation, PrecisionExhaustedError
from almostperiods.puiseux import PuiseuxElem
from almostperiods.witt import (
    WittElem,
    teichmuller,
    teichmuller_mul,
    witt_add,
    witt_div_p,
    witt_mul,
    witt_neg,
    witt_one,
    witt_p_pow_mul,
    witt_scalar,
    witt_sub,
    witt_zero,
)

logger = logging.getLogger(__name__)


class Truth(enum.Enum):
    """Three-valued answer of equality tests at finite precision."""

    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"


# ── ξ and division by ξ ──────────────────────────────────────────────────────


def epsilon_root(params: ModelParams) -> PuiseuxElem:
    """``ε^{1/p} = 1 + t^{1/p}``."""
    return PuiseuxElem.one(params) + PuiseuxElem.monomial(params, Fraction(1, params.p))


def xi_element(params: ModelParams, length: Optional[int] = None) -> WittElem:
    """``ξ = Σ_{j<p} [ε^{j/p}]``, checked to have the distinguished digits.

    Raises
    ------
    InvariantViolation
        If digit 0 is not ``t^{(p-1)/p}`` or digit 1 is not a unit.
    """
    n = params.m if length is None else length
    root = epsilon_root(params)
    power = PuiseuxElem.one(params)
    xi = witt_zero(params, n)
    for _ in range(params.p):
        xi = witt_add(xi, teichmuller(power, n))
        power = power * root

    expected = PuiseuxElem.monomial(params, Fraction(params.p - 1, params.p))
    if xi.digits[0] != expected:
        raise InvariantViolation(
            "xi_digit_zero", f"digit 0 of ξ is {xi.digits[0]}, expected {expected}"
        )
    if n > 1 and (xi.digits[1].is_zero() or xi.digits[1].valuation() != 0):
        raise InvariantViolation("xi_digit_one_unit", f"digit 1 of ξ is {xi.digits[1]}")
    return xi


@dataclass(frozen=True, eq=False)
class DivisionResult:
    """``y = quotient·ξ`` when ``success``; otherwise the obstruction."""

    quotient: WittElem
    success: bool
    failed_step: Optional[int] = None
    obstruction: Optional[PuiseuxElem] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "quotient": self.quotient.to_json(),
            "success": self.success,
            "failed_step": self.failed_step,
            "obstruction": None if self.obstruction is None else str(self.obstruction),
        }


def divide_by_xi(y: WittElem, xi: Optional[WittElem] = None) -> DivisionResult:
    """Divide by ``ξ`` modulo ``p^len(y)``.

    Step ``k`` takes ``z_k = r_k[0] / t^{(p-1)/p}``, then sets
    ``r_{k+1} = (r_k - [z_k] ξ) / p``.  The quotient is ``Σ p^k [z_k]``.
    Each step costs one p-digit and ``(p-1)/p`` of t-precision.

    Raises
    ------
    PrecisionExhaustedError
        When a leading digit is zero only below ``t^{(p-1)/p}``.
    """
    params = y.params
    p = params.p
    n = y.length
    if xi is None:
        xi = xi_element(params, n)
    delta = Fraction(p - 1, p)
    r = y
    zs: list[PuiseuxElem] = []
    for k in range(n):
        lead = r.digits[0]
        if lead.is_zero():
            if lead.prec < delta:
                raise PrecisionExhaustedError(
                    f"ξ-division step {k}: digit known only modulo t^{lead.prec}",
                    needed=delta - lead.prec,
                )
            z = PuiseuxElem.zero(params, lead.prec - delta)
        elif lead.valuation() < delta:
            logger.debug("ξ-division fails at step %d: leading digit %s", k, lead)
            partial = WittElem(params, tuple(zs))
            return DivisionResult(partial, False, failed_step=k, obstruction=lead)
        else:
            z = lead.shift(-delta)
        zs.append(z)
        if k < n - 1:
            xi_k = WittElem(params, xi.digits[: r.length])
            diff = witt_sub(r, teichmuller_mul(z, xi_k))
            if not diff.digits[0].is_zero():
                raise InvariantViolation(
                    "xi_division_step", f"step {k} left leading digit {diff.digits[0]}"
                )
            r = witt_div_p(diff)
    return DivisionResult(WittElem(params, tuple(zs)), True)


def in_theta_kernel(y: WittElem) -> bool:
    """``y ∈ (ξ)`` at the precision of ``y``."""
    return divide_by_xi(y).success


# ── B_dR^+ / Fil^d ───────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class BdRElem:
    """The class of ``p^{-pshift}·num`` in ``W[1/p] / (ξ^d)``."""

    num: WittElem
    pshift: int
    d: int

    def __post_init__(self) -> None:
        if not 0 <= self.pshift < max(self.num.length, 1):
            raise PrecisionExhaustedError(
                f"p-shift {self.pshift} leaves no meaningful digit of a length-"
                f"{self.num.length} numerator"
            )
        if not 1 <= self.d <= self.num.params.p:
            raise ValueError(f"filtration degree must be in 1..p, got {self.d}")

    @property
    def params(self) -> ModelParams:
        return self.num.params

    @classmethod
    def from_witt(cls, w: WittElem, d: Optional[int] = None) -> BdRElem:
        return cls(w, 0, w.params.d if d is None else d)

    def to_json(self) -> dict[str, Any]:
        return {**self.num.to_json(), "pshift": self.pshift, "d": self.d}

    @classmethod
    def from_json(cls, params: ModelParams, data: dict[str, Any]) -> BdRElem:
        return cls(WittElem.from_json(params, data), int(data["pshift"]), int(data["d"]))


def _aligned(a: BdRElem, b: BdRElem) -> tuple[WittElem, WittElem, int]:
    if a.d != b.d:
        raise ValueError(f"filtration degrees differ: {a.d} vs {b.d}")
    e = max(a.pshift, b.pshift)
    return witt_p_pow_mul(a.num, e - a.pshift), witt_p_pow_mul(b.num, e - b.pshift), e


def bdr_add(a: BdRElem, b: BdRElem) -> BdRElem:
    x, y, e = _aligned(a, b)
    return BdRElem(witt_add(x, y), e, a.d)


def bdr_sub(a: BdRElem, b: BdRElem) -> BdRElem:
    x, y, e = _aligned(a, b)
    return BdRElem(witt_sub(x, y), e, a.d)


def bdr_neg(a: BdRElem) -> BdRElem:
    return BdRElem(witt_neg(a.num), a.pshift, a.d)


def bdr_mul(a: BdRElem, b: BdRElem) -> BdRElem:
    if a.d != b.d:
        raise ValueError(f"filtration degrees differ: {a.d} vs {b.d}")
    return BdRElem(witt_mul(a.num, b.num), a.pshift + b.pshift, a.d)


def bdr_eq(a: BdRElem, b: BdRElem) -> Truth:
    """Decide ``a = b`` in ``B_dR^+ / Fil^d``.

    The aligned numerator difference is divided by ``ξ`` ``d`` times; a
    failed division means the classes differ, exhausted precision makes
    the answer indeterminate.
    """
    x, y, _ = _aligned(a, b)
    r = witt_sub(x, y)
    for i in range(a.d):
        try:
            result = divide_by_xi(r)
        except PrecisionExhaustedError as exc:
            logger.debug("bdr_eq indeterminate at division %d: %s", i, exc)
            return Truth.INDETERMINATE
        if not result.success:
            return Truth.FALSE
        r = result.quotient
    return Truth.TRUE


def filtration_level(a: BdRElem) -> Optional[int]:
    """Largest ``i < d`` with ``a ∈ Fil^i``; ``None`` when ``a ∈ Fil^d``.

    Precision exhaustion is propagated.
    """
    r = a.num
    for i in range(a.d):
        result = divide_by_xi(r)
        if not result.success:
            return i
        r = result.quotient
    return None


# ── t = log[ε] ───────────────────────────────────────────────────────────────


def log_epsilon(params: ModelParams, d: Optional[int] = None) -> BdRElem:
    """``t = Σ_{n<d} (-1)^{n+1} ([ε] - 1)^n / n`` in ``B_dR^+ / Fil^d``.

    ``([ε] - 1)^n`` lies in ``Fil^n``, so the truncated sum is exact, and
    every ``n < d <= p`` is invertible modulo ``p^m``.
    """
    d = params.d if d is None else d
    if not 1 <= d <= params.p:
        raise ValueError(f"log[ε] needs 1 <= d <= p, got d={d}, p={params.p}")
    modulus = params.p**params.m
    epsilon = PuiseuxElem.one(params) + PuiseuxElem.monomial(params, 1)
    step = witt_sub(teichmuller(epsilon), witt_one(params))
    total = witt_zero(params)
    power = witt_one(params)
    for n in range(1, d):
        power = witt_mul(power, step)
        coeff = (-1) ** (n + 1) * pow(n, -1, modulus)
        total = witt_add(total, witt_mul(witt_scalar(params, coeff), power))
    return BdRElem(total, 0, d)


def epsilon_root_minus_one(params: ModelParams) -> WittElem:
    """``[ε^{1/p}] - 1``, the quotient of ``[ε] - 1`` by ``ξ``."""
    return witt_sub(teichmuller(epsilon_root(params)), witt_one(params))
