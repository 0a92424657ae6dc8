"""Elementary-divisor sequences and their calculus.

An :class:`EldivSeq` is a finite nonincreasing sequence of nonnegative
rationals ``γ_1 >= γ_2 >= ... > 0`` standing for ``(γ_1, γ_2, ..., 0, 0, ...)``.
It classifies a torsion module up to ``≈``; the functions here implement
the length, the sup-metric, the majorization order, the ``π^ε``-shift and
the two ways of combining sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate, zip_longest
from typing import Any, Iterable

from almostperiods.rational import RationalLike, format_fraction, parse_fraction


@dataclass(frozen=True)
class EldivSeq:
    """Nonincreasing nonnegative rationals with trailing zeros dropped."""

    entries: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        for a, b in zip(self.entries, self.entries[1:]):
            if a < b:
                raise ValueError(f"entries not nonincreasing: {self.entries}")
        if self.entries and self.entries[-1] <= 0:
            raise ValueError(f"trailing zero or negative entry: {self.entries}")

    @classmethod
    def of(cls, values: Iterable[RationalLike]) -> EldivSeq:
        """Normalise any multiset of nonnegative rationals into a sequence."""
        fracs = [parse_fraction(v) for v in values]
        if any(v < 0 for v in fracs):
            raise ValueError(f"negative elementary divisor in {fracs}")
        return cls(tuple(sorted((v for v in fracs if v > 0), reverse=True)))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        """``γ_{i+1}``, with zero beyond the stored entries."""
        return self.entries[i] if i < len(self.entries) else Fraction(0)

    def is_zero(self) -> bool:
        return not self.entries

    def to_json(self) -> dict[str, Any]:
        return {"entries": [format_fraction(v) for v in self.entries]}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> EldivSeq:
        return cls.of(data["entries"])

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.entries) + ")"


# ── Scalar invariants ────────────────────────────────────────────────────────


def length(g: EldivSeq) -> Fraction:
    """``λ``: the sum of the entries (always finite for finite sequences)."""
    return sum(g.entries, Fraction(0))


def norm(g: EldivSeq) -> Fraction:
    """``||γ|| = max γ_i`` (0 for the empty sequence)."""
    return g.entries[0] if g.entries else Fraction(0)


def rank_profile(g: EldivSeq, x: RationalLike) -> int:
    """``#{i : γ_i > x}``, i.e. ``dim_κ (π^x M ⊗ κ)`` for ``M`` with divisors ``γ``.

    Its jumps determine ``γ`` uniquely.
    """
    x = parse_fraction(x)
    return sum(1 for v in g.entries if v > x)


# ── Metric and order ─────────────────────────────────────────────────────────


def linf_dist(g: EldivSeq, h: EldivSeq) -> Fraction:
    """``max_i |g_i - h_i|`` with zero padding."""
    return max(
        (abs(a - b) for a, b in zip_longest(g.entries, h.entries, fillvalue=Fraction(0))),
        default=Fraction(0),
    )


def majorizes(g: EldivSeq, h: EldivSeq) -> bool:
    """``g >= h`` in the majorization order: every prefix sum of ``g`` dominates."""
    n = max(len(g), len(h))
    pg = list(accumulate(g[i] for i in range(n)))
    ph = list(accumulate(h[i] for i in range(n)))
    return all(a >= b for a, b in zip(pg, ph))


# ── Transformations ──────────────────────────────────────────────────────────


def shift_eps(g: EldivSeq, eps: RationalLike) -> EldivSeq:
    """Divisors of ``π^ε M``: entrywise ``max(γ_i - ε, 0)``."""
    eps = parse_fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return EldivSeq.of(max(v - eps, Fraction(0)) for v in g.entries)


def indexwise_sum(g: EldivSeq, h: EldivSeq) -> EldivSeq:
    """``(g_1 + h_1, g_2 + h_2, ...)``."""
    return EldivSeq(
        tuple(a + b for a, b in zip_longest(g.entries, h.entries, fillvalue=Fraction(0)))
    )


def merge_sorted(g: EldivSeq, h: EldivSeq) -> EldivSeq:
    """Divisors of a direct sum: the merged multiset, sorted descending."""
    return EldivSeq.of(g.entries + h.entries)


def finite_approximation(g: EldivSeq, eps: RationalLike) -> EldivSeq:
    """Keep only the entries ``> ε``.

    The truncation ``N_ε`` satisfies ``||γ - γ_{N_ε}|| <= ε``, which is the
    finite-presentation witness for ``⊕ O/I_{γ_i}`` with ``γ_i -> 0``.
    """
    eps = parse_fraction(eps)
    return EldivSeq(tuple(v for v in g.entries if v > eps))
