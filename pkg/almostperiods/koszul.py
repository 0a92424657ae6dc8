"""Continuous ``Z_p^n``-cohomology of monomial lines via Koszul complexes.

The generator ``γ_k`` acts on the line ``T_1^{i_1}⋯T_n^{i_n}`` by the root
of unity ``ζ^{i_k}``, so the line's cohomology is that of the Koszul
complex on ``c_k = ζ^{i_k} - 1`` over ``O_K / p^m`` with
``O_K = Z_p[ζ_{p^L}]``.  Every line is computed twice: from the boundary
matrices through :mod:`almostperiods.zpm`, and from the closed form

    ``H^q ≅ (O_K/π^a)^{binom(n, q)}``,  ``a = min_k v_π(c_k)``,

which is free of rank ``binom(n, q)`` when every ``c_k`` vanishes modulo
``p^m``.  The table summary checks the integral line, the annihilation of
every other line by ``ζ_{p^ℓ} - 1`` and the finiteness of the set of lines
surviving multiplication by ``p^ε``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
import sympy
from sympy.functions.combinatorial.numbers import stirling

from almostperiods.config import max_cells
from almostperiods.cyclotomic import CyclotomicRing, zeta_minus_one_valuation
from almostperiods.errors import BudgetExceededError, NotAComplexError
from almostperiods.rational import format_fraction, p_adic_valuation
from almostperiods.zpm import (
    ModuleInvariants,
    ZpmMatrix,
    howell_form,
    kernel_basis,
    matmul_mod,
    quotient_invariants,
    span_contains,
)

logger = logging.getLogger(__name__)

MAX_OPERATORS = 4


# ── Complexes ────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class KoszulSpec:
    """Commuting operators ``c_1, ..., c_n`` on the coefficient ring."""

    ring: CyclotomicRing
    scalars: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.scalars) > MAX_OPERATORS:
            raise ValueError(f"at most {MAX_OPERATORS} operators, got {len(self.scalars)}")
        for c in self.scalars:
            if c.shape != (self.ring.degree,):
                raise ValueError("scalar does not live in the coefficient ring")

    @property
    def n(self) -> int:
        return len(self.scalars)


def _wedge_basis(n: int, q: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(n), q))


def koszul_matrices(spec: KoszulSpec) -> list[ZpmMatrix]:
    """Boundary maps ``d^q: ⋀^q R^n -> ⋀^{q+1} R^n`` flattened to ``Z/p^m``.

    ``d^q(e_S) = Σ_{k ∉ S} (-1)^{#{j ∈ S : j < k}} c_k e_{S ∪ {k}}``.
    """
    ring = spec.ring
    deg = ring.degree
    mults = [ring.multiplication_matrix(c) for c in spec.scalars]
    out = []
    for q in range(spec.n):
        src = _wedge_basis(spec.n, q)
        dst = {S: i for i, S in enumerate(_wedge_basis(spec.n, q + 1))}
        data = np.zeros((len(dst) * deg, len(src) * deg), dtype=np.int64)
        for j, S in enumerate(src):
            for k in range(spec.n):
                if k in S:
                    continue
                sign = (-1) ** sum(1 for s in S if s < k)
                i = dst[tuple(sorted(S + (k,)))]
                data[i * deg : (i + 1) * deg, j * deg : (j + 1) * deg] = sign * mults[k]
        out.append(ZpmMatrix(ring.p, ring.m, data))
    return out


def _boundary(spec: KoszulSpec, matrices: list[ZpmMatrix], q: int) -> tuple[ZpmMatrix, ZpmMatrix]:
    ring = spec.ring
    deg = ring.degree
    dims = [comb(spec.n, k) * deg for k in range(spec.n + 1)]
    d_in = matrices[q - 1] if q >= 1 else ZpmMatrix.zeros(ring.p, ring.m, dims[0], 0)
    d_out = matrices[q] if q < spec.n else ZpmMatrix.zeros(ring.p, ring.m, 0, dims[spec.n])
    return d_in, d_out


def _uniformizer_action(ring: CyclotomicRing, blocks: int) -> np.ndarray:
    # π acting on row vectors: x -> x @ Mult(π)^T, block diagonal.
    mult = ring.multiplication_matrix(ring.uniformizer()).T
    return np.kron(np.eye(blocks, dtype=np.int64), mult) % ring.modulus


def complex_cohomology(spec: KoszulSpec, q: int) -> ModuleInvariants:
    """``H^q`` of the Koszul complex as an ``O_K/p^m``-module."""
    matrices = koszul_matrices(spec)
    d_in, d_out = _boundary(spec, matrices, q)
    return _invariants(spec, d_in, d_out, q)


def _invariants(spec: KoszulSpec, d_in: ZpmMatrix, d_out: ZpmMatrix, q: int) -> ModuleInvariants:
    ring = spec.ring
    if not (d_out @ d_in).is_zero():
        raise NotAComplexError(f"Koszul d^{q} ∘ d^{q - 1} is not zero")
    action = _uniformizer_action(ring, comb(spec.n, q))
    return quotient_invariants(kernel_basis(d_out), d_in.T, action, ring.ramification)


# ── Lines ────────────────────────────────────────────────────────────────────


def line_level(i_tuple: Sequence[Fraction], p: int) -> int:
    """Least ``ℓ`` with ``p^ℓ·i`` integral (0 for the integral line)."""
    level = 0
    for i in i_tuple:
        den = Fraction(i).denominator
        if den > 1:
            level = max(level, p_adic_valuation(den, p))
    return level


def line_spec(i_tuple: Sequence[Fraction], L: int, m: int, p: int) -> KoszulSpec:
    """The Koszul data of a line over ``Z[ζ_{p^L}]/p^m``."""
    ring = CyclotomicRing(p, L, m)
    order = p**L
    scalars = []
    for i in i_tuple:
        i = Fraction(i)
        if not 0 <= i < 1 or (i * order).denominator != 1:
            raise ValueError(f"line index {i} is not in [0, 1) ∩ p^-{L} Z")
        scalars.append(ring.sub(ring.zeta_power(int(i * order)), ring.one()))
    return KoszulSpec(ring, tuple(scalars))


def scalar_valuation(i: Fraction, p: int) -> Optional[Fraction]:
    """``v_p(ζ^i - 1)``; ``None`` when ``i`` is integral."""
    level = line_level([i], p)
    return None if level == 0 else zeta_minus_one_valuation(p, level)


def closed_form(i_tuple: Sequence[Fraction], q: int, L: int, m: int, p: int) -> ModuleInvariants:
    """``(O_K/π^a)^{binom(n, q)}``, free when every ``c_k`` is zero mod ``p^m``."""
    n = len(i_tuple)
    e = CyclotomicRing(p, L, m).ramification
    rank = comb(n, q)
    vals = [v for v in (scalar_valuation(Fraction(i), p) for i in i_tuple) if v is not None]
    if not vals or min(vals) >= m:
        return ModuleInvariants(orders=(), free_rank=rank, m=m, ramification=e)
    a = min(vals) * e
    assert a.denominator == 1
    return ModuleInvariants(orders=(int(a),) * rank, free_rank=0, m=m, ramification=e)


def line_cohomology(
    i_tuple: Sequence[Fraction], q: int, L: int, m: int, p: int
) -> ModuleInvariants:
    """``H^q`` of the line ``i_tuple`` from the boundary matrices."""
    return complex_cohomology(line_spec(i_tuple, L, m, p), q)


def _kills(spec: KoszulSpec, matrices: list[ZpmMatrix], q: int, scalar: np.ndarray) -> bool:
    # scalar·ker d^q ⊂ im d^{q-1}
    ring = spec.ring
    d_in, d_out = _boundary(spec, matrices, q)
    cocycles = kernel_basis(d_out)
    image = howell_form(d_in.T)
    blocks = comb(spec.n, q)
    act = np.kron(np.eye(blocks, dtype=np.int64), ring.multiplication_matrix(scalar).T)
    moved = matmul_mod(cocycles.data, act % ring.modulus, ring.modulus)
    return all(span_contains(image, row) for row in moved)


def _annihilated(spec: KoszulSpec, matrices: list[ZpmMatrix], q: int, level: int) -> bool:
    ring = spec.ring
    root = ring.zeta_power(ring.p ** (ring.level - level))
    return _kills(spec, matrices, q, ring.sub(root, ring.one()))


def _survival_grid(p: int, L: int) -> list[Fraction]:
    """``v(ζ_{p^ℓ} - 1)`` for ``ℓ = 1..L``, the ε values tested for survivors."""
    return [zeta_minus_one_valuation(p, level) for level in range(1, L + 1)]


# ── Tables ───────────────────────────────────────────────────────────────────


@dataclass
class LineRecord:
    i_tuple: tuple[Fraction, ...]
    level: int
    cohomology: dict[int, ModuleInvariants]
    closed_form: dict[int, ModuleInvariants]
    annihilated: Optional[bool]
    survives: dict[Fraction, bool] = field(default_factory=dict)

    @property
    def matches_closed_form(self) -> bool:
        return all(self.cohomology[q] == self.closed_form[q] for q in self.cohomology)


@dataclass
class CohomTable:
    """Per-line Koszul cohomology for all lines of level at most ``L``."""

    n: int
    L: int
    m: int
    p: int
    records: list[LineRecord] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(
            self.summary.get("integral_ranks_ok")
            and self.summary.get("annihilation_ok")
            and self.summary.get("closed_form_ok")
            and self.summary.get("survivors_ok")
        )

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for rec in self.records:
            for q, inv in sorted(rec.cohomology.items()):
                out.append(
                    {
                        "tuple": [format_fraction(i) for i in rec.i_tuple],
                        "q": q,
                        **inv.to_json(),
                    }
                )
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "tuple": "(" + ", ".join(str(i) for i in rec.i_tuple) + ")",
                    "level": rec.level,
                    "q": q,
                    "orders": " ".join(str(v) for v in inv.valuations()) or "-",
                    "free_rank": inv.free_rank,
                    "closed_form_ok": inv == rec.closed_form[q],
                }
                for rec in self.records
                for q, inv in sorted(rec.cohomology.items())
            ]
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "L": self.L,
            "m": self.m,
            "p": self.p,
            "rows": self.rows(),
            "summary": self.summary,
            "passed": self.passed,
        }


def table_cells(n: int, L: int, p: int) -> int:
    return p ** (L * n) * 2**n


def full_table(
    n: int,
    L: int,
    m: int,
    p: int,
    q_range: Optional[Sequence[int]] = None,
    budget: Optional[int] = None,
) -> CohomTable:
    """Cohomology of every line ``i ∈ ([0,1) ∩ p^{-L} Z)^n``.

    Raises
    ------
    BudgetExceededError
        If ``p^{Ln}·2^n`` exceeds *budget* (default: :func:`max_cells`).
    """
    if not 1 <= n <= MAX_OPERATORS:
        raise ValueError(f"n must be in 1..{MAX_OPERATORS}, got {n}")
    limit = max_cells() if budget is None else budget
    cells = table_cells(n, L, p)
    if cells > limit:
        raise BudgetExceededError(
            f"table for n={n}, L={L}, p={p} has {cells} cells; budget is {limit}"
        )
    qs = list(range(n + 1)) if q_range is None else sorted(set(q_range))
    order = p**L
    table = CohomTable(n=n, L=L, m=m, p=p)
    for raw in itertools.product(range(order), repeat=n):
        i_tuple = tuple(Fraction(u, order) for u in raw)
        spec = line_spec(i_tuple, L, m, p)
        matrices = koszul_matrices(spec)
        level = line_level(i_tuple, p)
        cohom: dict[int, ModuleInvariants] = {}
        closed: dict[int, ModuleInvariants] = {}
        annihilated: Optional[bool] = None if level == 0 else True
        for q in qs:
            d_in, d_out = _boundary(spec, matrices, q)
            cohom[q] = _invariants(spec, d_in, d_out, q)
            closed[q] = closed_form(i_tuple, q, L, m, p)
            if level:
                annihilated = annihilated and _annihilated(spec, matrices, q, level)
        survives: dict[Fraction, bool] = {}
        if level:
            ring = spec.ring
            for eps in _survival_grid(p, L):
                power = ring.power(ring.uniformizer(), int(eps * ring.ramification))
                survives[eps] = not all(_kills(spec, matrices, q, power) for q in qs)
        table.records.append(LineRecord(i_tuple, level, cohom, closed, annihilated, survives))
    table.summary = _summarize(table, qs)
    logger.info(
        "Koszul table n=%d L=%d m=%d p=%d: %d lines, passed=%s",
        n,
        L,
        m,
        p,
        len(table.records),
        table.passed,
    )
    return table


def _summarize(table: CohomTable, qs: Sequence[int]) -> dict[str, Any]:
    n, p = table.n, table.p
    integral = table.records[0]
    integral_ok = all(
        integral.cohomology[q].free_rank == comb(n, q) and not integral.cohomology[q].orders
        for q in qs
    )
    mismatches = [
        [format_fraction(i) for i in rec.i_tuple]
        for rec in table.records
        if not rec.matches_closed_form
    ]
    unannihilated = [
        [format_fraction(i) for i in rec.i_tuple]
        for rec in table.records
        if rec.annihilated is False
    ]
    # A line survives p^ε when π^{εe} fails to kill some cocycle modulo
    # coboundaries.  Survivors must have v(ζ_{p^ℓ} - 1) > ε and must be exactly
    # the lines whose invariants are not killed by p^ε.
    survivors: dict[str, int] = {}
    survivor_mismatches: list[dict[str, Any]] = []
    survivors_ok = True
    for eps in _survival_grid(p, table.L):
        alive = [rec for rec in table.records if rec.level and rec.survives[eps]]
        survivors[format_fraction(eps)] = len(alive)
        survivors_ok = survivors_ok and all(
            zeta_minus_one_valuation(p, rec.level) > eps for rec in alive
        )
        for rec in table.records:
            if not rec.level:
                continue
            by_invariants = any(
                inv.annihilator_valuation() > eps for inv in rec.cohomology.values()
            )
            if by_invariants != rec.survives[eps]:
                survivor_mismatches.append(
                    {"tuple": [format_fraction(i) for i in rec.i_tuple], "eps": format_fraction(eps)}
                )
    survivors_ok = survivors_ok and not survivor_mismatches
    return {
        "integral_ranks_ok": integral_ok,
        "integral_ranks": {str(q): integral.cohomology[q].free_rank for q in qs},
        "closed_form_ok": not mismatches,
        "closed_form_mismatches": mismatches,
        "annihilation_ok": not unannihilated,
        "not_annihilated": unannihilated,
        "survivors_by_eps": survivors,
        "survivor_mismatches": survivor_mismatches,
        "survivors_ok": survivors_ok,
    }


# ── Frobenius twist ──────────────────────────────────────────────────────────


def frobenius_twist_check(n: int, L: int, m: int, p: int) -> dict[str, Any]:
    """Map level-``L`` lines ``i -> i/p`` into level ``L+1``.

    For every nonintegral line the annihilator valuation must be divided
    by ``p``, matching ``v(ζ_{p^{ℓ+1}} - 1) = v(ζ_{p^ℓ} - 1)/p``.
    """
    order = p**L
    failures = []
    checked = 0
    for level in range(1, L + 1):
        if zeta_minus_one_valuation(p, level + 1) * p != zeta_minus_one_valuation(p, level):
            failures.append({"level": level, "reason": "zeta valuation not divided by p"})
    for raw in itertools.product(range(order), repeat=n):
        i_tuple = tuple(Fraction(u, order) for u in raw)
        if line_level(i_tuple, p) == 0:
            continue
        twisted = tuple(i / p for i in i_tuple)
        for q in range(n + 1):
            before = line_cohomology(i_tuple, q, L, m, p).annihilator_valuation()
            after = line_cohomology(twisted, q, L + 1, m, p).annihilator_valuation()
            checked += 1
            if after * p != before:
                failures.append(
                    {
                        "tuple": [format_fraction(i) for i in i_tuple],
                        "q": q,
                        "before": format_fraction(before),
                        "after": format_fraction(after),
                    }
                )
    return {"checked": checked, "failures": failures, "passed": not failures}


# ── Finite differences ───────────────────────────────────────────────────────


MAX_DEGREE_BOUND = 12


def finite_difference(poly: sympy.Expr, var: sympy.Symbol) -> sympy.Expr:
    """``P(V + 1) - P(V)``."""
    return sympy.expand(poly.subs(var, var + 1) - poly)


@dataclass
class FiniteDifferenceReport:
    deg_bound: int
    kernel_is_constants: bool
    surjective_below_bound: bool
    preimages: dict[int, str]

    @property
    def passed(self) -> bool:
        return self.kernel_is_constants and self.surjective_below_bound

    def to_json(self) -> dict[str, Any]:
        return {
            "deg_bound": self.deg_bound,
            "kernel_is_constants": self.kernel_is_constants,
            "surjective_below_bound": self.surjective_below_bound,
            "preimages": {str(k): v for k, v in sorted(self.preimages.items())},
            "passed": self.passed,
        }


def finite_difference_cohomology(deg_bound: int) -> FiniteDifferenceReport:
    """Kernel and cokernel of ``Δ`` on polynomials of degree ``<= deg_bound``.

    The kernel is computed as the nullspace of the exact rational matrix of
    ``Δ`` in the monomial basis.  For surjectivity every ``V^j`` with
    ``j < deg_bound`` gets the explicit preimage
    ``Σ_k S(j, k) V^{(k+1)} / (k + 1)`` built from Stirling numbers and
    falling factorials, and ``Δ`` of it is compared with ``V^j``.
    """
    if not 0 <= deg_bound <= MAX_DEGREE_BOUND:
        raise ValueError(f"deg_bound must be in 0..{MAX_DEGREE_BOUND}, got {deg_bound}")
    V = sympy.Symbol("V")
    size = deg_bound + 1
    columns = []
    for e in range(size):
        image = sympy.Poly(finite_difference(V**e, V), V)
        col = [image.coeff_monomial(V**k) for k in range(size)]
        columns.append(col)
    delta = sympy.Matrix(size, size, lambda i, j: columns[j][i])
    kernel = delta.nullspace()
    kernel_ok = len(kernel) == 1 and kernel[0][0] != 0 and not any(kernel[0][1:])

    preimages: dict[int, str] = {}
    surjective = True
    for j in range(deg_bound):
        pre = sum(
            stirling(j, k)
            * sympy.ff(V, k + 1)
            / (k + 1)
            for k in range(j + 1)
        )
        pre = sympy.expand(pre)
        if sympy.expand(finite_difference(pre, V) - V**j) != 0:
            surjective = False
        preimages[j] = str(pre)
    logger.debug("finite differences up to degree %d: kernel dim %d", deg_bound, len(kernel))
    return FiniteDifferenceReport(deg_bound, kernel_ok, surjective, preimages)
