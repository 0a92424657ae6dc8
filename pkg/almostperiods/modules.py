"""Finitely presented torsion modules ``⊕ O/π^{γ_i}`` and maps between them.

A module is a list of cyclic summands, each an exponent ``γ`` and a flag
telling whether the summand is the closed quotient ``O/π^γ`` or the open
one ``O/I_γ``.  All computations use the closed quotients: ``O/I_γ`` and
``O/π^γ`` are ``≈_ε`` for every ``ε > 0`` and share their divisors, so the
flag is bookkeeping only.

A map ``M -> N`` is a matrix ``X`` with ``x_ij`` sending the ``j``-th
generator of ``M`` to ``Σ_i x_ij e_i``.  It is well defined exactly when
``v(x_ij) >= max(γ_N,i - γ_M,j, 0)``.  Kernels, images and cokernels are
computed from Smith normal forms of augmented presentation matrices.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

from almostperiods.config import ModelParams
from almostperiods.eldiv import EldivSeq, indexwise_sum, length, linf_dist, majorizes
from almostperiods.errors import (
    NotAComplexError,
    NotWellDefinedError,
    ParameterMismatchError,
    PrecisionExhaustedError,
)
from almostperiods.puiseux import PuiseuxElem
from almostperiods.rational import RationalLike, format_fraction, parse_fraction
from almostperiods.snf import MatrixOverO, relative_divisors, smith_normal_form

logger = logging.getLogger(__name__)


# ── Modules ──────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FPTorsionModule:
    """``⊕_i O/π^{γ_i}`` (or ``O/I_{γ_i}`` for summands flagged open).

    Summands are kept in the order given, which fixes the generator basis
    used by :class:`ModuleMap`.  Zero exponents are allowed: a closed one
    is the zero module, an open one is ``O/m`` (almost zero).
    """

    params: ModelParams
    gammas: tuple[Fraction, ...]
    open_flags: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        if not self.open_flags:
            object.__setattr__(self, "open_flags", (False,) * len(self.gammas))
        if len(self.open_flags) != len(self.gammas):
            raise ValueError("one open/closed flag per summand is required")
        for g in self.gammas:
            if g < 0:
                raise ValueError(f"negative exponent {g} in a torsion module")
            if (g * self.params.scale).denominator != 1:
                raise ValueError(f"exponent {g} has denominator beyond p^L")

    @classmethod
    def of(
        cls,
        params: ModelParams,
        gammas: Sequence[RationalLike],
        open_flags: Sequence[bool] = (),
    ) -> FPTorsionModule:
        return cls(params, tuple(parse_fraction(g) for g in gammas), tuple(open_flags))

    @classmethod
    def from_divisors(
        cls, params: ModelParams, divisors: EldivSeq, open_: bool = False
    ) -> FPTorsionModule:
        return cls(params, divisors.entries, (open_,) * len(divisors))

    @property
    def rank(self) -> int:
        """Number of cyclic summands (generators)."""
        return len(self.gammas)

    @property
    def divisors(self) -> EldivSeq:
        return EldivSeq.of(self.gammas)

    def presentation(self) -> MatrixOverO:
        """``diag(t^{γ_i})``: the relations of the chosen generators."""
        return MatrixOverO.diagonal(self.params, self.gammas)

    def padded(self, rank: int) -> FPTorsionModule:
        """Append zero summands up to *rank* generators (same module)."""
        extra = rank - self.rank
        if extra < 0:
            raise ValueError(f"cannot pad a rank-{self.rank} module down to {rank}")
        return FPTorsionModule(
            self.params,
            self.gammas + (Fraction(0),) * extra,
            self.open_flags + (False,) * extra,
        )

    def sorted(self) -> FPTorsionModule:
        order = sorted(range(self.rank), key=lambda i: -self.gammas[i])
        return FPTorsionModule(
            self.params,
            tuple(self.gammas[i] for i in order),
            tuple(self.open_flags[i] for i in order),
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "gammas": [format_fraction(g) for g in self.gammas],
            "open": list(self.open_flags),
        }

    @classmethod
    def from_json(cls, params: ModelParams, data: dict[str, Any]) -> FPTorsionModule:
        return cls.of(params, data["gammas"], data.get("open", ()))

    def __str__(self) -> str:
        if not self.gammas:
            return "0"
        return " ⊕ ".join(
            f"O/I_{g}" if flag else f"O/t^{g}"
            for g, flag in zip(self.gammas, self.open_flags)
        )


def ideal_quotient(params: ModelParams, r: RationalLike, open_: bool = False) -> FPTorsionModule:
    """The cyclic module ``O/π^r`` or, with ``open_``, ``O/I_r``."""
    return FPTorsionModule.of(params, [r], [open_])


def direct_sum(M: FPTorsionModule, N: FPTorsionModule) -> FPTorsionModule:
    _same_params(M.params, N.params)
    return FPTorsionModule(M.params, M.gammas + N.gammas, M.open_flags + N.open_flags)


def dual(M: FPTorsionModule) -> FPTorsionModule:
    """``Hom_O(M, K/O)``: the same divisors with open and closed swapped."""
    return FPTorsionModule(M.params, M.gammas, tuple(not f for f in M.open_flags))


def is_almost_zero(M: FPTorsionModule) -> bool:
    """``γ_M = 0``, i.e. ``M`` is killed by the maximal ideal."""
    return M.divisors.is_zero()


def cokernel_divisors(A: MatrixOverO) -> FPTorsionModule:
    """The torsion part of ``coker A`` from the finite SNF diagonal."""
    snf = smith_normal_form(A)
    if snf.infinite or A.rows > snf.rank:
        logger.debug("cokernel has free rank %d (dropped)", A.rows - snf.rank)
    return FPTorsionModule.from_divisors(A.params, snf.divisors)


def approx_eq(M: FPTorsionModule, N: FPTorsionModule, eps: RationalLike) -> bool:
    """``M ≈_ε N`` by the metric criterion ``||γ_M - γ_N|| <= ε``."""
    eps = parse_fraction(eps)
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    return linf_dist(M.divisors, N.divisors) <= eps


# ── Maps ─────────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class ModuleMap:
    """A map ``source -> target`` given by a ``target.rank × source.rank`` matrix.

    Raises
    ------
    NotWellDefinedError
        If some entry violates the valuation condition.
    PrecisionExhaustedError
        If an entry is zero at a precision too low to decide it.
    """

    source: FPTorsionModule
    target: FPTorsionModule
    matrix: MatrixOverO

    def __post_init__(self) -> None:
        _same_params(self.source.params, self.target.params)
        _same_params(self.source.params, self.matrix.params)
        if (self.matrix.rows, self.matrix.cols) != (self.target.rank, self.source.rank):
            raise ValueError(
                f"map matrix is {self.matrix.rows}x{self.matrix.cols}, expected "
                f"{self.target.rank}x{self.source.rank}"
            )
        for i, gt in enumerate(self.target.gammas):
            for j, gs in enumerate(self.source.gammas):
                bound = max(gt - gs, Fraction(0))
                x = self.matrix[i, j]
                if x.is_zero():
                    if x.prec < bound:
                        raise PrecisionExhaustedError(
                            f"entry ({i}, {j}) is zero only modulo t^{x.prec}; "
                            f"well-definedness needs t^{bound}",
                            needed=bound - x.prec,
                        )
                    continue
                if x.valuation() < bound:
                    raise NotWellDefinedError(
                        f"entry ({i}, {j}) has valuation {x.valuation()} < {bound}"
                    )

    @classmethod
    def identity(cls, M: FPTorsionModule) -> ModuleMap:
        return cls(M, M, MatrixOverO.identity(M.params, M.rank))

    @classmethod
    def zero(cls, source: FPTorsionModule, target: FPTorsionModule) -> ModuleMap:
        return cls(source, target, MatrixOverO.zeros(source.params, target.rank, source.rank))

    def to_json(self) -> dict[str, Any]:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": self.matrix.to_json(),
        }

    @classmethod
    def from_json(cls, params: ModelParams, data: dict[str, Any]) -> ModuleMap:
        return cls(
            FPTorsionModule.from_json(params, data["source"]),
            FPTorsionModule.from_json(params, data["target"]),
            MatrixOverO.from_json(params, data["matrix"]),
        )


def scalar_map(
    source: FPTorsionModule, target: FPTorsionModule, exponent: RationalLike
) -> ModuleMap:
    """Diagonal multiplication by ``t^exponent`` between modules of equal rank."""
    if source.rank != target.rank:
        raise ValueError("scalar maps need modules with the same number of summands")
    e = parse_fraction(exponent)
    return ModuleMap(
        source, target, MatrixOverO.diagonal(source.params, [e] * source.rank)
    )


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """``g ∘ f`` for ``f: M -> N`` and ``g: N -> P``."""
    if g.source.gammas != f.target.gammas:
        raise ValueError("maps are not composable: g.source differs from f.target")
    return ModuleMap(f.source, g.target, g.matrix @ f.matrix)


def maps_equal(f: ModuleMap, g: ModuleMap) -> bool:
    """Equality as maps: entries congruent modulo the target's relations."""
    if f.source.gammas != g.source.gammas or f.target.gammas != g.target.gammas:
        return False
    return all(
        _vanishes_mod(f.matrix[i, j] - g.matrix[i, j], gt)
        for i, gt in enumerate(f.target.gammas)
        for j in range(f.source.rank)
    )


def is_zero_map(f: ModuleMap) -> bool:
    return maps_equal(f, ModuleMap.zero(f.source, f.target))


def _vanishes_mod(x: PuiseuxElem, gamma: Fraction) -> bool:
    if x.is_zero():
        if x.prec < gamma:
            raise PrecisionExhaustedError(
                f"cannot decide vanishing modulo t^{gamma} at precision {x.prec}",
                needed=gamma - x.prec,
            )
        return True
    return x.valuation() >= gamma


# ── Subquotients ─────────────────────────────────────────────────────────────


def map_cokernel(f: ModuleMap) -> FPTorsionModule:
    """``coker f``: the SNF of the target's relations augmented by ``X``."""
    return cokernel_divisors(f.target.presentation().hstack(f.matrix))


def map_image_divisors(f: ModuleMap) -> EldivSeq:
    """Divisors of ``im f = span(D_N | X) / span(D_N)``."""
    relations = f.target.presentation()
    return relative_divisors(relations.hstack(f.matrix), relations)


def _kernel_lattice(f: ModuleMap) -> MatrixOverO:
    # Solutions y of X y ∈ span(D_N): the y-part of ker [X | -D_N].  That
    # matrix has full row rank, so its SNF diagonal fills the last
    # target.rank columns and the first source.rank columns of V span the
    # kernel.
    params = f.source.params
    rs = f.source.rank
    relations = f.target.presentation()
    negated = MatrixOverO.from_rows(
        params, [[-x for x in row] for row in relations.entries], relations.cols
    )
    snf = smith_normal_form(f.matrix.hstack(negated))
    if snf.rank != f.target.rank:
        raise PrecisionExhaustedError(
            "kernel computation lost rank at working precision"
        )
    return MatrixOverO.from_rows(
        params, [[snf.V[i, j] for j in range(rs)] for i in range(rs)], rs
    )


def map_kernel_divisors(f: ModuleMap) -> EldivSeq:
    """Divisors of ``ker f = K / span(D_M)`` with ``K = X^{-1} span(D_N)``."""
    if f.source.rank == 0:
        return EldivSeq()
    return relative_divisors(_kernel_lattice(f), f.source.presentation())


# ── Approximate isomorphism witnesses ────────────────────────────────────────


def witness_maps(
    M: FPTorsionModule, N: FPTorsionModule, eps: RationalLike
) -> Optional[tuple[ModuleMap, ModuleMap]]:
    """Diagonal maps ``f: M -> N`` and ``g: N -> M`` with ``fg = gf = t^ε``.

    Both modules are sorted and padded to a common rank; ``f`` multiplies
    the ``i``-th generator by ``t^{a_i}`` with ``a_i = max(γ_N,i - γ_M,i, 0)``
    and ``g`` by ``t^{ε - a_i}``.  Returns ``None`` when ``M ≈_ε N`` fails.
    """
    eps = parse_fraction(eps)
    if not approx_eq(M, N, eps):
        return None
    M2, N2 = _aligned(M, N)
    a = [max(gn - gm, Fraction(0)) for gm, gn in zip(M2.gammas, N2.gammas)]
    f = ModuleMap(M2, N2, MatrixOverO.diagonal(M.params, a))
    g = ModuleMap(N2, M2, MatrixOverO.diagonal(M.params, [eps - x for x in a]))
    return f, g


def verify_witness(f: ModuleMap, g: ModuleMap, eps: RationalLike) -> bool:
    """``g ∘ f = t^ε`` on the source and ``f ∘ g = t^ε`` on the target."""
    eps = parse_fraction(eps)
    return maps_equal(compose(g, f), scalar_map(f.source, f.source, eps)) and maps_equal(
        compose(f, g), scalar_map(f.target, f.target, eps)
    )


def search_diagonal_witness(
    M: FPTorsionModule, N: FPTorsionModule, eps: RationalLike
) -> Optional[tuple[ModuleMap, ModuleMap]]:
    """Exhaustive search for diagonal witnesses on the ``p^{-L}`` grid.

    Independent of the metric criterion: for every aligned index the
    exponents ``a`` in ``{0, 1/p^L, ..., ε}`` are tried and the pair
    ``(t^a, t^{ε-a})`` is kept when both maps are well defined.
    """
    eps = parse_fraction(eps)
    M2, N2 = _aligned(M, N)
    scale = M.params.scale
    steps = int(eps * scale)
    chosen: list[Fraction] = []
    for gm, gn in zip(M2.gammas, N2.gammas):
        for k in range(steps + 1):
            a = Fraction(k, scale)
            if a >= gn - gm and eps - a >= gm - gn:
                chosen.append(a)
                break
        else:
            return None
    f = ModuleMap(M2, N2, MatrixOverO.diagonal(M.params, chosen))
    g = ModuleMap(N2, M2, MatrixOverO.diagonal(M.params, [eps - a for a in chosen]))
    return f, g


def _aligned(M: FPTorsionModule, N: FPTorsionModule) -> tuple[FPTorsionModule, FPTorsionModule]:
    _same_params(M.params, N.params)
    r = max(M.rank, N.rank)
    return M.sorted().padded(r), N.sorted().padded(r)


# ── Exact sequences ──────────────────────────────────────────────────────────


@dataclass
class ExactSequenceReport:
    """Outcome of :func:`exact_sequence_check` for ``0 -> M' -> M -> M'' -> 0``."""

    injective: bool
    surjective: bool
    middle_exact: bool
    lambda_lhs: Fraction
    lambda_rhs: Fraction
    majorization: bool
    failing_homology: Optional[EldivSeq] = None
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.injective and self.surjective and self.middle_exact

    def to_json(self) -> dict[str, Any]:
        return {
            "exact": self.exact,
            "injective": self.injective,
            "surjective": self.surjective,
            "middle_exact": self.middle_exact,
            "lambda": {
                "lhs": format_fraction(self.lambda_lhs),
                "rhs": format_fraction(self.lambda_rhs),
            },
            "majorization": self.majorization,
            "failing_homology": (
                None if self.failing_homology is None else self.failing_homology.to_json()
            ),
        }


def exact_sequence_check(f: ModuleMap, g: ModuleMap) -> ExactSequenceReport:
    """Check exactness of ``0 -> M' -f-> M -g-> M'' -> 0``.

    On an exact sequence the report also carries ``λ(M)`` against
    ``λ(M') + λ(M'')`` and whether ``γ_M <= γ_M' + γ_M''`` in the
    majorization order.

    Raises
    ------
    NotAComplexError
        If ``g ∘ f`` is not the zero map.
    """
    if f.target.gammas != g.source.gammas:
        raise ValueError("f.target and g.source must be the same module")
    if not is_zero_map(compose(g, f)):
        raise NotAComplexError("g ∘ f is not zero")

    M_sub, M, M_quot = f.source, f.target, g.target
    kernel_f = map_kernel_divisors(f)
    cokernel_g = map_cokernel(g).divisors
    if M.rank:
        homology = relative_divisors(
            _kernel_lattice(g), M.presentation().hstack(f.matrix)
        )
    else:
        homology = EldivSeq()

    report = ExactSequenceReport(
        injective=kernel_f.is_zero(),
        surjective=cokernel_g.is_zero(),
        middle_exact=homology.is_zero(),
        lambda_lhs=length(M.divisors),
        lambda_rhs=length(M_sub.divisors) + length(M_quot.divisors),
        majorization=majorizes(indexwise_sum(M_sub.divisors, M_quot.divisors), M.divisors),
    )
    if not report.middle_exact:
        report.failing_homology = homology
        report.notes.append("ker g / im f is not zero")
    elif not report.injective:
        report.failing_homology = kernel_f
        report.notes.append("f is not injective")
    elif not report.surjective:
        report.failing_homology = cokernel_g
        report.notes.append("g is not surjective")
    logger.debug(
        "exact sequence check: exact=%s λ=%s vs %s",
        report.exact,
        report.lambda_lhs,
        report.lambda_rhs,
    )
    return report


def _same_params(a: ModelParams, b: ModelParams) -> None:
    if a != b:
        raise ParameterMismatchError(f"incompatible model parameters: {a} vs {b}")

