"""Matrices over the valuation ring and their Smith normal form.

The elimination follows the Cartan-decomposition argument: the entry of
minimal valuation (the gcd of all entries) is moved to the lower-right
corner of the active block, normalised to the monomial ``t^γ``, and its
row and column are cleared.  Ties are broken by the lowest ``(row, col)``
in lexicographic order.  The procedure then recurses on the upper-left
block, so the pivot exponents come out nondecreasing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

from almostperiods.config import ModelParams
from almostperiods.eldiv import EldivSeq
from almostperiods.errors import ParameterMismatchError, PrecisionExhaustedError
from almostperiods.puiseux import PuiseuxElem
from almostperiods.rational import format_fraction

logger = logging.getLogger(__name__)


# ── Matrices ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class MatrixOverO:
    """A ``rows × cols`` matrix of integral Puiseux elements."""

    params: ModelParams
    rows: int
    cols: int
    entries: tuple[tuple[PuiseuxElem, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError(
                f"entries do not form a {self.rows}x{self.cols} matrix"
            )
        for row in self.entries:
            for x in row:
                if x.params != self.params:
                    raise ParameterMismatchError("matrix entry with foreign parameters")

    # ── Constructors ─────────────────────────────────────────────────

    @classmethod
    def from_rows(
        cls, params: ModelParams, rows: Sequence[Sequence[PuiseuxElem]], cols: Optional[int] = None
    ) -> MatrixOverO:
        rows = [tuple(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        return cls(params, len(rows), ncols, tuple(rows))

    @classmethod
    def from_strings(cls, params: ModelParams, rows: Sequence[Sequence[str]]) -> MatrixOverO:
        return cls.from_rows(
            params, [[PuiseuxElem.parse(params, s) for s in r] for r in rows]
        )

    @classmethod
    def zeros(cls, params: ModelParams, rows: int, cols: int) -> MatrixOverO:
        zero = PuiseuxElem.zero(params)
        return cls(params, rows, cols, tuple(tuple(zero for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, params: ModelParams, n: int) -> MatrixOverO:
        return cls.diagonal(params, [Fraction(0)] * n)

    @classmethod
    def diagonal(
        cls,
        params: ModelParams,
        exponents: Sequence[Fraction],
        rows: Optional[int] = None,
        cols: Optional[int] = None,
    ) -> MatrixOverO:
        """``diag(t^{e_1}, t^{e_2}, ...)`` padded with zeros to ``rows × cols``."""
        n = len(exponents)
        rows = n if rows is None else rows
        cols = n if cols is None else cols
        zero = PuiseuxElem.zero(params)
        out = [[zero] * cols for _ in range(rows)]
        for i, e in enumerate(exponents):
            out[i][i] = PuiseuxElem.monomial(params, e)
        return cls.from_rows(params, out, cols)

    # ── Access and algebra ───────────────────────────────────────────

    def __getitem__(self, ij: tuple[int, int]) -> PuiseuxElem:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list[PuiseuxElem]:
        return [row[j] for row in self.entries]

    def __matmul__(self, other: MatrixOverO) -> MatrixOverO:
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return MatrixOverO.from_rows(
            self.params, _matmul(self.entries, other.entries, self.params, other.cols), other.cols
        )

    def hstack(self, other: MatrixOverO) -> MatrixOverO:
        if self.rows != other.rows:
            raise ValueError("hstack needs equal row counts")
        return MatrixOverO.from_rows(
            self.params,
            [a + b for a, b in zip(self.entries, other.entries)],
            self.cols + other.cols,
        )

    def equals(self, other: MatrixOverO) -> bool:
        """Entrywise equality up to precision."""
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and all(
                a == b
                for ra, rb in zip(self.entries, other.entries)
                for a, b in zip(ra, rb)
            )
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[str(x) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, params: ModelParams, data: dict[str, Any]) -> MatrixOverO:
        matrix = cls.from_strings(params, data["entries"])
        if matrix.rows != data["rows"] or (matrix.rows and matrix.cols != data["cols"]):
            raise ValueError(
                f"declared shape {data['rows']}x{data['cols']} does not match entries"
            )
        return cls(params, data["rows"], data["cols"], matrix.entries)


def _matmul(
    a: Sequence[Sequence[PuiseuxElem]],
    b: Sequence[Sequence[PuiseuxElem]],
    params: ModelParams,
    cols: int,
) -> list[list[PuiseuxElem]]:
    inner = len(b)
    out = []
    for row in a:
        new_row = []
        for j in range(cols):
            acc = PuiseuxElem.zero(params, _big_prec(params))
            for k in range(inner):
                acc = acc + row[k] * b[k][j]
            new_row.append(acc)
        out.append(new_row)
    return out


def _big_prec(params: ModelParams) -> Fraction:
    # Neutral starting precision for accumulators: never the binding one.
    return params.N * 1024


# ── Determinant ──────────────────────────────────────────────────────────────


def determinant(A: MatrixOverO) -> PuiseuxElem:
    """Exact determinant by cofactor expansion along the first row."""
    if A.rows != A.cols:
        raise ValueError(f"determinant of a non-square {A.rows}x{A.cols} matrix")
    return _det([list(r) for r in A.entries], A.params)


def _det(m: list[list[PuiseuxElem]], params: ModelParams) -> PuiseuxElem:
    n = len(m)
    if n == 0:
        return PuiseuxElem.one(params, _big_prec(params))
    if n == 1:
        return m[0][0]
    total = PuiseuxElem.zero(params, _big_prec(params))
    for j in range(n):
        if m[0][j].is_zero() and m[0][j].scaled_prec >= total.scaled_prec:
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = m[0][j] * _det(minor, params)
        total = total + term if j % 2 == 0 else total - term
    return total


def det_valuation(A: MatrixOverO) -> Fraction:
    """``v(det A)``; raises if the determinant is zero at its precision."""
    det = determinant(A)
    if det.is_zero():
        raise PrecisionExhaustedError(
            f"determinant is zero at precision {det.prec}; singular or needs more digits"
        )
    return det.valuation()


# ── Smith normal form ────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class SmithForm:
    """Result of :func:`smith_normal_form`.

    ``U @ A @ V`` is the matrix with ``t^{exponents[k]}`` at
    ``positions[k]`` and zeros elsewhere; ``infinite`` counts the rank
    deficiency (entries with no nonzero digit below working precision).
    """

    exponents: tuple[Fraction, ...]
    positions: tuple[tuple[int, int], ...]
    infinite: int
    U: MatrixOverO
    V: MatrixOverO
    U_inv: MatrixOverO
    V_inv: MatrixOverO

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def divisors(self) -> EldivSeq:
        """Finite part of the diagonal as an elementary-divisor sequence."""
        return EldivSeq.of(self.exponents)

    @property
    def diagonal_report(self) -> list[str]:
        """The diagonal nonincreasing, ``"inf"`` for rank deficiency first."""
        finite = sorted(self.exponents, reverse=True)
        return ["inf"] * self.infinite + [format_fraction(v) for v in finite]

    def diagonal_matrix(self) -> MatrixOverO:
        params = self.U.params
        rows, cols = self.U.rows, self.V.rows
        zero = PuiseuxElem.zero(params)
        out = [[zero] * cols for _ in range(rows)]
        for (i, j), e in zip(self.positions, self.exponents):
            out[i][j] = PuiseuxElem.monomial(params, e)
        return MatrixOverO.from_rows(params, out, cols)

    def to_json(self) -> dict[str, Any]:
        return {
            "divisors": self.diagonal_report,
            "rank": self.rank,
            "infinite": self.infinite,
        }


def smith_normal_form(A: MatrixOverO) -> SmithForm:
    """Smith normal form ``U A V = diag(t^γ)`` over the valuation ring.

    Raises
    ------
    PrecisionExhaustedError
        If an entry that is zero at its precision could still have a
        smaller valuation than the chosen pivot.
    """
    params = A.params
    R, C = A.rows, A.cols
    scale = params.scale
    a = [list(row) for row in A.entries]
    U = _identity(params, R)
    U_inv = _identity(params, R)
    V = _identity(params, C)
    V_inv = _identity(params, C)
    zero = PuiseuxElem.zero(params)

    exponents: list[Fraction] = []
    positions: list[tuple[int, int]] = []
    r, c = R, C
    while r > 0 and c > 0:
        best: Optional[tuple[int, int, int]] = None
        lowest_zero_prec: Optional[int] = None
        for i in range(r):
            for j in range(c):
                x = a[i][j]
                if x.is_zero():
                    if lowest_zero_prec is None or x.scaled_prec < lowest_zero_prec:
                        lowest_zero_prec = x.scaled_prec
                    continue
                v = x.scaled_valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        if lowest_zero_prec is not None and lowest_zero_prec < v:
            raise PrecisionExhaustedError(
                f"an entry known only modulo t^{Fraction(lowest_zero_prec, scale)} "
                f"competes with a pivot of valuation {Fraction(v, scale)}",
                needed=Fraction(v - lowest_zero_prec, scale),
            )
        pr, pc = r - 1, c - 1
        gamma = Fraction(v, scale)
        logger.debug("SNF pivot t^%s from (%d, %d) to (%d, %d)", gamma, i, j, pr, pc)

        # Move the pivot to the lower-right corner of the active block.
        if i != pr:
            a[i], a[pr] = a[pr], a[i]
            U[i], U[pr] = U[pr], U[i]
            _swap_columns(U_inv, i, pr)
        if j != pc:
            _swap_columns(a, j, pc)
            _swap_columns(V, j, pc)
            V_inv[j], V_inv[pc] = V_inv[pc], V_inv[j]

        # Normalise the pivot to the monomial t^gamma.
        unit = a[pr][pc].shift(-gamma)
        unit_inv = unit.inverse()
        a[pr] = [x * unit_inv for x in a[pr]]
        U[pr] = [x * unit_inv for x in U[pr]]
        for row in U_inv:
            row[pr] = row[pr] * unit
        a[pr][pc] = PuiseuxElem.monomial(params, gamma, 1, a[pr][pc].prec)

        # Clear the pivot column above the pivot.
        for i2 in range(pr):
            f = a[i2][pc]
            if f.is_zero():
                a[i2][pc] = zero
                continue
            q = f.shift(-gamma)
            a[i2] = [x - q * y for x, y in zip(a[i2], a[pr])]
            U[i2] = [x - q * y for x, y in zip(U[i2], U[pr])]
            for row in U_inv:
                row[pr] = row[pr] + q * row[i2]
            a[i2][pc] = zero

        # Clear the pivot row left of the pivot (only row pr is affected).
        for j2 in range(pc):
            g = a[pr][j2]
            if g.is_zero():
                a[pr][j2] = zero
                continue
            q = g.shift(-gamma)
            for row in V:
                row[j2] = row[j2] - q * row[pc]
            V_inv[pc] = [x + q * y for x, y in zip(V_inv[pc], V_inv[j2])]
            a[pr][j2] = zero

        exponents.append(gamma)
        positions.append((pr, pc))
        r, c = r - 1, c - 1

    infinite = min(r, c)
    if infinite:
        logger.debug("SNF: rank deficiency %d at working precision", infinite)
    return SmithForm(
        exponents=tuple(exponents),
        positions=tuple(positions),
        infinite=infinite,
        U=MatrixOverO.from_rows(params, U, R),
        V=MatrixOverO.from_rows(params, V, C),
        U_inv=MatrixOverO.from_rows(params, U_inv, R),
        V_inv=MatrixOverO.from_rows(params, V_inv, C),
    )


def _identity(params: ModelParams, n: int) -> list[list[PuiseuxElem]]:
    zero = PuiseuxElem.zero(params)
    one = PuiseuxElem.one(params)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _swap_columns(m: list[list[PuiseuxElem]], i: int, j: int) -> None:
    for row in m:
        row[i], row[j] = row[j], row[i]


# ── Lattices ─────────────────────────────────────────────────────────────────


def free_rank(A: MatrixOverO) -> int:
    """Rank of the free part ``O^r`` of ``coker A``: rows minus rank."""
    return A.rows - smith_normal_form(A).rank


def lattice_basis(generators: MatrixOverO) -> tuple[MatrixOverO, SmithForm]:
    """A square basis of the column span of a full-row-rank matrix.

    With ``U M V = Σ`` and the diagonal in the last ``rows`` columns, the
    span of ``M`` is the span of ``U^{-1} diag(t^δ)``.
    """
    snf = smith_normal_form(generators)
    if snf.rank != generators.rows:
        raise PrecisionExhaustedError(
            f"generators of rank {snf.rank} do not span a full lattice in "
            f"O^{generators.rows} at working precision"
        )
    params = generators.params
    rows = generators.rows
    basis = [[None] * rows for _ in range(rows)]
    for (i, _), e in zip(snf.positions, snf.exponents):
        for k in range(rows):
            basis[k][i] = snf.U_inv[k, i].shift(e)
    return MatrixOverO.from_rows(params, basis, rows), snf


def relative_divisors(generators: MatrixOverO, sub_generators: MatrixOverO) -> EldivSeq:
    """Divisors of ``L / L'`` for lattices ``L' ⊂ L ⊂ O^r``.

    ``L`` is the column span of *generators* (full row rank) and ``L'`` the
    column span of *sub_generators*.  With ``B = U^{-1} diag(t^δ)`` a basis
    of ``L``, the quotient is ``coker(B^{-1} G) = coker(diag(t^{-δ}) U G)``.

    Raises ``ValueError`` if ``L'`` is not contained in ``L``.
    """
    snf = smith_normal_form(generators)
    if snf.rank != generators.rows:
        raise PrecisionExhaustedError(
            f"generators of rank {snf.rank} do not span a full lattice at working precision"
        )
    coords = snf.U @ sub_generators
    delta = {i: e for (i, _), e in zip(snf.positions, snf.exponents)}
    rows = []
    for i, row in enumerate(coords.entries):
        try:
            rows.append([_shift_down(x, delta[i]) for x in row])
        except ValueError as exc:
            raise ValueError("sub-lattice is not contained in the lattice") from exc
    relative = MatrixOverO.from_rows(generators.params, rows, sub_generators.cols)
    return smith_normal_form(relative).divisors


def _shift_down(x: PuiseuxElem, e: Fraction) -> PuiseuxElem:
    if x.is_zero():
        if x.prec < e:
            raise PrecisionExhaustedError(
                f"coordinate known only modulo t^{x.prec} divided by t^{e}",
                needed=e - x.prec,
            )
        return PuiseuxElem.zero(x.params, x.prec - e)
    return x.shift(-e)
