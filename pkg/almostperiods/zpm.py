"""Linear algebra over ``Z/p^m``: Howell form, kernels and cohomology.

Matrices are dense numpy ``int64`` arrays reduced into ``[0, p^m)``.  Over
the local ring ``Z/p^m`` every entry is ``p^a·unit``, so the Howell form is
computed by choosing, column by column, a pivot of minimal p-valuation,
normalising it to ``p^a`` and appending the closure row ``p^{m-a}·pivot``.
The resulting rows satisfy the Howell property: the rows whose first
``k`` entries vanish span every element of the row span with that shape.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from almostperiods.errors import NotAComplexError, ParameterMismatchError
from almostperiods.rational import format_fraction, is_prime

logger = logging.getLogger(__name__)

MAX_MODULUS = 2**30


# ── Matrices ─────────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class ZpmMatrix:
    """A dense matrix over ``Z/p^m``."""

    p: int
    m: int
    data: np.ndarray

    def __post_init__(self) -> None:
        if not is_prime(self.p) or self.m < 1:
            raise ValueError(f"invalid modulus p={self.p}, m={self.m}")
        if self.p**self.m > MAX_MODULUS:
            raise ValueError(f"modulus p^m = {self.p ** self.m} exceeds 2^30")
        data = np.asarray(self.data, dtype=np.int64)
        if data.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {data.shape}")
        object.__setattr__(self, "data", np.mod(data, self.modulus))
        self.data.setflags(write=False)

    @classmethod
    def from_rows(
        cls, p: int, m: int, rows: Sequence[Sequence[int]], cols: Optional[int] = None
    ) -> ZpmMatrix:
        if not rows:
            return cls(p, m, np.zeros((0, cols or 0), dtype=np.int64))
        return cls(p, m, np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, p: int, m: int, rows: int, cols: int) -> ZpmMatrix:
        return cls(p, m, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, m: int, n: int) -> ZpmMatrix:
        return cls(p, m, np.eye(n, dtype=np.int64))

    @property
    def modulus(self) -> int:
        return self.p**self.m

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def T(self) -> ZpmMatrix:
        return ZpmMatrix(self.p, self.m, self.data.T.copy())

    def _check(self, other: ZpmMatrix) -> None:
        if (self.p, self.m) != (other.p, other.m):
            raise ParameterMismatchError(
                f"moduli differ: {self.p}^{self.m} vs {other.p}^{other.m}"
            )

    def __matmul__(self, other: ZpmMatrix) -> ZpmMatrix:
        self._check(other)
        return ZpmMatrix(self.p, self.m, matmul_mod(self.data, other.data, self.modulus))

    def hstack(self, other: ZpmMatrix) -> ZpmMatrix:
        self._check(other)
        return ZpmMatrix(self.p, self.m, np.hstack([self.data, other.data]))

    def vstack(self, other: ZpmMatrix) -> ZpmMatrix:
        self._check(other)
        return ZpmMatrix(self.p, self.m, np.vstack([self.data, other.data]))

    def is_zero(self) -> bool:
        return not self.data.any()

    def equals(self, other: ZpmMatrix) -> bool:
        return (
            (self.p, self.m) == (other.p, other.m)
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "m": self.m,
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.data.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> ZpmMatrix:
        return cls.from_rows(data["p"], data["m"], data["entries"], data.get("cols"))


def matmul_mod(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """``a @ b mod modulus`` without int64 overflow."""
    inner = a.shape[1] if a.ndim == 2 else 0
    if (modulus - 1) ** 2 * max(inner, 1) < 2**63:
        return np.mod(a @ b, modulus)
    out = np.mod(a.astype(object) @ b.astype(object), modulus)
    return out.astype(np.int64)


def p_valuation(x: int, p: int, m: int) -> int:
    """``v_p`` of a residue in ``Z/p^m``; ``m`` for zero."""
    if x == 0:
        return m
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# ── Howell form ──────────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class HowellForm:
    """``H = U·A`` in Howell form, with the pivot column and exponent per row."""

    H: ZpmMatrix
    U: ZpmMatrix
    pivots: tuple[tuple[int, int], ...]

    def log_size(self) -> int:
        """``log_p`` of the number of elements in the row span."""
        m = self.H.m
        return sum(m - a for _, a in self.pivots)


def howell_form(A: ZpmMatrix) -> HowellForm:
    """Canonical Howell form of the row span of *A*.

    The transform ``U`` has shape ``rows(H) × rows(A)``; ``H`` may have more
    rows than ``A`` because of closure rows.
    """
    p, m, mod = A.p, A.m, A.modulus
    n_rows, n_cols = A.rows, A.cols
    work = [
        np.concatenate([A.data[i], np.eye(n_rows, dtype=np.int64)[i]]) for i in range(n_rows)
    ]
    pivot_rows: list[np.ndarray] = []
    pivots: list[tuple[int, int]] = []
    for j in range(n_cols):
        best: Optional[tuple[int, int]] = None
        for idx, row in enumerate(work):
            v = p_valuation(int(row[j]), p, m)
            if v < m and (best is None or v < best[0]):
                best = (v, idx)
        if best is None:
            continue
        a, idx = best
        row = work.pop(idx)
        unit = int(row[j]) // p**a
        row = np.mod(row * pow(unit, -1, mod), mod)
        for k, other in enumerate(work):
            if other[j]:
                q = int(other[j]) // p**a
                work[k] = np.mod(other - q * row, mod)
        if a > 0:
            work.append(np.mod(row * p ** (m - a), mod))
        pivot_rows.append(row)
        pivots.append((j, a))
        logger.debug("Howell pivot p^%d in column %d", a, j)

    for i, (j, a) in enumerate(pivots):
        step = p**a
        for k in range(i):
            entry = int(pivot_rows[k][j])
            if entry >= step:
                pivot_rows[k] = np.mod(pivot_rows[k] - (entry // step) * pivot_rows[i], mod)

    if pivot_rows:
        stacked = np.vstack(pivot_rows)
    else:
        stacked = np.zeros((0, n_cols + n_rows), dtype=np.int64)
    return HowellForm(
        H=ZpmMatrix(p, m, stacked[:, :n_cols]),
        U=ZpmMatrix(p, m, stacked[:, n_cols:]),
        pivots=tuple(pivots),
    )


def span_contains(form: HowellForm, v: np.ndarray) -> bool:
    """Membership of the row vector *v* in the span of a Howell form."""
    p, m, mod = form.H.p, form.H.m, form.H.modulus
    v = np.mod(np.asarray(v, dtype=np.int64), mod)
    for row, (j, a) in zip(form.H.data, form.pivots):
        entry = int(v[j])
        if entry % p**a:
            return False
        if entry:
            v = np.mod(v - (entry // p**a) * row, mod)
    return not v.any()


def same_span(A: ZpmMatrix, B: ZpmMatrix) -> bool:
    return howell_form(A).H.equals(howell_form(B).H)


# ── Kernels and cohomology ───────────────────────────────────────────────────


def kernel_basis(A: ZpmMatrix) -> ZpmMatrix:
    """Rows generating ``{x : A x = 0}`` (column-vector convention)."""
    n = A.cols
    form = howell_form(A.T.hstack(ZpmMatrix.identity(A.p, A.m, n)))
    b = A.rows
    rows = [form.H.data[i, b:] for i, (j, _) in enumerate(form.pivots) if j >= b]
    if not rows:
        return ZpmMatrix.zeros(A.p, A.m, 0, n)
    return ZpmMatrix(A.p, A.m, np.vstack(rows))


@dataclass(frozen=True)
class ModuleInvariants:
    """``⊕ R/π^{b_i} ⊕ (R/p^m)^free_rank`` over ``R = O_K/p^m``.

    ``orders`` are the exponents ``b_i < m·e`` (nonincreasing) of the
    uniformizer ``π``; ``ramification`` is ``e`` with ``v(π) = 1/e``.
    """

    orders: tuple[int, ...]
    free_rank: int
    m: int
    ramification: int = 1

    def valuations(self) -> tuple[Fraction, ...]:
        """Orders in the ``v(p) = 1`` normalization."""
        return tuple(Fraction(b, self.ramification) for b in self.orders)

    def is_zero(self) -> bool:
        return not self.orders and self.free_rank == 0

    def annihilator_valuation(self) -> Fraction:
        """Least ``v`` with ``p^v`` killing the module (``m`` if free part)."""
        if self.free_rank:
            return Fraction(self.m)
        return max(self.valuations(), default=Fraction(0))

    def to_json(self) -> dict[str, Any]:
        return {
            "orders": [format_fraction(v) for v in self.valuations()],
            "free_rank": self.free_rank,
        }


def _log_size(rows: np.ndarray, p: int, m: int, width: int) -> int:
    if rows.shape[0] == 0:
        return 0
    return howell_form(ZpmMatrix(p, m, rows.reshape(-1, width))).log_size()


def quotient_invariants(
    generators: ZpmMatrix,
    relations: ZpmMatrix,
    action: Optional[np.ndarray] = None,
    ramification: int = 1,
) -> ModuleInvariants:
    """Invariants of ``span(generators) / span(relations)``.

    With ``π`` acting on row vectors by ``x -> x @ action`` (``p`` when no
    action is given), ``#{b_i > j} = log_p|π^j Q| - log_p|π^{j+1} Q|``
    where ``log_p|π^j Q| = log_p|span(π^j G ∪ R)| - log_p|span(R)|``.
    The relations must lie in the span of the generators.
    """
    generators._check(relations)
    p, m, mod = generators.p, generators.m, generators.modulus
    width = generators.cols
    if action is None:
        action = (np.eye(width, dtype=np.int64) * p) % mod
    top = m * ramification
    base = _log_size(relations.data, p, m, width)
    sizes = []
    current = generators.data
    for _ in range(top + 1):
        sizes.append(_log_size(np.vstack([current, relations.data]), p, m, width) - base)
        current = matmul_mod(current, action, mod)
    counts = [sizes[j] - sizes[j + 1] for j in range(top)]
    orders: list[int] = []
    for j in range(top - 1, -1, -1):
        above = counts[j] - (counts[j + 1] if j + 1 < top else 0)
        orders.extend([j + 1] * above)
    free = sum(1 for b in orders if b == top)
    return ModuleInvariants(
        orders=tuple(b for b in orders if b < top),
        free_rank=free,
        m=m,
        ramification=ramification,
    )


def cohomology(d_in: ZpmMatrix, d_out: ZpmMatrix) -> ModuleInvariants:
    """``ker(d_out) / im(d_in)`` for ``C^{q-1} -d_in-> C^q -d_out-> C^{q+1}``.

    Raises
    ------
    NotAComplexError
        If ``d_out ∘ d_in`` is not zero.
    """
    if not (d_out @ d_in).is_zero():
        raise NotAComplexError("d_out ∘ d_in is not zero modulo p^m")
    return quotient_invariants(kernel_basis(d_out), d_in.T)
