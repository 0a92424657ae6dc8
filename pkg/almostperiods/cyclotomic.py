"""The coefficient rings ``Z[ζ_{p^ℓ}] / p^m`` in the power basis.

Elements are integer vectors of length ``φ(p^ℓ)`` reduced modulo ``p^m``
and modulo the cyclotomic polynomial ``Φ_{p^ℓ}``.  Module computations are
flattened to ``Z/p^m`` through multiplication matrices.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from almostperiods.rational import p_adic_valuation
from almostperiods.zpm import matmul_mod

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def cyclotomic_coefficients(p: int, level: int) -> tuple[int, ...]:
    """Coefficients of ``Φ_{p^level}``, lowest degree first (monic)."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(p**level, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def zeta_minus_one_valuation(p: int, level: int) -> Fraction:
    """``v_p(ζ_{p^ℓ} - 1)`` from the norm: ``N(ζ - 1) = ±Φ_{p^ℓ}(1) = ±p``.

    The extension is totally ramified of degree ``φ(p^ℓ)``, so the
    valuation is ``v_p(Φ(1)) / deg Φ``.  Level 0 (``ζ = 1``) has no finite
    valuation and raises ``ValueError``.
    """
    if level < 1:
        raise ValueError("ζ_1 - 1 = 0 has infinite valuation")
    coeffs = cyclotomic_coefficients(p, level)
    return Fraction(p_adic_valuation(sum(coeffs), p), len(coeffs) - 1)


@dataclass(frozen=True)
class CyclotomicRing:
    """``Z[ζ_{p^ℓ}] / p^m`` with ``ζ = x`` modulo ``Φ_{p^ℓ}(x)``."""

    p: int
    level: int
    m: int

    @property
    def modulus(self) -> int:
        return self.p**self.m

    @property
    def degree(self) -> int:
        """``φ(p^ℓ)``; 1 for level 0 (the ring is ``Z/p^m``)."""
        return len(self._phi) - 1

    @property
    def ramification(self) -> int:
        return self.degree

    @property
    def _phi(self) -> tuple[int, ...]:
        if self.level == 0:
            return (-1, 1)
        return cyclotomic_coefficients(self.p, self.level)

    def reduce(self, coeffs: np.ndarray) -> np.ndarray:
        """Reduce a coefficient vector of any length modulo ``Φ`` and ``p^m``."""
        phi = self._phi
        deg = self.degree
        c = [int(v) for v in coeffs]
        for k in range(len(c) - 1, deg - 1, -1):
            top = c[k]
            if top:
                for i in range(deg):
                    c[k - deg + i] -= top * phi[i]
                c[k] = 0
        out = np.zeros(deg, dtype=np.int64)
        for i in range(min(deg, len(c))):
            out[i] = c[i] % self.modulus
        return out

    def zero(self) -> np.ndarray:
        return np.zeros(self.degree, dtype=np.int64)

    def one(self) -> np.ndarray:
        out = self.zero()
        out[0] = 1
        return out

    def zeta_power(self, k: int) -> np.ndarray:
        """``ζ^k`` (``k`` taken modulo ``p^ℓ``)."""
        order = self.p**self.level
        vec = np.zeros(order, dtype=np.int64)
        vec[k % order] = 1
        return self.reduce(vec)

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a + b, self.modulus)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.mod(a - b, self.modulus)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a.tolist()):
            if x:
                for j, y in enumerate(b.tolist()):
                    prod[i + j] += x * y
        return self.reduce(np.array(prod, dtype=object))

    def multiplication_matrix(self, c: np.ndarray) -> np.ndarray:
        """Matrix of ``v -> c·v`` acting on column coordinate vectors."""
        deg = self.degree
        cols = []
        for k in range(deg):
            basis = np.zeros(deg, dtype=np.int64)
            basis[k] = 1
            cols.append(self.mul(c, basis))
        return np.stack(cols, axis=1) if cols else np.zeros((0, 0), dtype=np.int64)

    def uniformizer(self) -> np.ndarray:
        """``ζ - 1`` (``p`` at level 0)."""
        if self.level == 0:
            out = self.zero()
            out[0] = self.p % self.modulus
            return out
        return self.sub(self.zeta_power(1), self.one())

    def is_zero(self, a: np.ndarray) -> bool:
        return not np.mod(a, self.modulus).any()

    def power(self, a: np.ndarray, e: int) -> np.ndarray:
        out = self.one()
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def apply(self, matrix: np.ndarray, v: np.ndarray) -> np.ndarray:
        return matmul_mod(matrix, v.reshape(-1, 1), self.modulus).reshape(-1)
