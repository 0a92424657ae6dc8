"""The residue field ``F_{p^s}`` of the perfectoid model.

Elements are encoded as integers ``0 <= c < p**s`` whose base-p digits are
the coefficients (lowest first) of a polynomial in the generator ``g``,
reduced modulo a fixed Conway polynomial.  For ``s = 1`` this is plain
arithmetic modulo ``p``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

# Conway polynomials, coefficients lowest degree first, leading 1 omitted.
CONWAY: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1,),
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (3, 1): (1,),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 0, 0, 2),
    (5, 1): (3,),
    (5, 2): (2, 4),
    (5, 3): (3, 3, 0),
    (5, 4): (2, 4, 4, 0),
    (7, 1): (4,),
    (7, 2): (3, 6),
    (7, 3): (4, 0, 6),
    (7, 4): (3, 4, 5, 0),
}


@dataclass(frozen=True)
class ResidueField:
    """Arithmetic in ``F_{p^s}`` on the integer encoding."""

    p: int
    s: int

    def __post_init__(self) -> None:
        if (self.p, self.s) not in CONWAY:
            raise ValueError(
                f"no Conway polynomial shipped for p={self.p}, s={self.s}; "
                f"available: {sorted(CONWAY)}"
            )

    @property
    def order(self) -> int:
        return self.p**self.s

    @property
    def modulus(self) -> tuple[int, ...]:
        return CONWAY[(self.p, self.s)]

    # ── Encoding ─────────────────────────────────────────────────────────

    def _digits(self, c: int) -> list[int]:
        out = []
        for _ in range(self.s):
            c, r = divmod(c, self.p)
            out.append(r)
        return out

    def _encode(self, digits: list[int]) -> int:
        c = 0
        for r in reversed(digits):
            c = c * self.p + r % self.p
        return c

    def element(self, value: int) -> int:
        """Validate an encoded element; plain integers are read mod ``p``."""
        if self.s == 1:
            return value % self.p
        if not 0 <= value < self.order:
            raise ValueError(f"{value} is not an element of F_{self.p}^{self.s}")
        return value

    # ── Field operations ─────────────────────────────────────────────────

    def add(self, a: int, b: int) -> int:
        if self.s == 1:
            return (a + b) % self.p
        return self._encode([x + y for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a: int) -> int:
        if self.s == 1:
            return (-a) % self.p
        return self._encode([-x for x in self._digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.s == 1:
            return (a * b) % self.p
        return _ext_mul(self.p, self.s, a, b)

    def scalar(self, k: int, a: int) -> int:
        """Multiply by the image of the integer *k* in the prime field."""
        k %= self.p
        if self.s == 1:
            return (k * a) % self.p
        return self._encode([k * x for x in self._digits(a)])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in the residue field")
        if self.s == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.order - 2)

    def frobenius(self, a: int) -> int:
        """``c -> c**p``."""
        if self.s == 1:
            return a
        return self.pow(a, self.p)

    def frobenius_inverse(self, a: int) -> int:
        """``c -> c**(p**(s-1))``, the inverse of :meth:`frobenius`."""
        if self.s == 1:
            return a
        return self.pow(a, self.p ** (self.s - 1))


@functools.lru_cache(maxsize=1 << 16)
def _ext_mul(p: int, s: int, a: int, b: int) -> int:
    field = ResidueField(p, s)
    x, y = field._digits(a), field._digits(b)
    prod = [0] * (2 * s - 1)
    for i, xi in enumerate(x):
        if xi:
            for j, yj in enumerate(y):
                prod[i + j] += xi * yj
    # g^s = -(c_0 + c_1 g + ... + c_{s-1} g^{s-1})
    low = CONWAY[(p, s)]
    for k in range(2 * s - 2, s - 1, -1):
        top = prod[k] % p
        if top:
            for i, c in enumerate(low):
                prod[k - s + i] -= top * c
        prod[k] = 0
    return field._encode(prod[:s])


@functools.lru_cache(maxsize=None)
def residue_field(p: int, s: int) -> ResidueField:
    return ResidueField(p, s)
