"""Exception hierarchy shared by every engine and the CLI.

The CLI maps :class:`InvariantViolation` to exit status 1 and every other
:class:`AlmostPeriodsError` to exit status 2.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Optional


class AlmostPeriodsError(Exception):
    """Base class for all library errors."""


class ParameterMismatchError(AlmostPeriodsError, ValueError):
    """Operands were built from different model parameters or moduli."""


class LevelOverflowError(AlmostPeriodsError, ArithmeticError):
    """A p-th root would need an exponent denominator beyond ``p**L``."""


class PrecisionExhaustedError(AlmostPeriodsError, ArithmeticError):
    """A computation needs digits beyond the precision carried by its inputs.

    ``needed`` is the extra precision that would have sufficed, when the
    algorithm can tell (t-adic for Puiseux work, p-adic length for Witt work).
    """

    def __init__(self, message: str, needed: Optional[Fraction] = None) -> None:
        super().__init__(message)
        self.needed = needed


class NotAComplexError(AlmostPeriodsError, ValueError):
    """A composite of consecutive maps is not zero."""


class NotWellDefinedError(AlmostPeriodsError, ValueError):
    """A module map violates ``v(x_ij) >= max(gamma_t_i - gamma_s_j, 0)``."""


class BudgetExceededError(AlmostPeriodsError, ValueError):
    """A requested table is larger than the configured cell budget."""


class InvariantViolation(AlmostPeriodsError, AssertionError):
    """A property check failed.

    Carries the invariant name and a JSON-serialisable reproducing input.
    """

    def __init__(self, invariant: str, detail: str, witness: Any = None) -> None:
        super().__init__(f"{invariant}: {detail}")
        self.invariant = invariant
        self.detail = detail
        self.witness = witness
