"""Property-suite interface and the suite registry."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from almostperiods.config import CheckConfig
from almostperiods.errors import InvariantViolation, PrecisionExhaustedError

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    """Outcome of one suite: counts, failures with reproducing inputs, notes."""

    name: str
    trials: int = 0
    skipped: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, exc: InvariantViolation) -> None:
        self.failures.append(
            {"invariant": exc.invariant, "detail": exc.detail, "witness": exc.witness}
        )

    def attempt(self, trial: Callable[[], None]) -> None:
        """Run one trial, recording violations and counting precision skips."""
        self.trials += 1
        try:
            trial()
        except InvariantViolation as exc:
            logger.warning("%s: %s", self.name, exc)
            self.record(exc)
        except PrecisionExhaustedError as exc:
            logger.debug("%s: trial skipped, %s", self.name, exc)
            self.skipped += 1

    def to_json(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "trials": self.trials,
            "skipped": self.skipped,
            "failures": self.failures,
            "stats": self.stats,
        }


def require(condition: bool, invariant: str, detail: str, witness: Any = None) -> None:
    """Raise :class:`InvariantViolation` unless *condition* holds."""
    if not condition:
        raise InvariantViolation(invariant, detail, witness)


class PropertySuite(ABC):
    """Base class for every property suite.

    Subclasses override :meth:`run`; the ``check`` command interacts with
    suites only through this interface.
    """

    name: str = ""

    @abstractmethod
    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        """Run the suite with its section of *config* and a private stream.

        Parameters
        ----------
        config : CheckConfig
            The full check configuration.
        rng : np.random.Generator
            The suite's own generator, spawned from the run seed.
        """


# ── Suite registry ───────────────────────────────────────────────────────────

_SUITES: dict[str, type[PropertySuite]] = {}


def register_suite(name: str):
    """Class decorator that registers a suite under *name*."""

    def _decorator(cls: type[PropertySuite]) -> type[PropertySuite]:
        cls.name = name
        _SUITES[name] = cls
        return cls

    return _decorator


def get_suite(name: str) -> PropertySuite:
    """Instantiate and return the suite registered under *name*.

    Raises ``KeyError`` if *name* is not registered.
    """
    if name not in _SUITES:
        available = ", ".join(suite_names()) or "(none)"
        raise KeyError(f"Unknown suite '{name}'. Available: {available}")
    return _SUITES[name]()


def suite_names() -> list[str]:
    """Registered suite names in their fixed run order."""
    return sorted(_SUITES)
