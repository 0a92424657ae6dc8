"""Model parameters and property-suite configuration.

``ModelParams`` fixes the arithmetic model shared by every value in a
computation; ``CheckConfig`` is the single source of truth for a
``check`` run and is loaded from a YAML file in ``configs/``.  Both are
strict Pydantic models: unknown keys and wrong types fail at load time.
"""

from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from almostperiods.rational import format_fraction, is_prime, parse_fraction

DEFAULT_MAX_CELLS = 4096

MAX_CELLS_ENV = "ALMOSTPERIODS_MAX_CELLS"

DEFAULT_CHECK_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "check_default.yaml"


# ── Model parameters ─────────────────────────────────────────────────────────


class ModelParams(BaseModel):
    """Parameters of the truncated perfectoid model.

    Parameters
    ----------
    p : int
        The residue characteristic.
    s : int
        Degree of the residue field ``F_{p^s}`` over ``F_p``.
    L : int
        Root level: every exponent has denominator dividing ``p**L``.
    N : Fraction
        t-adic working precision given to parsed and sampled elements.
    m : int
        Witt length, i.e. the p-adic precision of period-ring elements.
    d : int
        Filtration degree of ``B_dR+ / Fil^d``.
    """

    model_config = ConfigDict(
        strict=True, extra="forbid", frozen=True, arbitrary_types_allowed=True
    )

    p: int
    s: int = Field(ge=1, le=4)
    L: int = Field(ge=1)
    N: Fraction
    m: int = Field(ge=1, le=4)
    d: int = Field(ge=1)

    @field_validator("N", mode="before")
    @classmethod
    def _parse_precision(cls, v: Any) -> Fraction:
        return parse_fraction(v)

    @field_validator("p")
    @classmethod
    def _p_is_prime(cls, v: int) -> int:
        if not is_prime(v):
            raise ValueError(f"p must be prime, got {v}")
        return v

    @model_validator(mode="after")
    def _consistent(self) -> ModelParams:
        if self.N <= 0:
            raise ValueError(f"N must be positive, got {self.N}")
        if (self.p**self.L) % self.N.denominator != 0:
            raise ValueError(
                f"denominator of N={self.N} does not divide p^L={self.p ** self.L}"
            )
        if self.d > self.p:
            raise ValueError(f"d={self.d} exceeds p={self.p}")
        return self

    # ── Derived quantities ───────────────────────────────────────────────

    @property
    def scale(self) -> int:
        """``p**L``: exponents are stored as integers in units of ``1/p**L``."""
        return self.p**self.L

    def with_(self, **changes: Any) -> ModelParams:
        """Return a copy with some fields replaced (validated again)."""
        data = self.model_dump()
        data.update(changes)
        return ModelParams(**data)

    def to_json(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "s": self.s,
            "L": self.L,
            "N": format_fraction(self.N),
            "m": self.m,
            "d": self.d,
        }


# ── Budget ───────────────────────────────────────────────────────────────────


def max_cells() -> int:
    """Cell budget for cohomology tables, from ``ALMOSTPERIODS_MAX_CELLS``.

    Raises ``ValueError`` if the variable is set but not a positive integer.
    """
    raw = os.environ.get(MAX_CELLS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_CELLS
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_CELLS_ENV} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{MAX_CELLS_ENV} must be positive, got {value}")
    return value


# ── Property-suite configuration ─────────────────────────────────────────────


class _Suite(BaseModel):
    model_config = ConfigDict(strict=True, extra="forbid")


class SNFSuiteConfig(_Suite):
    trials: int = Field(gt=0)
    max_size: int = Field(ge=1, le=6)
    primes: list[int]
    level: int = Field(ge=1)
    precision: str


class ExactSequenceSuiteConfig(_Suite):
    trials: int = Field(gt=0)
    max_summands: int = Field(ge=1)
    primes: list[int]
    precision: str


class MetricSuiteConfig(_Suite):
    trials: int = Field(gt=0)
    primes: list[int]
    eps_grid: list[str] = Field(
        description="Tolerances; the token '1/p' is resolved per prime."
    )


class ShiftSuiteConfig(_Suite):
    sequences: int = Field(gt=0)
    max_length: int = Field(ge=1)


class TowerSuiteConfig(_Suite):
    max_r: int = Field(ge=1)
    primes: list[int]


class XiSuiteConfig(_Suite):
    trials: int = Field(gt=0)
    witt_length: int = Field(ge=1, le=4)
    primes: list[int]
    precisions: list[str] = Field(min_length=2)
    level: int = Field(ge=1)


class TdRSuiteConfig(_Suite):
    primes: list[int]
    witt_length: int = Field(ge=1, le=4)
    precision: str
    level: int = Field(ge=1)


class KoszulSuiteConfig(_Suite):
    cases: list[list[int]] = Field(description="(n, L, m, p) quadruples.")

    @field_validator("cases")
    @classmethod
    def _quadruples(cls, v: list[list[int]]) -> list[list[int]]:
        for case in v:
            if len(case) != 4:
                raise ValueError(f"Koszul case must be (n, L, m, p), got {case}")
        return v


class FiniteDifferenceSuiteConfig(_Suite):
    deg_bounds: list[int]


class ArtinSchreierSuiteConfig(_Suite):
    trials: int = Field(gt=0)
    primes: list[int]
    precision: str
    level: int = Field(ge=1)


class CheckConfig(BaseModel):
    """Trial counts and parameter grids for a ``check`` run.

    Every suite section is required; there are no silent defaults.
    """

    model_config = ConfigDict(strict=True, extra="forbid")

    snf: SNFSuiteConfig
    exact_sequences: ExactSequenceSuiteConfig
    metric: MetricSuiteConfig
    shift: ShiftSuiteConfig
    tower: TowerSuiteConfig
    xi: XiSuiteConfig
    tdr: TdRSuiteConfig
    koszul: KoszulSuiteConfig
    finite_difference: FiniteDifferenceSuiteConfig
    artin_schreier: ArtinSchreierSuiteConfig

    # ── Factory ──────────────────────────────────────────────────────

    @classmethod
    def from_yaml(cls, path: Path | str = DEFAULT_CHECK_CONFIG) -> CheckConfig:
        """Load and validate a check config from a YAML file.

        Raises
        ------
        pydantic.ValidationError
            If any field is missing, extra, or has the wrong type.
        FileNotFoundError
            If *path* does not exist.
        """
        path = Path(path)
        with path.open() as fh:
            raw: dict[str, Any] = yaml.safe_load(fh)
        return cls(**raw)
