"""Exact arithmetic for almost modules, period rings and Koszul cohomology."""

from almostperiods.config import CheckConfig, ModelParams
from almostperiods.eldiv import EldivSeq
from almostperiods.errors import (
    AlmostPeriodsError,
    BudgetExceededError,
    InvariantViolation,
    LevelOverflowError,
    NotAComplexError,
    NotWellDefinedError,
    ParameterMismatchError,
    PrecisionExhaustedError,
)
from almostperiods.koszul import full_table, line_cohomology
from almostperiods.modules import FPTorsionModule, ModuleMap
from almostperiods.periods import BdRElem, Truth, divide_by_xi, xi_element
from almostperiods.puiseux import PuiseuxElem
from almostperiods.snf import MatrixOverO, smith_normal_form
from almostperiods.witt import WittElem, teichmuller
from almostperiods.zpm import ZpmMatrix, howell_form

__all__ = [
    "AlmostPeriodsError",
    "BdRElem",
    "BudgetExceededError",
    "CheckConfig",
    "EldivSeq",
    "FPTorsionModule",
    "InvariantViolation",
    "LevelOverflowError",
    "MatrixOverO",
    "ModelParams",
    "ModuleMap",
    "NotAComplexError",
    "NotWellDefinedError",
    "ParameterMismatchError",
    "PrecisionExhaustedError",
    "PuiseuxElem",
    "Truth",
    "WittElem",
    "ZpmMatrix",
    "divide_by_xi",
    "full_table",
    "howell_form",
    "line_cohomology",
    "smith_normal_form",
    "teichmuller",
    "xi_element",
]
