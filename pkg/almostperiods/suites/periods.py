"""Suites for ``ξ``, division by ``ξ`` and ``t = log[ε]``."""

from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from almostperiods.config import CheckConfig, ModelParams
from almostperiods.periods import (
    BdRElem,
    Truth,
    bdr_eq,
    divide_by_xi,
    epsilon_root_minus_one,
    filtration_level,
    log_epsilon,
    xi_element,
)
from almostperiods.puiseux import PuiseuxElem
from almostperiods.sampling import random_witt
from almostperiods.suites.base import PropertySuite, SuiteResult, register_suite, require
from almostperiods.witt import teichmuller, witt_eq, witt_mul, witt_one

logger = logging.getLogger(__name__)


@register_suite("xi")
class XiSuite(PropertySuite):
    """``ξ`` is divisible by itself, multiples are recovered, ``[t]`` is not a multiple.

    Every check runs at each configured precision.
    """

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.xi
        result = SuiteResult(self.name)
        stable: dict[str, int] = {}
        for precision in cfg.precisions:
            for p in cfg.primes:
                params = ModelParams(
                    p=p, s=1, L=cfg.level, N=precision, m=cfg.witt_length, d=1
                )

                def fixed() -> None:
                    witness = {"p": p, "N": precision}
                    xi = xi_element(params)
                    own = divide_by_xi(xi, xi)
                    require(
                        own.success and witt_eq(own.quotient, witt_one(params)),
                        "xi_in_theta_kernel",
                        f"ξ / ξ = {own.quotient}",
                        witness,
                    )
                    if params.m * (p - 1) <= p:
                        return
                    t = teichmuller(PuiseuxElem.monomial(params, 1))
                    require(
                        not divide_by_xi(t, xi).success,
                        "teichmuller_t_not_divisible",
                        "[t] was divisible by ξ",
                        witness,
                    )

                result.attempt(fixed)

            for _ in range(cfg.trials):
                p = int(cfg.primes[int(rng.integers(0, len(cfg.primes)))])
                params = ModelParams(
                    p=p, s=1, L=cfg.level, N=precision, m=cfg.witt_length, d=1
                )
                y = random_witt(rng, params, level=1)
                # ξ·w != 0 for nonzero w, mostly with a non-unit leading digit.
                lead = "unit" if rng.random() < 0.25 else "nonunit"
                nonzero = random_witt(rng, params, level=1, digit_zero=lead)

                def trial() -> None:
                    witness = {"p": p, "N": precision, "y": y.to_json()}
                    xi = xi_element(params)
                    recovered = divide_by_xi(witt_mul(y, xi), xi)
                    require(recovered.success, "xi_multiple_divisible", "division failed", witness)
                    require(
                        witt_eq(recovered.quotient, y),
                        "xi_division_recovers",
                        f"recovered {recovered.quotient}",
                        witness,
                    )
                    product = witt_mul(nonzero, xi)
                    require(
                        not product.is_zero(),
                        "xi_non_zero_divisor",
                        "a nonzero element times ξ vanished",
                        {"p": p, "N": precision, "lead": lead, "y": nonzero.to_json()},
                    )
                    key = f"{p}"
                    stable[key] = stable.get(key, 0) + 1

                result.attempt(trial)
        result.stats["passed_trials_by_prime"] = dict(sorted(stable.items()))
        return result


@register_suite("tdr")
class TdRSuite(PropertySuite):
    """``log[ε] / ξ = [ε^{1/p}] - 1`` and ``log[ε]`` generates ``Fil^1 / Fil^2``."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.tdr
        result = SuiteResult(self.name)
        for p in cfg.primes:
            params = ModelParams(
                p=p, s=1, L=cfg.level, N=cfg.precision, m=cfg.witt_length, d=2
            )

            def trial() -> None:
                witness = {"p": p, "m": cfg.witt_length, "N": cfg.precision}
                t = log_epsilon(params, 2)
                division = divide_by_xi(t.num)
                require(division.success, "log_epsilon_in_fil1", "log[ε] is not divisible by ξ", witness)
                expected = epsilon_root_minus_one(params)
                require(
                    witt_eq(division.quotient, expected),
                    "log_epsilon_quotient",
                    f"quotient {division.quotient} differs from [ε^(1/p)] - 1",
                    witness,
                )
                lead = division.quotient.digits[0]
                require(
                    not lead.is_zero() and lead.valuation() == Fraction(1, p),
                    "log_epsilon_generator",
                    f"leading digit {lead}",
                    witness,
                )
                require(
                    filtration_level(t) == 1,
                    "log_epsilon_filtration",
                    f"filtration level {filtration_level(t)}",
                    witness,
                )
                require(
                    bdr_eq(t, BdRElem.from_witt(division.quotient, 2)) is Truth.FALSE,
                    "bdr_eq_detects_difference",
                    "log[ε] and [ε^(1/p)] - 1 compared equal modulo Fil^2",
                    witness,
                )

            result.attempt(trial)
        return result
