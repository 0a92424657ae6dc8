"""Suites for the Koszul tables and the finite-difference lemma."""

from __future__ import annotations

import logging

import numpy as np

from almostperiods.config import CheckConfig
from almostperiods.koszul import finite_difference_cohomology, frobenius_twist_check, full_table
from almostperiods.suites.base import PropertySuite, SuiteResult, register_suite, require

logger = logging.getLogger(__name__)


@register_suite("koszul")
class KoszulSuite(PropertySuite):
    """Integral ranks, annihilation and the closed form on every configured table."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult(self.name)
        for n, L, m, p in config.koszul.cases:
            case = {"n": n, "L": L, "m": m, "p": p}

            def trial() -> None:
                table = full_table(n, L, m, p)
                summary = table.summary
                require(
                    summary["integral_ranks_ok"],
                    "integral_line_binomial_ranks",
                    f"ranks {summary['integral_ranks']}",
                    case,
                )
                require(
                    summary["annihilation_ok"],
                    "line_annihilated_by_zeta_minus_one",
                    f"not annihilated: {summary['not_annihilated']}",
                    case,
                )
                require(
                    summary["closed_form_ok"],
                    "closed_form_matches",
                    f"mismatches: {summary['closed_form_mismatches']}",
                    case,
                )
                require(
                    summary["survivors_ok"],
                    "finitely_many_survivors",
                    f"survivors {summary['survivors_by_eps']}, "
                    f"mismatches {summary['survivor_mismatches']}",
                    case,
                )
                result.stats[f"{n},{L},{m},{p}"] = len(table.records)

            result.attempt(trial)

            if n == 1:

                def twist() -> None:
                    report = frobenius_twist_check(n, L, m, p)
                    require(
                        report["passed"],
                        "frobenius_twist_divides_valuation",
                        f"{len(report['failures'])} lines",
                        {**case, "failures": report["failures"]},
                    )

                result.attempt(twist)
        return result


@register_suite("finite_difference")
class FiniteDifferenceSuite(PropertySuite):
    """``Δ P = P(V+1) - P(V)`` has constant kernel and is onto lower degrees."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult(self.name)
        for bound in config.finite_difference.deg_bounds:

            def trial() -> None:
                report = finite_difference_cohomology(bound)
                require(
                    report.kernel_is_constants,
                    "difference_kernel_constants",
                    f"kernel is not the constants at degree bound {bound}",
                    {"deg_bound": bound},
                )
                require(
                    report.surjective_below_bound,
                    "difference_surjective",
                    f"a monomial below degree {bound} has no preimage",
                    {"deg_bound": bound},
                )

            result.attempt(trial)
        return result
