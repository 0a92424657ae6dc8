"""Suites for the valuation-ring algebra: SNF, exact sequences, metric, towers."""

from __future__ import annotations

import logging
from fractions import Fraction

import numpy as np

from almostperiods.config import CheckConfig, ModelParams
from almostperiods.eldiv import EldivSeq, length, rank_profile, shift_eps
from almostperiods.modules import (
    approx_eq,
    exact_sequence_check,
    search_diagonal_witness,
    verify_witness,
    witness_maps,
)
from almostperiods.puiseux import artin_schreier_solve, artin_schreier_solve_vector
from almostperiods.rational import format_fraction, parse_fraction
from almostperiods.sampling import (
    block_triangular_sequence,
    random_eldiv,
    random_element,
    random_exponent,
    random_matrix,
    random_module,
    random_unimodular,
)
from almostperiods.snf import det_valuation, smith_normal_form
from almostperiods.suites.base import PropertySuite, SuiteResult, register_suite, require
from almostperiods.tower import PERTURBATIONS, frobenius_tower_check

logger = logging.getLogger(__name__)

METRIC_LEVEL = 2
METRIC_PRECISION = 8
SEQUENCE_LEVEL = 1


def _pick(rng: np.random.Generator, values: list[int]) -> int:
    return int(values[int(rng.integers(0, len(values)))])


def resolve_eps(token: str, p: int) -> Fraction:
    """Read an ε-grid entry; ``"1/p"`` is resolved for the given prime."""
    if token.strip() == "1/p":
        return Fraction(1, p)
    return parse_fraction(token)


# ── Smith normal form ────────────────────────────────────────────────────────


@register_suite("snf")
class SNFSuite(PropertySuite):
    """``λ(coker A) = v(det A)`` and divisors invariant under unimodular mixing."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.snf
        result = SuiteResult(self.name)
        for _ in range(cfg.trials):
            p = _pick(rng, cfg.primes)
            params = ModelParams(p=p, s=1, L=cfg.level, N=cfg.precision, m=1, d=1)
            n = int(rng.integers(1, cfg.max_size + 1))
            A = random_matrix(rng, params, n, n, cfg.level)
            U = random_unimodular(rng, params, n, cfg.level)
            V = random_unimodular(rng, params, n, cfg.level)

            def trial() -> None:
                snf = smith_normal_form(A)
                witness = {"p": p, "A": A.to_json()}
                require(
                    (snf.U @ A @ snf.V).equals(snf.diagonal_matrix()),
                    "snf_transform",
                    "U·A·V differs from the reported diagonal",
                    witness,
                )
                if snf.infinite:
                    result.stats["singular"] = result.stats.get("singular", 0) + 1
                    return
                v_det = det_valuation(A)
                require(
                    length(snf.divisors) == v_det,
                    "length_equals_det_valuation",
                    f"λ = {length(snf.divisors)} but v(det) = {v_det}",
                    witness,
                )
                mixed = smith_normal_form(U @ A @ V)
                require(
                    mixed.diagonal_report == snf.diagonal_report,
                    "divisors_unimodular_invariant",
                    f"{mixed.diagonal_report} vs {snf.diagonal_report}",
                    witness,
                )
                for x in sorted(set(snf.exponents)):
                    require(
                        rank_profile(mixed.divisors, x) == rank_profile(snf.divisors, x),
                        "rank_profile_invariant",
                        f"rank profile differs at {x}",
                        witness,
                    )

            result.attempt(trial)
        return result


# ── Exact sequences ──────────────────────────────────────────────────────────


@register_suite("exact_sequences")
class ExactSequenceSuite(PropertySuite):
    """λ additivity and the majorization bound on block-triangular extensions."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.exact_sequences
        result = SuiteResult(self.name)
        for _ in range(cfg.trials):
            p = _pick(rng, cfg.primes)
            params = ModelParams(p=p, s=1, L=SEQUENCE_LEVEL, N=cfg.precision, m=1, d=1)
            f, g = block_triangular_sequence(rng, params, cfg.max_summands)

            def trial() -> None:
                report = exact_sequence_check(f, g)
                witness = {"p": p, "f": f.to_json(), "g": g.to_json()}
                require(report.exact, "exactness", "; ".join(report.notes), witness)
                require(
                    report.lambda_lhs == report.lambda_rhs,
                    "length_additivity",
                    f"λ(M) = {report.lambda_lhs}, λ(M') + λ(M'') = {report.lambda_rhs}",
                    witness,
                )
                require(
                    report.majorization,
                    "majorization_bound",
                    "γ_M is not majorized by γ_M' + γ_M''",
                    witness,
                )

            result.attempt(trial)
        return result


# ── Metric criterion ─────────────────────────────────────────────────────────


@register_suite("metric")
class MetricSuite(PropertySuite):
    """``M ≈_ε N`` by the sup-metric agrees with the existence of witnesses."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.metric
        result = SuiteResult(self.name)
        agreements = 0
        for _ in range(cfg.trials):
            p = _pick(rng, cfg.primes)
            params = ModelParams(p=p, s=1, L=METRIC_LEVEL, N=METRIC_PRECISION, m=1, d=1)
            M = random_module(rng, params, 3)
            N = random_module(rng, params, 3)

            def trial() -> None:
                witness = {"p": p, "M": M.to_json(), "N": N.to_json()}
                for token in cfg.eps_grid:
                    eps = resolve_eps(token, p)
                    close = approx_eq(M, N, eps)
                    found = search_diagonal_witness(M, N, eps)
                    require(
                        close == (found is not None),
                        "metric_criterion",
                        f"ε={format_fraction(eps)}: metric says {close}, "
                        f"witness search says {found is not None}",
                        witness,
                    )
                    if found is not None:
                        require(
                            verify_witness(*found, eps),
                            "witness_composites",
                            f"searched witness fails at ε={format_fraction(eps)}",
                            witness,
                        )
                        built = witness_maps(M, N, eps)
                        require(
                            built is not None and verify_witness(*built, eps),
                            "witness_construction",
                            f"constructed witness fails at ε={format_fraction(eps)}",
                            witness,
                        )

            before = len(result.failures)
            result.attempt(trial)
            agreements += len(result.failures) == before
        result.stats["agreements"] = agreements
        return result


# ── π^ε-shift ────────────────────────────────────────────────────────────────


@register_suite("shift")
class ShiftSuite(PropertySuite):
    """``shift_eps`` against the entrywise formula ``max(γ_i - ε, 0)``."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.shift
        result = SuiteResult(self.name)
        for _ in range(cfg.sequences):
            g = random_eldiv(rng, cfg.max_length)
            eps = Fraction(int(rng.integers(1, 25)), int(rng.integers(1, 7)))

            def trial() -> None:
                expected = [max(v - eps, Fraction(0)) for v in g.entries]
                shifted = shift_eps(g, eps)
                require(
                    shifted == EldivSeq.of(expected),
                    "shift_formula",
                    f"shift of {g} by {eps} gave {shifted}",
                    {"gamma": g.to_json(), "eps": format_fraction(eps)},
                )
                require(
                    length(shifted) == sum(expected, Fraction(0)),
                    "shift_length",
                    f"λ of the shift of {g} by {eps}",
                    {"gamma": g.to_json(), "eps": format_fraction(eps)},
                )

            result.attempt(trial)
        return result


# ── Frobenius towers ─────────────────────────────────────────────────────────


@register_suite("tower")
class TowerSuite(PropertySuite):
    """Canonical towers pass; each scripted perturbation is detected."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.tower
        result = SuiteResult(self.name)
        for p in cfg.primes:
            kmax = p * p
            params = ModelParams(p=p, s=1, L=1, N=p * (kmax + 1), m=1, d=1)
            for r in range(1, cfg.max_r + 1):

                def canonical() -> None:
                    report = frobenius_tower_check(params, r, kmax)
                    require(
                        report.passed,
                        "tower_canonical",
                        f"{len(report.failures)} checks failed",
                        {"p": p, "r": r, "kmax": kmax,
                         "failures": [c.to_json() for c in report.failures]},
                    )

                result.attempt(canonical)

            small = ModelParams(p=p, s=1, L=1, N=3 * p, m=1, d=1)
            for perturbation in PERTURBATIONS:

                def perturbed() -> None:
                    report = frobenius_tower_check(small, 1, 2, perturbation)
                    require(
                        not report.passed,
                        "tower_perturbation_detected",
                        f"perturbation {perturbation!r} passed every check",
                        {"p": p, "perturbation": perturbation},
                    )

                result.attempt(perturbed)
        return result


# ── Artin–Schreier ───────────────────────────────────────────────────────────


@register_suite("artin_schreier")
class ArtinSchreierSuite(PropertySuite):
    """``x^p - x = a`` is solved exactly for ``0 < v(a) <= 2``."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        cfg = config.artin_schreier
        result = SuiteResult(self.name)
        for _ in range(cfg.trials):
            p = _pick(rng, cfg.primes)
            params = ModelParams(p=p, s=1, L=cfg.level, N=cfg.precision, m=1, d=1)
            v = random_exponent(rng, Fraction(2), cfg.level, p, Fraction(0), strict_min=True)
            a = random_element(rng, params, 3, params.N - 1, cfg.level, v)
            a = a + random_element(rng, params, 1, v, cfg.level, v)

            def trial() -> None:
                x = artin_schreier_solve(a)
                residual = x**p - x - a
                require(
                    residual.is_zero(),
                    "artin_schreier_residual",
                    f"x^p - x - a = {residual}",
                    {"p": p, "a": str(a)},
                )
                require(
                    residual.prec >= a.prec,
                    "artin_schreier_precision",
                    f"residual known only to {residual.prec} < {a.prec}",
                    {"p": p, "a": str(a)},
                )
                (y,) = artin_schreier_solve_vector([a])
                require(y == x, "artin_schreier_vector", "vector solve differs", {"a": str(a)})

            result.attempt(trial)
        return result
