"""Verifier for Frobenius towers of torsion modules.

The canonical tower is ``M_k = (O/t^k)^r`` with ``p_k: M_{k+1} -> M_k`` the
reduction, ``q_k: M_k -> M_{k+1}`` multiplication by ``t`` and the Frobenius
twist ``φ`` acting coordinate-wise.  The checker verifies the hypotheses of
the tower lemma and its conclusion:

* ``p_k ∘ q_k`` is multiplication by ``t`` on ``M_k``;
* ``0 -> M_1 -t^k-> M_{k+1} -p_k-> M_k -> 0`` is exact;
* the twist of ``M_k`` is ``M_{pk}``, the twist of ``q_k`` is the composite
  of ``p`` consecutive ``q``'s, and the twist of ``p_k`` the composite of
  ``p`` consecutive reductions;
* ``γ_{M_k} = k·γ_{M_1}``.

A perturbation replaces one ingredient by a wrong one so that callers can
confirm the corresponding check fails.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Literal, Optional

from almostperiods.config import ModelParams
from almostperiods.eldiv import EldivSeq
from almostperiods.errors import NotWellDefinedError, PrecisionExhaustedError
from almostperiods.modules import (
    FPTorsionModule,
    ModuleMap,
    compose,
    exact_sequence_check,
    map_cokernel,
    map_image_divisors,
    maps_equal,
    scalar_map,
)
from almostperiods.snf import MatrixOverO

logger = logging.getLogger(__name__)

Perturbation = Literal["q", "middle", "phi"]
PERTURBATIONS: tuple[str, ...] = ("q", "middle", "phi")


@dataclass
class TowerCheck:
    name: str
    k: int
    passed: bool
    detail: str = ""

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "k": self.k, "passed": self.passed, "detail": self.detail}


@dataclass
class TowerReport:
    r: int
    kmax: int
    perturbation: Optional[str]
    checks: list[TowerCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[TowerCheck]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict[str, Any]:
        return {
            "r": self.r,
            "kmax": self.kmax,
            "perturbation": self.perturbation,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


# ── Tower construction ───────────────────────────────────────────────────────


class _Tower:
    def __init__(self, params: ModelParams, r: int, perturbation: Optional[str]) -> None:
        self.params = params
        self.r = r
        self.perturbation = perturbation

    def module(self, k: int) -> FPTorsionModule:
        return FPTorsionModule.of(self.params, [k] * self.r)

    def q(self, k: int) -> ModuleMap:
        exponent = 2 if self.perturbation == "q" else 1
        return scalar_map(self.module(k), self.module(k + 1), exponent)

    def p(self, k: int) -> ModuleMap:
        exponent = 1 if self.perturbation == "middle" else 0
        return scalar_map(self.module(k + 1), self.module(k), exponent)

    def twist_module(self, M: FPTorsionModule) -> FPTorsionModule:
        return FPTorsionModule(
            M.params, tuple(self.params.p * g for g in M.gammas), M.open_flags
        )

    def twist(self, f: ModuleMap) -> ModuleMap:
        if self.perturbation == "phi":
            entries = f.matrix.entries
        else:
            entries = tuple(tuple(x.frobenius() for x in row) for row in f.matrix.entries)
        return ModuleMap(
            self.twist_module(f.source),
            self.twist_module(f.target),
            MatrixOverO(self.params, f.matrix.rows, f.matrix.cols, entries),
        )


def _chain(maps: list[ModuleMap]) -> ModuleMap:
    out = maps[0]
    for f in maps[1:]:
        out = compose(f, out)
    return out


# ── Checker ──────────────────────────────────────────────────────────────────


def frobenius_tower_check(
    params: ModelParams,
    r: int,
    kmax: int,
    perturbation: Optional[Perturbation] = None,
) -> TowerReport:
    """Run every tower check for ``1 <= k <= kmax``.

    Raises
    ------
    PrecisionExhaustedError
        If ``N < p·(kmax + 1)``: the twisted modules would need more digits.
    ValueError
        For ``r < 0``, ``kmax < 1`` or an unknown perturbation.
    """
    if r < 0 or kmax < 1:
        raise ValueError(f"need r >= 0 and kmax >= 1, got r={r}, kmax={kmax}")
    if perturbation is not None and perturbation not in PERTURBATIONS:
        raise ValueError(
            f"unknown perturbation {perturbation!r}; available: {list(PERTURBATIONS)}"
        )
    required = Fraction(params.p * (kmax + 1))
    if params.N < required:
        raise PrecisionExhaustedError(
            f"tower up to k={kmax} needs N >= {required}, got {params.N}",
            needed=required - params.N,
        )

    tower = _Tower(params, r, perturbation)
    report = TowerReport(r=r, kmax=kmax, perturbation=perturbation)
    gamma_1 = tower.module(1).divisors

    def run(name: str, k: int, check: Callable[[], tuple[bool, str]]) -> None:
        try:
            passed, detail = check()
        except NotWellDefinedError as exc:
            passed, detail = False, f"map not well defined: {exc}"
        report.checks.append(TowerCheck(name, k, passed, detail))
        if not passed:
            logger.debug("tower check %s failed at k=%d: %s", name, k, detail)

    for k in range(1, kmax + 1):
        Mk = tower.module(k)
        run(
            "p_q_is_t",
            k,
            lambda: (maps_equal(compose(tower.p(k), tower.q(k)), scalar_map(Mk, Mk, 1)), ""),
        )

        def exactness() -> tuple[bool, str]:
            inclusion = scalar_map(tower.module(1), tower.module(k + 1), k)
            seq = exact_sequence_check(inclusion, tower.p(k))
            return seq.exact and seq.lambda_lhs == seq.lambda_rhs, str(seq.notes)

        run("short_exact_sequence", k, exactness)

        def growth() -> tuple[bool, str]:
            # M_k recovered from the maps: as the image of p_k and as the
            # cokernel of M_1 -t^k-> M_{k+1}.
            expected = EldivSeq.of(k * g for g in gamma_1.entries)
            image = map_image_divisors(tower.p(k))
            quotient = map_cokernel(scalar_map(tower.module(1), tower.module(k + 1), k)).divisors
            return (
                image == expected and quotient == expected,
                f"image {image}, cokernel {quotient}, expected {expected}",
            )

        run("divisor_growth", k, growth)

        pk_ = params.p * k
        run(
            "twist_module",
            k,
            lambda: (tower.twist_module(Mk).gammas == tower.module(pk_).gammas, ""),
        )
        run(
            "twist_q",
            k,
            lambda: (
                maps_equal(
                    tower.twist(tower.q(k)),
                    _chain([tower.q(pk_ + j) for j in range(params.p)]),
                ),
                "",
            ),
        )
        run(
            "twist_p",
            k,
            lambda: (
                maps_equal(
                    tower.twist(tower.p(k)),
                    _chain([tower.p(pk_ + params.p - 1 - j) for j in range(params.p)]),
                ),
                "",
            ),
        )

    logger.info(
        "tower r=%d kmax=%d perturbation=%s: %d/%d checks passed",
        r,
        kmax,
        perturbation,
        sum(c.passed for c in report.checks),
        len(report.checks),
    )
    return report
