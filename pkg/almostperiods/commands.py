"""Command handlers: one :class:`JobSpec` in, one JSON report and an exit code out.

Exit codes: 0 on success, 1 when a mathematical check fails (the report
names the invariant), 2 on malformed input or exhausted precision.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable, Optional

import pandas as pd
from pydantic import ValidationError

from almostperiods import eldiv
from almostperiods.config import DEFAULT_CHECK_CONFIG, CheckConfig, ModelParams
from almostperiods.errors import (
    AlmostPeriodsError,
    InvariantViolation,
    PrecisionExhaustedError,
)
from almostperiods.koszul import full_table
from almostperiods.modules import (
    FPTorsionModule,
    ModuleMap,
    approx_eq,
    direct_sum,
    dual,
    exact_sequence_check,
    is_almost_zero,
    map_cokernel,
    map_image_divisors,
    map_kernel_divisors,
    verify_witness,
    witness_maps,
)
from almostperiods.periods import (
    BdRElem,
    bdr_eq,
    divide_by_xi,
    log_epsilon,
    xi_element,
)
from almostperiods.puiseux import PuiseuxElem, artin_schreier_solve
from almostperiods.rational import format_fraction, parse_fraction
from almostperiods.sampling import spawn_generators
from almostperiods.schemas import SCHEMA_VERSION, JobSpec
from almostperiods.snf import MatrixOverO, det_valuation, free_rank, smith_normal_form
from almostperiods.suites import get_suite, suite_names
from almostperiods.tower import frobenius_tower_check
from almostperiods.witt import WittElem
from almostperiods.zpm import (
    ZpmMatrix,
    cohomology,
    howell_form,
    kernel_basis,
    quotient_invariants,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

Handler = Callable[[JobSpec], dict[str, Any]]

# ── Command registry ─────────────────────────────────────────────────────────

_COMMANDS: dict[str, Handler] = {}


def register_command(name: str):
    """Function decorator that registers a handler under *name*."""

    def _decorator(fn: Handler) -> Handler:
        _COMMANDS[name] = fn
        return fn

    return _decorator


def get_command(name: str) -> Handler:
    """Return the handler registered under *name*.

    Raises ``KeyError`` if *name* is not registered.
    """
    if name not in _COMMANDS:
        available = ", ".join(sorted(_COMMANDS)) or "(none)"
        raise KeyError(f"Unknown command '{name}'. Available: {available}")
    return _COMMANDS[name]


# ── Runner ───────────────────────────────────────────────────────────────────


def run(job: JobSpec) -> tuple[dict[str, Any], int]:
    """Execute *job*; returns the report and the process exit status."""
    envelope: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": job.command,
        "params": job.params.to_json(),
        "seed": job.seed,
    }
    try:
        result = get_command(job.command)(job)
    except InvariantViolation as exc:
        logger.error("invariant %s violated: %s", exc.invariant, exc.detail)
        return {
            **envelope,
            "status": "failed",
            "failure": {"invariant": exc.invariant, "detail": exc.detail, "witness": exc.witness},
        }, EXIT_CHECK_FAILED
    except PrecisionExhaustedError as exc:
        logger.error("precision exhausted: %s", exc)
        error: dict[str, Any] = {"type": "PrecisionExhaustedError", "message": str(exc)}
        if exc.needed is not None:
            error["suggested_N"] = format_fraction(job.params.N + exc.needed)
        return {**envelope, "status": "error", "error": error}, EXIT_INPUT_ERROR
    except (AlmostPeriodsError, ValidationError, ValueError, KeyError, TypeError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return {
            **envelope,
            "status": "error",
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }, EXIT_INPUT_ERROR

    passed = result.pop("passed", True)
    status = "ok" if passed else "failed"
    code = EXIT_OK if passed else EXIT_CHECK_FAILED
    return {**envelope, "status": status, "result": result}, code


# ── Payload helpers ──────────────────────────────────────────────────────────


def _require_key(payload: dict[str, Any], key: str) -> Any:
    if key not in payload:
        raise KeyError(f"payload is missing '{key}'")
    return payload[key]


def _seq(values: Any) -> eldiv.EldivSeq:
    if isinstance(values, dict):
        return eldiv.EldivSeq.from_json(values)
    return eldiv.EldivSeq.of(values)


def _module(params: ModelParams, data: Any) -> FPTorsionModule:
    if isinstance(data, dict):
        return FPTorsionModule.from_json(params, data)
    return FPTorsionModule.of(params, data)


def _matrix(params: ModelParams, data: Any) -> MatrixOverO:
    if isinstance(data, dict):
        return MatrixOverO.from_json(params, data)
    return MatrixOverO.from_strings(params, data)


def _zpm(params: ModelParams, data: Any) -> ZpmMatrix:
    if isinstance(data, dict):
        return ZpmMatrix.from_rows(
            data.get("p", params.p), data.get("m", params.m), data["entries"], data.get("cols")
        )
    return ZpmMatrix.from_rows(params.p, params.m, data)


# ── eldiv ────────────────────────────────────────────────────────────────────


@register_command("eldiv")
def eldiv_command(job: JobSpec) -> dict[str, Any]:
    payload = job.payload
    op = _require_key(payload, "op")
    g = _seq(_require_key(payload, "g"))
    if op == "length":
        return {"value": format_fraction(eldiv.length(g))}
    if op == "norm":
        return {"value": format_fraction(eldiv.norm(g))}
    if op == "shift_eps":
        return eldiv.shift_eps(g, parse_fraction(_require_key(payload, "eps"))).to_json()
    if op == "finite_approximation":
        return eldiv.finite_approximation(g, parse_fraction(_require_key(payload, "eps"))).to_json()
    if op == "rank_profile":
        return {"value": eldiv.rank_profile(g, parse_fraction(_require_key(payload, "x")))}
    h = _seq(_require_key(payload, "h"))
    if op == "linf_dist":
        return {"value": format_fraction(eldiv.linf_dist(g, h))}
    if op == "majorizes":
        return {"value": eldiv.majorizes(g, h)}
    if op == "indexwise_sum":
        return eldiv.indexwise_sum(g, h).to_json()
    if op == "merge_sorted":
        return eldiv.merge_sorted(g, h).to_json()
    raise ValueError(f"unknown eldiv op {op!r}")


# ── snf ──────────────────────────────────────────────────────────────────────


@register_command("snf")
def snf_command(job: JobSpec) -> dict[str, Any]:
    A = _matrix(job.params, _require_key(job.payload, "matrix"))
    snf = smith_normal_form(A)
    out = {**snf.to_json(), "free_rank": free_rank(A)}
    if A.rows == A.cols and not snf.infinite:
        out["det_valuation"] = format_fraction(det_valuation(A))
    return out


# ── module ───────────────────────────────────────────────────────────────────


@register_command("module")
def module_command(job: JobSpec) -> dict[str, Any]:
    params, payload = job.params, job.payload
    op = _require_key(payload, "op")
    if op in ("exact_sequence", "cokernel", "kernel", "image"):
        if op == "exact_sequence":
            f = ModuleMap.from_json(params, _require_key(payload, "f"))
            g = ModuleMap.from_json(params, _require_key(payload, "g"))
            report = exact_sequence_check(f, g)
            return {**report.to_json(), "passed": report.exact}
        f = ModuleMap.from_json(params, _require_key(payload, "f"))
        if op == "cokernel":
            return map_cokernel(f).to_json()
        if op == "kernel":
            return map_kernel_divisors(f).to_json()
        return map_image_divisors(f).to_json()

    M = _module(params, _require_key(payload, "M"))
    if op == "divisors":
        return M.divisors.to_json()
    if op == "dual":
        return dual(M).to_json()
    if op == "almost_zero":
        return {"value": is_almost_zero(M)}
    N = _module(params, _require_key(payload, "N"))
    if op == "direct_sum":
        return direct_sum(M, N).to_json()
    eps = parse_fraction(_require_key(payload, "eps"))
    if op == "approx_eq":
        return {
            "value": approx_eq(M, N, eps),
            "distance": format_fraction(eldiv.linf_dist(M.divisors, N.divisors)),
        }
    if op == "witness":
        maps = witness_maps(M, N, eps)
        if maps is None:
            return {"witness": None}
        f, g = maps
        verified = verify_witness(f, g, eps)
        return {"witness": {"f": f.to_json(), "g": g.to_json()}, "verified": verified, "passed": verified}
    raise ValueError(f"unknown module op {op!r}")


# ── tower ────────────────────────────────────────────────────────────────────


@register_command("tower")
def tower_command(job: JobSpec) -> dict[str, Any]:
    payload = job.payload
    report = frobenius_tower_check(
        job.params,
        int(payload.get("r", 1)),
        int(payload.get("kmax", 1)),
        payload.get("perturbation"),
    )
    return report.to_json()


# ── periods ──────────────────────────────────────────────────────────────────


@register_command("periods")
def periods_command(job: JobSpec) -> dict[str, Any]:
    params, payload = job.params, job.payload
    op = _require_key(payload, "op")
    if op == "xi":
        return xi_element(params, payload.get("length")).to_json()
    if op == "divxi":
        y = WittElem.from_json(params, _require_key(payload, "y"))
        return divide_by_xi(y).to_json()
    if op == "log-eps":
        return log_epsilon(params, payload.get("d")).to_json()
    if op == "bdr-eq":
        a = BdRElem.from_json(params, _require_key(payload, "a"))
        b = BdRElem.from_json(params, _require_key(payload, "b"))
        return {"value": bdr_eq(a, b).value}
    raise ValueError(f"unknown periods op {op!r}")


# ── linalg ───────────────────────────────────────────────────────────────────


@register_command("linalg")
def linalg_command(job: JobSpec) -> dict[str, Any]:
    params, payload = job.params, job.payload
    op = _require_key(payload, "op")
    if op == "howell":
        form = howell_form(_zpm(params, _require_key(payload, "A")))
        return {
            "H": form.H.to_json(),
            "U": form.U.to_json(),
            "pivots": [list(pv) for pv in form.pivots],
            "log_size": form.log_size(),
        }
    if op == "kernel":
        return kernel_basis(_zpm(params, _require_key(payload, "A"))).to_json()
    if op == "cohomology":
        d_in = _zpm(params, _require_key(payload, "d_in"))
        d_out = _zpm(params, _require_key(payload, "d_out"))
        return cohomology(d_in, d_out).to_json()
    if op == "quotient":
        gens = _zpm(params, _require_key(payload, "generators"))
        rels = _zpm(params, _require_key(payload, "relations"))
        return quotient_invariants(gens, rels).to_json()
    raise ValueError(f"unknown linalg op {op!r}")


# ── koszul ───────────────────────────────────────────────────────────────────


@register_command("koszul")
def koszul_command(job: JobSpec) -> dict[str, Any]:
    payload = job.payload
    table = full_table(
        int(payload.get("n", 1)),
        int(payload.get("L", job.params.L)),
        int(payload.get("m", job.params.m)),
        int(payload.get("p", job.params.p)),
        q_range=payload.get("q_range"),
        budget=payload.get("budget"),
    )
    logger.info("Koszul table:\n%s", table.to_frame().to_string(index=False))
    return table.to_json()


# ── as-solve ─────────────────────────────────────────────────────────────────


@register_command("as-solve")
def as_solve_command(job: JobSpec) -> dict[str, Any]:
    params = job.params
    values = job.payload.get("values")
    if values is None:
        values = [_require_key(job.payload, "a")]
    rows = []
    for text in values:
        a = PuiseuxElem.parse(params, text)
        x = artin_schreier_solve(a)
        residual = x ** params.p - x - a
        rows.append({"a": str(a), "x": str(x), "residual_zero": residual.is_zero()})
    return {"solutions": rows, "passed": all(r["residual_zero"] for r in rows)}


# ── check ────────────────────────────────────────────────────────────────────


@register_command("check")
def check_command(job: JobSpec) -> dict[str, Any]:
    if job.seed is None:
        raise ValueError("check is randomized: a seed is mandatory")
    payload = job.payload
    config = CheckConfig.from_yaml(Path(payload.get("config", DEFAULT_CHECK_CONFIG)))
    names = suite_names()
    requested = payload.get("suite", "all")
    selected = names if requested == "all" else [requested]
    for name in selected:
        if name not in names:
            get_suite(name)
    streams = dict(zip(names, spawn_generators(job.seed, len(names))))

    suites: dict[str, Any] = {}
    for name in selected:
        logger.info("Running suite: %s", name)
        suites[name] = get_suite(name).run(config, streams[name]).to_json()

    _log_check_summary(suites)
    return {
        "config": config.model_dump(),
        "suites": suites,
        "passed": all(s["passed"] for s in suites.values()),
    }


def _log_check_summary(suites: dict[str, Any]) -> None:
    frame = pd.DataFrame(
        [
            {
                "suite": name,
                "trials": s["trials"],
                "skipped": s["skipped"],
                "failures": len(s["failures"]),
                "passed": s["passed"],
            }
            for name, s in suites.items()
        ]
    )
    logger.info("── Summary ────────────────────────────────────────────")
    logger.info("\n%s", frame.to_string(index=False))
    for name, s in suites.items():
        for failure in s["failures"]:
            logger.warning("  %s: %s (%s)", name, failure["invariant"], failure["detail"])


def job_from_flags(
    command: str,
    payload: dict[str, Any],
    params: Optional[dict[str, Any]] = None,
    seed: Optional[int] = None,
) -> JobSpec:
    """Build the :class:`JobSpec` equivalent to a subcommand invocation."""
    data: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "payload": {k: v for k, v in payload.items() if v is not None},
        "seed": seed,
    }
    if params is not None:
        data["params"] = params
    return JobSpec(**data)
