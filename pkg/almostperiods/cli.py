"""Command-line entry point.

Every subcommand builds a :class:`JobSpec` from its flags (or reads one
with ``--input``), runs it and writes the JSON report to stdout or
``--output``.  Logs go to stderr so reports stay byte-identical.

Usage
-----
    python -m almostperiods snf --matrix '[["t^(1)", "t^(1)"], ["t^(1)", "t^(2)"]]'
    python -m almostperiods koszul --n 1 --L 1 --m 1 --p 2
    python -m almostperiods check --suite all --seed 7
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from almostperiods.commands import EXIT_INPUT_ERROR, job_from_flags, run
from almostperiods.config import DEFAULT_CHECK_CONFIG
from almostperiods.schemas import JobSpec
from almostperiods.suites import suite_names
from almostperiods.tower import PERTURBATIONS

logger = logging.getLogger(__name__)


# ── Helpers ──────────────────────────────────────────────────────────────────


def _json_arg(text: Optional[str]) -> Any:
    return None if text is None else json.loads(text)


def _read_job(source: str, command: str, seed: Optional[int]) -> JobSpec:
    """Read a JSON job from a file or ``-``; its command must match *command*."""
    if source == "-":
        raw = json.load(sys.stdin)
    else:
        with Path(source).open() as fh:
            raw = json.load(fh)
    if raw.get("command", command) != command:
        raise ValueError(
            f"job file is for command '{raw.get('command')}', not '{command}'"
        )
    raw.setdefault("command", command)
    if seed is not None:
        raw["seed"] = seed
    return JobSpec(**raw)


def _payload(args: argparse.Namespace) -> dict[str, Any]:
    """Collect the subcommand-specific flags into a job payload."""
    command = args.command
    if command == "eldiv":
        return {
            "op": args.op,
            "g": _json_arg(args.g),
            "h": _json_arg(args.h),
            "eps": args.eps,
            "x": args.x,
        }
    if command == "snf":
        return {"matrix": _json_arg(args.matrix)}
    if command == "module":
        return {
            "op": args.op,
            "M": _json_arg(args.M),
            "N": _json_arg(args.N),
            "eps": args.eps,
            "f": _json_arg(args.f),
            "g": _json_arg(args.g),
        }
    if command == "tower":
        return {"r": args.r, "kmax": args.kmax, "perturbation": args.perturbation}
    if command == "periods":
        return {
            "op": args.op,
            "y": _json_arg(args.y),
            "a": _json_arg(args.a),
            "b": _json_arg(args.b),
            "d": args.d,
            "length": args.length,
        }
    if command == "linalg":
        return {
            "op": args.op,
            "A": _json_arg(args.A),
            "d_in": _json_arg(args.d_in),
            "d_out": _json_arg(args.d_out),
            "generators": _json_arg(args.generators),
            "relations": _json_arg(args.relations),
        }
    if command == "koszul":
        q_range = None
        if args.q_range is not None:
            q_range = [int(q) for q in args.q_range.split(",") if q.strip()]
        return {
            "n": args.n,
            "L": args.L,
            "m": args.m,
            "p": args.p,
            "q_range": q_range,
            "budget": args.budget,
        }
    if command == "as-solve":
        return {"values": args.a}
    if command == "check":
        return {"suite": args.suite, "config": str(args.config)}
    raise ValueError(f"unknown command {command!r}")


def _write_report(report: dict[str, Any], destination: str) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if destination == "-":
        sys.stdout.write(text)
    else:
        path = Path(destination)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info("Saved report → %s", path)


# ── CLI ──────────────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="Read the JSON job from FILE ('-' for stdin).")
    common.add_argument("--output", default="-", help="Write the report to FILE (default stdout).")
    common.add_argument("--seed", type=int, help="Unsigned 64-bit seed for randomized runs.")
    common.add_argument("--params", help="ModelParams as JSON, e.g. '{\"p\": 3, \"N\": \"9\"}'.")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")

    parser = argparse.ArgumentParser(
        prog="almostperiods",
        description="Exact computations with almost modules, period rings and Koszul cohomology.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eldiv", parents=[common], help="Elementary-divisor sequence calculus.")
    p.add_argument(
        "--op",
        required=True,
        choices=[
            "length", "norm", "rank_profile", "linf_dist", "majorizes",
            "shift_eps", "indexwise_sum", "merge_sorted", "finite_approximation",
        ],
    )
    p.add_argument("--g", help="JSON list of rationals.")
    p.add_argument("--h", help="JSON list of rationals.")
    p.add_argument("--eps")
    p.add_argument("--x")

    p = sub.add_parser("snf", parents=[common], help="Smith normal form over O.")
    p.add_argument("--matrix", help="JSON rows of element strings.")

    p = sub.add_parser("module", parents=[common], help="Torsion modules and maps.")
    p.add_argument(
        "--op",
        required=True,
        choices=[
            "divisors", "dual", "almost_zero", "direct_sum", "approx_eq", "witness",
            "exact_sequence", "cokernel", "kernel", "image",
        ],
    )
    p.add_argument("--M", help="JSON module {gammas, open} or list of exponents.")
    p.add_argument("--N", help="JSON module {gammas, open} or list of exponents.")
    p.add_argument("--eps")
    p.add_argument("--f", help="JSON map {source, target, matrix}.")
    p.add_argument("--g", help="JSON map {source, target, matrix}.")

    p = sub.add_parser("tower", parents=[common], help="Frobenius tower verifier.")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--kmax", type=int, default=1)
    p.add_argument("--perturbation", choices=list(PERTURBATIONS))

    p = sub.add_parser("periods", parents=[common], help="ξ, division by ξ and B_dR+/Fil^d.")
    p.add_argument("op", choices=["xi", "divxi", "log-eps", "bdr-eq"])
    p.add_argument("--y", help="JSON Witt element {digits}.")
    p.add_argument("--a", help="JSON B_dR element {digits, pshift, d}.")
    p.add_argument("--b", help="JSON B_dR element {digits, pshift, d}.")
    p.add_argument("--d", type=int)
    p.add_argument("--length", type=int)

    p = sub.add_parser("linalg", parents=[common], help="Linear algebra over Z/p^m.")
    p.add_argument("--op", required=True, choices=["howell", "kernel", "cohomology", "quotient"])
    p.add_argument("--A", help="JSON integer rows.")
    p.add_argument("--d-in", dest="d_in", help="JSON {entries, cols}.")
    p.add_argument("--d-out", dest="d_out", help="JSON {entries, cols}.")
    p.add_argument("--generators", help="JSON integer rows.")
    p.add_argument("--relations", help="JSON integer rows.")

    p = sub.add_parser("koszul", parents=[common], help="Koszul cohomology tables.")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q-range", dest="q_range", help="Comma-separated degrees, e.g. '0,1'.")
    p.add_argument("--budget", type=int, help="Cell budget for the table.")

    p = sub.add_parser("as-solve", parents=[common], help="Solve x^p - x = a.")
    p.add_argument("--a", action="append", default=[], help="Element string (repeatable).")

    p = sub.add_parser("check", parents=[common], help="Run the property suites.")
    p.add_argument("--suite", default="all", choices=["all", *suite_names()])
    p.add_argument("--config", type=Path, default=DEFAULT_CHECK_CONFIG)

    return parser


# ── Entry point ──────────────────────────────────────────────────────────────


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)-8s │ %(name)s │ %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.input is not None:
            job = _read_job(args.input, args.command, args.seed)
        else:
            job = job_from_flags(
                args.command,
                _payload(args),
                params=_json_arg(args.params),
                seed=args.seed,
            )
    except (ValidationError, ValueError, OSError) as exc:
        logger.error("invalid job: %s", exc)
        _write_report(
            {"status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}},
            args.output,
        )
        return EXIT_INPUT_ERROR

    logger.info("Running %s (seed=%s)", job.command, job.seed)
    report, code = run(job)
    _write_report(report, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
