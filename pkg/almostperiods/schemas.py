"""JSON job schema shared by the command-line surface and fixture files.

A job is ``{"schema_version": 1, "command": ..., "params": {...},
"payload": {...}, "seed": u64 | null}``.  Subcommand flags build the same
object, so a job file and the equivalent command line give identical
reports.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from almostperiods.config import ModelParams

SCHEMA_VERSION = 1


DEFAULT_PARAMS: dict[str, Any] = {"p": 2, "s": 1, "L": 2, "N": "8", "m": 1, "d": 1}


class JobSpec(BaseModel):
    """One command invocation.

    ``payload`` is validated by the command itself; ``seed`` is mandatory
    for randomized commands.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = Field(description="Must equal 1.")
    command: Literal[
        "eldiv", "snf", "module", "tower", "periods", "linalg", "koszul", "as-solve", "check"
    ]
    params: ModelParams = Field(default_factory=lambda: ModelParams(**DEFAULT_PARAMS))
    payload: dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None

    @field_validator("params", mode="before")
    @classmethod
    def _params_from_json(cls, v: Any) -> Any:
        if isinstance(v, dict):
            return ModelParams(**{**DEFAULT_PARAMS, **v})
        return v

    @field_validator("seed")
    @classmethod
    def _seed_is_u64(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and not 0 <= v < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {v}")
        return v

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "params": self.params.to_json(),
            "payload": self.payload,
            "seed": self.seed,
        }
