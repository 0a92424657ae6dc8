"""Replay check: the same stream must give byte-identical suite reports."""

from __future__ import annotations

import json
import logging

import numpy as np

from almostperiods.config import CheckConfig
from almostperiods.suites.base import (
    PropertySuite,
    SuiteResult,
    get_suite,
    register_suite,
    require,
)

logger = logging.getLogger(__name__)

REPLAYED = ("metric", "shift")


@register_suite("determinism")
class DeterminismSuite(PropertySuite):
    """Run the cheap suites twice from one derived seed and compare the JSON."""

    def run(self, config: CheckConfig, rng: np.random.Generator) -> SuiteResult:
        result = SuiteResult(self.name)
        seed = int(rng.integers(0, 2**63))
        for name in REPLAYED:

            def trial() -> None:
                runs = [
                    json.dumps(
                        get_suite(name).run(config, np.random.default_rng(seed)).to_json(),
                        sort_keys=True,
                    )
                    for _ in range(2)
                ]
                require(
                    runs[0] == runs[1],
                    "byte_identical_replay",
                    f"suite {name!r} differs between two runs with seed {seed}",
                    {"suite": name, "seed": seed},
                )

            result.attempt(trial)
        return result
