from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from almostperiods.config import ModelParams

QUICK_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "check_quick.yaml"


@pytest.fixture
def p2() -> ModelParams:
    return ModelParams(p=2, s=1, L=2, N=8, m=1, d=1)


@pytest.fixture
def p3() -> ModelParams:
    return ModelParams(p=3, s=1, L=1, N=6, m=1, d=1)


@pytest.fixture
def witt2() -> ModelParams:
    return ModelParams(p=2, s=1, L=4, N=4, m=2, d=1)


@pytest.fixture
def witt3() -> ModelParams:
    return ModelParams(p=3, s=1, L=4, N=4, m=2, d=2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def quick_config_path() -> Path:
    return QUICK_CONFIG
