from __future__ import annotations

from fractions import Fraction

import pytest
from pydantic import ValidationError

from almostperiods.config import (
    DEFAULT_CHECK_CONFIG,
    DEFAULT_MAX_CELLS,
    MAX_CELLS_ENV,
    CheckConfig,
    ModelParams,
    max_cells,
)


def test_params_parse_precision_strings():
    params = ModelParams(p=3, s=1, L=2, N="4/3", m=1, d=1)
    assert params.N == Fraction(4, 3)
    assert params.scale == 9
    assert params.to_json()["N"] == "4/3"


@pytest.mark.parametrize(
    "changes",
    [
        {"p": 4},
        {"N": "1/4"},
        {"N": 0},
        {"d": 3},
        {"s": 5},
    ],
)
def test_params_reject_inconsistent_values(changes):
    data = {"p": 2, "s": 1, "L": 1, "N": 4, "m": 1, "d": 1, **changes}
    with pytest.raises(ValidationError):
        ModelParams(**data)


def test_params_are_frozen_and_strict(p2):
    with pytest.raises(ValidationError):
        p2.p = 3
    with pytest.raises(ValidationError):
        ModelParams(p="2", s=1, L=1, N=4, m=1, d=1)


def test_with_revalidates(p2):
    assert p2.with_(p=3).p == 3
    with pytest.raises(ValidationError):
        p2.with_(d=5)


def test_max_cells_from_environment(monkeypatch):
    monkeypatch.delenv(MAX_CELLS_ENV, raising=False)
    assert max_cells() == DEFAULT_MAX_CELLS
    monkeypatch.setenv(MAX_CELLS_ENV, "64")
    assert max_cells() == 64
    monkeypatch.setenv(MAX_CELLS_ENV, "-1")
    with pytest.raises(ValueError):
        max_cells()


def test_default_and_quick_configs_load(quick_config_path):
    default = CheckConfig.from_yaml(DEFAULT_CHECK_CONFIG)
    assert default.snf.trials == 500
    assert default.shift.sequences == 1000
    quick = CheckConfig.from_yaml(quick_config_path)
    assert quick.koszul.cases == [[1, 1, 1, 2], [2, 1, 1, 3]]


def test_config_rejects_unknown_keys(tmp_path, quick_config_path):
    text = quick_config_path.read_text() + "\nextra_suite:\n  trials: 1\n"
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(ValidationError):
        CheckConfig.from_yaml(path)
