from pathlib import Path
from typing import Literal

import pytest

from sentifuse.config import (
    RunConfig,
    apply_overrides,
    coerce,
    dump_config,
    load_config,
    parse_config_text,
)
from sentifuse.errors import ConfigurationError


@pytest.mark.parametrize(
    "value,annotation,expected",
    [
        ("3", int, 3),
        (" 0.25 ", float, 0.25),
        ("yes", bool, True),
        ("off", bool, False),
        ("none", str | None, None),
        ("2015-01-01", str | None, "2015-01-01"),
        ("0.5,0.2", tuple[float, ...], (0.5, 0.2)),
        ("b", Literal["a", "b"], "b"),
        (7, int, 7),
    ],
)
def test_coerce(value, annotation, expected):
    assert coerce(value, annotation, "key") == expected


@pytest.mark.parametrize(
    "value,annotation",
    [("three", int), ("maybe", bool), ("c", Literal["a", "b"]), ("1.5", int)],
)
def test_coerce_invalid(value, annotation):
    with pytest.raises(ConfigurationError) as exc_info:
        coerce(value, annotation, "section.key")

    assert "section.key" in str(exc_info.value)


def test_parse_config_text():
    text = "# run settings\nseed = 3\n\nmodel.variant=lstm_s  # baseline\nseed=4\n"

    assert parse_config_text(text) == {"seed": "4", "model.variant": "lstm_s"}


def test_parse_error_names_the_line():
    with pytest.raises(ConfigurationError) as exc_info:
        parse_config_text("seed=1\njobs 2\n", "run.cfg")

    assert "run.cfg:2: expected key=value" in str(exc_info.value)


@pytest.mark.parametrize("key", ["model.nope", "synth", "nowhere.seed", "colour"])
def test_unknown_keys(key):
    with pytest.raises(ConfigurationError):
        apply_overrides(RunConfig(), {key: "1"})


def test_overrides_reach_sections():
    config = apply_overrides(
        RunConfig(),
        {"seed": "9", "train.epochs": "3", "experiment.densities": "1.0,0.5", "backtest.start": "2015-02-01"},
    )

    assert config.seed == 9
    assert config.train.epochs == 3
    assert config.experiment.densities == (1.0, 0.5)
    assert config.backtest.start == "2015-02-01"


def test_overrides_leave_the_original_alone():
    original = RunConfig()

    apply_overrides(original, {"train.epochs": 3})

    assert original.train.epochs == RunConfig().train.epochs


def test_load_config_precedence(tmp_path: Path):
    path = tmp_path / "run.cfg"
    path.write_text("seed=5\ntrain.epochs=4\nmodel.variant=lstm_s\n")

    config = load_config(path, {"train.epochs": 7})

    assert config.seed == 5
    assert config.train.epochs == 7
    assert config.model.variant == "lstm_s"
    assert config.train.batch_size == RunConfig().train.batch_size


def test_load_config_validates(tmp_path: Path):
    path = tmp_path / "run.cfg"
    path.write_text("data.horizon=0\n")

    with pytest.raises(ConfigurationError):
        load_config(path)

    with pytest.raises(ConfigurationError):
        load_config(overrides={"model.variant": "dual_clvsa"})


def test_dump_config_round_trip(tmp_path: Path):
    config = load_config(overrides={"seed": 2, "model.use_indicators": True, "backtest.cost_per_side": 0.001})
    path = tmp_path / "dumped.cfg"
    path.write_text(dump_config(config))

    assert load_config(path) == config


def test_seed_drives_training():
    config = load_config(overrides={"seed": 11})

    assert config.train_config().seed == 11


def test_default_paths():
    config = RunConfig(out_dir="runs", trmi="elsewhere/trmi.csv")

    assert config.path("bars") == Path("runs/bars.csv")
    assert config.path("trmi") == Path("elsewhere/trmi.csv")
    assert config.path("predictions") == Path("runs/predictions.csv")
