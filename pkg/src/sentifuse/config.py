import dataclasses
import logging
import types
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Mapping, Union, get_args, get_origin, get_type_hints

from sentifuse.core.backtest import BacktestConfig
from sentifuse.core.data import DataConfig, SynthConfig
from sentifuse.core.experiments import ExperimentConfig
from sentifuse.core.models import ModelConfig
from sentifuse.core.training import TrainConfig
from sentifuse.errors import ConfigurationError

logger = logging.getLogger(__name__)

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


@dataclass
class RunConfig:
    """
    Every setting of a pipeline run. Sections nest the per-stage configs;
    `seed` drives all randomness and overrides `train.seed`.
    """

    seed: int = 0
    jobs: int = 1
    out_dir: str = "out"
    bars: str | None = None
    trmi: str | None = None
    synth: SynthConfig = field(default_factory=SynthConfig)
    data: DataConfig = field(default_factory=DataConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    backtest: BacktestConfig = field(default_factory=BacktestConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)

    def validate(self) -> None:
        if self.jobs < 1:
            raise ConfigurationError(f"jobs must be positive, got {self.jobs}")
        for section in SECTIONS:
            getattr(self, section).validate()

    def path(self, name: str) -> Path:
        """Input paths default to files of the same name under `out_dir`."""
        explicit = getattr(self, name, None) if name in ("bars", "trmi") else None
        return Path(explicit) if explicit is not None else Path(self.out_dir) / f"{name}.csv"

    def train_config(self) -> TrainConfig:
        return dataclasses.replace(self.train, seed=self.seed)


SECTIONS = tuple(
    f.name for f in dataclasses.fields(RunConfig) if dataclasses.is_dataclass(f.default_factory)
)


def coerce(value: Any, annotation: Any, key: str) -> Any:
    """Converts a config-file string to the field's declared type."""
    if not isinstance(value, str):
        return value
    text = value.strip()
    origin = get_origin(annotation)

    if origin in (Union, types.UnionType):
        options = [arg for arg in get_args(annotation) if arg is not type(None)]
        if text.lower() in ("", "none", "null"):
            return None
        return coerce(text, options[0], key)
    if origin is Literal:
        allowed = get_args(annotation)
        if text not in allowed:
            raise ConfigurationError(f"{key} must be one of {allowed}, got {text!r}")
        return text
    if origin is tuple:
        element = get_args(annotation)[0]
        return tuple(coerce(part, element, key) for part in text.split(",") if part.strip())

    try:
        if annotation is bool:
            lowered = text.lower()
            if lowered not in _TRUE | _FALSE:
                raise ValueError(text)
            return lowered in _TRUE
        if annotation in (int, float, str):
            return annotation(text)
    except ValueError:
        raise ConfigurationError(f"{key}: cannot read {text!r} as {annotation.__name__}") from None
    raise ConfigurationError(f"{key}: unsupported field type {annotation}")


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """
    Reads flat `key=value` lines. Blank lines and `#` comments are skipped;
    later keys win.
    """
    entries: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{number}: expected key=value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def _set(target: Any, name: str, value: Any, key: str) -> None:
    hints = get_type_hints(type(target))
    if name not in hints or (isinstance(target, RunConfig) and name in SECTIONS):
        raise ConfigurationError(f"Unknown config key {key!r}")
    setattr(target, name, coerce(value, hints[name], key))


def apply_overrides(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """
    Returns a copy of `config` with `section.field` or bare RunConfig keys
    replaced. String values are coerced to the field type; others are used
    as given.
    """
    updated = dataclasses.replace(
        config, **{section: dataclasses.replace(getattr(config, section)) for section in SECTIONS}
    )
    for key, value in overrides.items():
        section, _, name = key.rpartition(".")
        if not section:
            _set(updated, name, value, key)
        elif section in SECTIONS:
            _set(getattr(updated, section), name, value, key)
        else:
            raise ConfigurationError(f"Unknown config section in key {key!r}; sections are {SECTIONS}")
    return updated


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Defaults, then the config file at `path`, then `overrides`; the result is validated."""
    config = RunConfig()
    if path is not None:
        path = Path(path)
        config = apply_overrides(config, parse_config_text(path.read_text(), str(path)))
        logger.debug(f"Loaded config from {path}")
    if overrides:
        config = apply_overrides(config, overrides)
    config.validate()
    return config


def dump_config(config: RunConfig) -> str:
    """Renders `config` in the file format load_config reads."""
    lines = []
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.name in SECTIONS:
            lines += [f"{f.name}.{key}={_render(item)}" for key, item in dataclasses.asdict(value).items()]
        else:
            lines.append(f"{f.name}={_render(value)}")
    return "\n".join(lines) + "\n"


def _render(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, tuple):
        return ",".join(str(item) for item in value)
    return str(value)
