"""Experiment configuration: INI or JSON files, validated with line-aware errors."""

from __future__ import annotations

import configparser
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

EXPERIMENTS = ("ratio_sweep", "projection_norm", "lacunary_growth", "block_sweep", "check_suite")
FAMILIES = ("gaussian", "constant", "monomial", "lacunary")

_DEFAULT_P_GRID = {
    "ratio_sweep": [1.0, 1.5, 2.0, 3.0, 4.0, 8.0],
    "block_sweep": [1.0, 2.0, 4.0],
    "lacunary_growth": [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0],
    "projection_norm": [1.05, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0],
    "check_suite": [2.0],
}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``line`` is set when the source line is known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path or '<config>'}:{line}: " if line else (f"{path}: " if path else "")
        super().__init__(where + message)


@dataclass
class ExperimentConfig:
    experiment: str = "ratio_sweep"
    p_grid: list[float] = field(default_factory=list)
    m: int = 16
    degree: int = 15
    block_dim: int = 1
    alpha: float = 0.0
    beta: float = 0.0
    trials: int = 4
    seed: int = 0
    output_path: str = "results.csv"
    family: str = "gaussian"
    starts: int = 8
    max_iter: int = 200
    slack: float | None = None

    def __post_init__(self):
        if not self.p_grid:
            self.p_grid = list(_DEFAULT_P_GRID.get(self.experiment, [2.0]))

    def as_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["p_grid"] = [_p_repr(p) for p in self.p_grid]
        return d

    def validate(self, lines: dict[str, int] | None = None, path: str | None = None) -> "ExperimentConfig":
        lines = lines or {}

        def fail(key, msg):
            raise ConfigError(f"{key}: {msg}", lines.get(key), path)

        if self.experiment not in EXPERIMENTS:
            fail("experiment", f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.p_grid:
            fail("p_grid", "must be nonempty")
        for p in self.p_grid:
            if not p >= 1:
                fail("p_grid", f"every p must be >= 1 (got {p})")
        if self.experiment == "projection_norm" and any(p <= 1 or p == math.inf for p in self.p_grid):
            fail("p_grid", "projection_norm needs 1 < p < inf (the projection is unbounded at the endpoints)")
        if self.experiment == "lacunary_growth" and any(p == math.inf for p in self.p_grid):
            fail("p_grid", "lacunary_growth needs finite p")
        min_trials = 0 if self.experiment == "check_suite" else 1
        if self.trials < min_trials:
            fail("trials", f"must be >= {min_trials}")
        if self.m < 1:
            fail("m", "must be >= 1")
        if self.degree < 0:
            fail("degree", "must be >= 0")
        if self.block_dim < 1:
            fail("block_dim", "must be >= 1")
        if self.experiment in ("ratio_sweep", "block_sweep") and self.m < self.degree + 1:
            fail("m", f"must be >= degree + 1 = {self.degree + 1}")
        if self.experiment == "block_sweep" and self.m * self.block_dim > 4096:
            fail("block_dim", f"m * block_dim = {self.m * self.block_dim} exceeds the dense SVD limit 4096")
        if self.family not in FAMILIES:
            fail("family", f"unknown symbol family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.starts < 1 or self.max_iter < 1:
            fail("starts" if self.starts < 1 else "max_iter", "must be >= 1")
        if not -(2 ** 63) <= self.seed < 2 ** 64:
            fail("seed", "must fit in 64 bits")
        if self.slack is not None and self.slack < 0:
            fail("slack", "must be >= 0")
        return self


def _p_repr(p: float):
    return "inf" if p == math.inf else p


def _parse_p(value) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    return float(value)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _coerce(key: str, value):
    if key == "p_grid":
        if isinstance(value, str):
            value = [v for v in value.replace(";", ",").split(",") if v.strip()]
        return [_parse_p(v) for v in value]
    if key == "slack":
        return None if value in (None, "", "none", "None") else float(value)
    kind = _FIELD_TYPES[key]
    if kind == "int":
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"expected an integer, got {value}")
        return int(value)
    if kind == "float":
        return float(value)
    return str(value).strip()


def _line_of(text: str, key: str) -> int | None:
    for i, line in enumerate(text.splitlines(), 1):
        stripped = line.strip().lstrip('"')
        if stripped.startswith(key) and stripped[len(key):].lstrip('"').lstrip()[:1] in ("=", ":"):
            return i
    return None


def config_from_mapping(raw: dict[str, Any], text: str = "", path: str | None = None) -> ExperimentConfig:
    values = {}
    lines = {}
    for key, value in raw.items():
        key = key.strip()
        line = _line_of(text, key) if text else None
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", line, path)
        try:
            values[key] = _coerce(key, value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}", line, path) from None
        lines[key] = line
    return ExperimentConfig(**values).validate(lines, path)


def load_config(path: str | Path, overrides: dict[str, Any] | None = None) -> ExperimentConfig:
    """Read a ``.json`` file or an INI-style file (any other extension)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", path=str(path)) from None
    if path.suffix.lower() == ".json":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, exc.lineno, str(path)) from None
        if not isinstance(raw, dict):
            raise ConfigError("top level must be an object", 1, str(path))
    else:
        parser = configparser.ConfigParser()
        headed = text.lstrip().startswith("[")
        try:
            parser.read_string(text if headed else "[experiment]\n" + text)
        except configparser.Error as exc:
            line = getattr(exc, "lineno", None)
            if line is not None and not headed:
                line -= 1
            raise ConfigError(str(exc).splitlines()[0], line, str(path)) from None
        section = parser.sections()[0] if parser.sections() else parser.default_section
        raw = dict(parser[section])
    raw.update(overrides or {})
    return config_from_mapping(raw, text, str(path))
