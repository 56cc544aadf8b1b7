"""Run configuration: defaults, plain-text config file, and flag overrides.

Precedence is flags > config file > defaults.  The config file is lines of
key = value with # comments.  Recognized keys mirror the CLI flags plus the
solver weight names (lambda1..lambda8, wall_threshold).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .costlib import DEFAULT_WEIGHTS, SolverWeights
from .llmio.providers import API_KEY_ENV, DEFAULT_BASE_URL, DEFAULT_MODEL
from .renderer import ALL_LAYERS, PALETTES
from .solver import DEFAULT_RESTARTS, SolveOptions

DROP_COST_NAMES = ("bound", "over", "align", "bal", "wall")
ABLATION_NAMES = ("no_hierarchy", "no_cleaning") + tuple(
    f"drop_{name}" for name in DROP_COST_NAMES
)

_WEIGHT_KEYS = (
    "lambda1",
    "lambda2",
    "lambda3",
    "lambda4",
    "lambda5",
    "lambda6",
    "lambda7",
    "lambda8",
    "wall_threshold",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    prompt: str = ""
    seed: int = 0
    fixtures: Optional[Path] = None
    out: Path = Path("out")
    restarts: int = DEFAULT_RESTARTS
    model: str = DEFAULT_MODEL
    base_url: str = DEFAULT_BASE_URL
    no_hierarchy: bool = False
    no_cleaning: bool = False
    drop_costs: frozenset[str] = frozenset()
    layers: frozenset[str] = ALL_LAYERS
    scale: float = 100.0
    palette: str = "default"
    weights: SolverWeights = DEFAULT_WEIGHTS

    def validate(self, needs_language_phase: bool = True) -> None:
        """Fail fast on an unusable configuration, before any work happens."""
        if needs_language_phase:
            if not self.prompt.strip():
                raise ConfigError("a prompt is required (--prompt or config file)")
            if self.fixtures is None and not os.environ.get(API_KEY_ENV):
                raise ConfigError(
                    f"choose a language source: --fixtures PATH or set {API_KEY_ENV}"
                )
            if self.fixtures is not None and not Path(self.fixtures).exists():
                raise ConfigError(f"fixture transcript not found: {self.fixtures}")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.scale <= 0:
            raise ConfigError("scale must be positive")
        if self.palette not in PALETTES:
            raise ConfigError(f"unknown palette {self.palette!r}")
        unknown = self.drop_costs - set(DROP_COST_NAMES)
        if unknown:
            raise ConfigError(f"unknown drop costs: {sorted(unknown)}")
        bad_layers = self.layers - ALL_LAYERS
        if bad_layers:
            raise ConfigError(f"unknown layers: {sorted(bad_layers)}")
        # SolverWeights positivity is enforced by its constructor; re-check in
        # case of exotic construction paths
        for key in _WEIGHT_KEYS:
            if getattr(self.weights, key) <= 0:
                raise ConfigError(f"weight {key} must be positive")

    def solve_options(self) -> SolveOptions:
        return SolveOptions(
            seed=self.seed,
            restarts=self.restarts,
            weights=self.weights,
            no_hierarchy=self.no_hierarchy,
            drop_costs=self.drop_costs,
        )

    def describe(self) -> dict:
        """JSON-safe summary embedded in the run report."""
        return {
            "prompt": self.prompt,
            "seed": self.seed,
            "fixtures": str(self.fixtures) if self.fixtures else None,
            "restarts": self.restarts,
            "model": self.model,
            "no_hierarchy": self.no_hierarchy,
            "no_cleaning": self.no_cleaning,
            "drop_costs": sorted(self.drop_costs),
            "weights": {k: getattr(self.weights, k) for k in _WEIGHT_KEYS},
        }


def parse_config_file(path: Union[str, Path]) -> dict[str, str]:
    """key = value lines; # starts a comment; blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _parse_bool(key: str, value: str) -> bool:
    low = value.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_set(value: str) -> frozenset[str]:
    return frozenset(part.strip() for part in value.split(",") if part.strip())


def build_config(
    file_values: Optional[dict[str, str]] = None,
    overrides: Optional[dict] = None,
) -> RunConfig:
    """Merge defaults, config-file strings, and typed flag overrides."""
    cfg = RunConfig()
    weight_patch: dict[str, float] = {}
    patch: dict = {}

    for key, raw in (file_values or {}).items():
        if key in _WEIGHT_KEYS:
            try:
                weight_patch[key] = float(raw)
            except ValueError:
                raise ConfigError(f"{key}: expected a number, got {raw!r}")
        elif key == "prompt":
            patch["prompt"] = raw
        elif key == "seed":
            patch["seed"] = int(raw)
        elif key == "fixtures":
            patch["fixtures"] = Path(raw)
        elif key == "out":
            patch["out"] = Path(raw)
        elif key == "restarts":
            patch["restarts"] = int(raw)
        elif key == "model":
            patch["model"] = raw
        elif key == "base_url":
            patch["base_url"] = raw
        elif key == "no_hierarchy":
            patch["no_hierarchy"] = _parse_bool(key, raw)
        elif key == "no_cleaning":
            patch["no_cleaning"] = _parse_bool(key, raw)
        elif key == "drop_costs":
            patch["drop_costs"] = _parse_set(raw)
        elif key == "layers":
            patch["layers"] = _parse_set(raw)
        elif key == "scale":
            patch["scale"] = float(raw)
        elif key == "palette":
            patch["palette"] = raw
        else:
            raise ConfigError(f"unknown config key {key!r}")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key in _WEIGHT_KEYS:
            weight_patch[key] = float(value)
        else:
            patch[key] = value

    if weight_patch:
        patch["weights"] = dataclasses.replace(
            patch.get("weights", cfg.weights), **weight_patch
        )
    return dataclasses.replace(cfg, **patch)
