"""Flat key=value experiment configuration.

One ``key = value`` pair per line, ``#`` starts a comment. Every knob of the
centralized/federated experiments and the bound sweeps lives here so runs
are reproducible from a single file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .ce import CEParams, DEFAULT_CLAMP, DEFAULT_THRESHOLD
from .datasets import PlantedSpec, preset_planted_spec
from .federation import DEFAULT_MAX_ROUNDS, DEFAULT_TAU1, DEFAULT_TAU2


class ConfigError(ValueError):
    """Invalid or missing configuration; the message names the field."""


_KNOWN_KEYS = {
    "mode",
    "dataset",
    "csv_path",
    "label_column",
    "bins",
    "preset",
    "planted_m",
    "planted_n",
    "planted_relevant",
    "planted_redundant",
    "planted_rule",
    "planted_modulus",
    "clients",
    "sample_count",
    "beta",
    "alpha",
    "alpha_mode",
    "clamp_eps",
    "tau1",
    "tau2",
    "rho",
    "threshold",
    "max_rounds",
    "draw_size",
    "seed",
    "out_dir",
    "record_bytes",
    "t_max",
    "trials",
}


@dataclass
class ExperimentConfig:
    mode: str = "federated"
    dataset: str = "planted"
    csv_path: Optional[str] = None
    label_column: str = "label"
    bins: int = 10
    preset: Optional[str] = None
    planted_m: int = 8
    planted_n: int = 1024
    planted_relevant: tuple[int, ...] = (0, 1)
    planted_redundant: dict[int, int] = field(default_factory=dict)
    planted_rule: str = "xor"
    planted_modulus: int = 2
    clients: int = 10
    sample_count: int = 100
    beta: float = 0.9
    alpha: float = 0.7
    alpha_mode: str = "fixed"
    clamp_eps: float = DEFAULT_CLAMP
    tau1: float = DEFAULT_TAU1
    tau2: float = DEFAULT_TAU2
    rho: float = 0.0
    threshold: float = DEFAULT_THRESHOLD
    max_rounds: int = DEFAULT_MAX_ROUNDS
    draw_size: Optional[int] = None
    seed: int = 0
    out_dir: str = "out"
    record_bytes: Optional[int] = None
    t_max: int = 5
    trials: int = 1000

    def validate(self) -> None:
        checks = [
            ("mode", self.mode in ("centralized", "federated")),
            ("dataset", self.dataset in ("planted", "csv", "preset")),
            ("beta", 0.0 < self.beta < 1.0),
            ("alpha", 0.0 < self.alpha <= 1.0),
            ("alpha_mode", self.alpha_mode in ("fixed", "schedule")),
            ("clamp_eps", 0.0 < self.clamp_eps < 0.5),
            ("tau1", 0.0 < self.tau1 <= 1.0),
            ("tau2", self.tau2 >= 0.0),
            ("rho", 0.0 <= self.rho < 1.0),
            ("threshold", 0.5 < self.threshold < 1.0),
            ("max_rounds", self.max_rounds >= 1),
            ("clients", self.clients >= 1),
            ("sample_count", self.sample_count >= 2),
            ("bins", self.bins >= 2),
            ("t_max", self.t_max >= 1),
            ("trials", self.trials >= 100),
        ]
        for name, ok in checks:
            if not ok:
                raise ConfigError(f"invalid value for {name}: {getattr(self, name)!r}")
        if self.dataset == "csv" and not self.csv_path:
            raise ConfigError("csv_path is required when dataset = csv")
        if self.dataset == "preset" and self.preset not in ("mav", "wesad"):
            raise ConfigError(f"invalid value for preset: {self.preset!r}")
        if self.draw_size is not None and self.draw_size < 1:
            raise ConfigError(f"invalid value for draw_size: {self.draw_size!r}")

    def ce_params(self) -> CEParams:
        return CEParams(
            sample_count=self.sample_count,
            beta=self.beta,
            alpha=self.alpha,
            alpha_mode=self.alpha_mode,
            clamp_eps=self.clamp_eps,
            rng_seed=self.seed,
        )

    def planted_spec(self) -> PlantedSpec:
        if self.dataset == "preset":
            assert self.preset is not None
            return preset_planted_spec(self.preset, rng_seed=self.seed)
        return PlantedSpec(
            m=self.planted_m,
            n=self.planted_n,
            relevant=self.planted_relevant,
            redundant=self.planted_redundant,
            label_rule=self.planted_rule,
            modulus=self.planted_modulus,
            rng_seed=self.seed,
        )


def _parse_index_list(value: str, key: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None


def _parse_index_map(value: str, key: str) -> dict[int, int]:
    mapping: dict[int, int] = {}
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            dup, src = part.split(":")
            mapping[int(dup)] = int(src)
        except ValueError:
            raise ConfigError(f"invalid value for {key}: {value!r}") from None
    return mapping


def parse_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a config file; raises :class:`ConfigError` on problems."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    config = ExperimentConfig()
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        _apply(config, key, value)
    config.validate()
    return config


def _apply(config: ExperimentConfig, key: str, value: str) -> None:
    int_keys = {
        "bins", "planted_m", "planted_n", "planted_modulus", "clients",
        "sample_count", "max_rounds", "draw_size", "seed", "record_bytes",
        "t_max", "trials",
    }
    float_keys = {"beta", "alpha", "clamp_eps", "tau1", "tau2", "rho", "threshold"}
    try:
        if key in int_keys:
            setattr(config, key, int(value))
        elif key in float_keys:
            setattr(config, key, float(value))
        elif key == "planted_relevant":
            config.planted_relevant = _parse_index_list(value, key)
        elif key == "planted_redundant":
            config.planted_redundant = _parse_index_map(value, key)
        else:
            setattr(config, key, value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None
