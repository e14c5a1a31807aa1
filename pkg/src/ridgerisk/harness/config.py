"""Experiment configuration: defaults, key=value files, and seed precedence.

Config files are flat ``key = value`` text with one section per concern and
optional per-preset sections (e.g. ``[fig1.c1]``) whose keys override the
base sections.  Every key is also settable from the command line; flag values
take precedence over the environment seed, which takes precedence over the
file.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace

DEFAULT_SEED = 20240
SEED_ENV_VAR = "RIDGE_RISK_SEED"

_SCENARIO_KEYS = {
    "d": int,
    "n": int,
    "p": int,
    "pattern": str,
    "rho": float,
    "mid_multiplier": int,
    "tail_factor": float,
    "sigma2": float,
    "seed": int,
}
_TAU_KEYS = {"tau_min": float, "tau_max": float, "tau_count": int, "tau_scale": str}
_RUN_KEYS = {"replicates": int, "multipliers": str, "threads": int}
_OUTPUT_KEYS = {"out": str, "plot": str, "debug_replicates": str}

_SECTION_OF = {
    **{k: "scenario" for k in _SCENARIO_KEYS},
    **{("tau_" + k if not k.startswith("tau_") else k): "tau" for k in _TAU_KEYS},
    **{k: "run" for k in _RUN_KEYS},
    **{k: "output" for k in _OUTPUT_KEYS},
}
_FILE_KEY = {"tau_min": "min", "tau_max": "max", "tau_count": "count", "tau_scale": "scale"}


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of one harness invocation.

    ``d``/``n``/``p``/``rho`` left as ``None`` are filled by the selected
    preset (or by the standalone-sweep defaults).
    """

    d: int | None = None
    n: int | None = None
    p: int | None = None
    pattern: str = "two_level"
    rho: float | None = None
    mid_multiplier: int = 10
    tail_factor: float = 0.02
    sigma2: float = 1.0
    seed: int = DEFAULT_SEED
    tau_min: float | None = None
    tau_max: float | None = None
    tau_count: int = 61
    tau_scale: str = "log"
    replicates: int = 10
    multipliers: tuple[float, ...] = (0.1, 1.0, 10.0)
    threads: int = 1
    out: str | None = None
    plot: str | None = None
    debug_replicates: str | None = None

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.tau_count < 1:
            raise ValueError("tau grid count must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.tau_scale not in ("log", "linear"):
            raise ValueError("tau_scale must be 'log' or 'linear'")
        if self.pattern not in ("two_level", "three_level"):
            raise ValueError("pattern must be 'two_level' or 'three_level'")
        if self.d is not None and self.p is not None and not 0 < self.d < self.p:
            raise ValueError("need 0 < d < p")
        for name in ("d", "n", "p"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be positive")
        if not self.multipliers:
            raise ValueError("multipliers must be nonempty")

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def parse_multipliers(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(" ", "").split(",") if tok)


def load_config(path: str) -> dict[str, dict[str, str]]:
    """Raw sections of a key=value config file."""
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    return {name: dict(parser.items(name)) for name in parser.sections()}


def _coerce(key: str, raw: str):
    for table in (_SCENARIO_KEYS, _RUN_KEYS, _OUTPUT_KEYS):
        if key in table:
            if key == "multipliers":
                return parse_multipliers(raw)
            return table[key](raw)
    if key in _TAU_KEYS:
        return _TAU_KEYS[key](raw)
    raise KeyError(f"unknown config key: {key}")


def config_from_sections(
    sections: dict[str, dict[str, str]], preset_section: str | None = None
) -> dict:
    """Flatten file sections (plus a preset-specific section) into kwargs."""
    out: dict = {}
    for cfg_key, section in _SECTION_OF.items():
        file_key = _FILE_KEY.get(cfg_key, cfg_key)
        if section in sections and file_key in sections[section]:
            out[cfg_key] = _coerce(cfg_key, sections[section][file_key])
    if preset_section and preset_section in sections:
        for file_key, raw in sections[preset_section].items():
            cfg_key = {v: k for k, v in _FILE_KEY.items()}.get(file_key, file_key)
            out[cfg_key] = _coerce(cfg_key, raw)
    return out


def resolve_config(
    flags: dict,
    config_path: str | None = None,
    preset_section: str | None = None,
    env: dict | None = None,
) -> ExperimentConfig:
    """Merge defaults, file, environment seed, and flags (highest wins)."""
    env = os.environ if env is None else env
    kwargs: dict = {}
    if config_path:
        kwargs.update(config_from_sections(load_config(config_path), preset_section))
    if SEED_ENV_VAR in env and flags.get("seed") is None:
        kwargs["seed"] = int(env[SEED_ENV_VAR])
    for key, value in flags.items():
        if value is not None:
            kwargs[key] = value
    valid = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in kwargs.items() if k in valid})
