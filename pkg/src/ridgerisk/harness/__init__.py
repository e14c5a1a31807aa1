"""Experiment orchestration: configs, presets, figure runners, emission, checks."""

from .config import DEFAULT_SEED, ExperimentConfig, load_config, resolve_config
from .emit import (
    build_figure,
    emit_approx_csv,
    emit_check_csv,
    emit_csv,
    emit_plot,
    parse_csv,
)
from .checks import CheckReport, CheckResult, run_checks
from .presets import FIG1_PRESETS, FIG2_PRESETS
from .runner import (
    ApproxRow,
    FigureRow,
    FigureTable,
    run_approx,
    run_fig1,
    run_fig2,
    run_sweep,
    scenario_curves,
)

__all__ = [
    "DEFAULT_SEED",
    "ExperimentConfig",
    "load_config",
    "resolve_config",
    "emit_csv",
    "parse_csv",
    "emit_plot",
    "emit_check_csv",
    "emit_approx_csv",
    "build_figure",
    "CheckReport",
    "CheckResult",
    "run_checks",
    "FIG1_PRESETS",
    "FIG2_PRESETS",
    "ApproxRow",
    "FigureRow",
    "FigureTable",
    "run_approx",
    "run_fig1",
    "run_fig2",
    "run_sweep",
    "scenario_curves",
]
