"""Experiment presets for the two numerical studies.

The first study sweeps the spike-gap ratio around each corollary's
threshold with multipliers {0.1, 1, 10} and asks when the optimal risk
reaches ``d/n`` scale.  The second compares the optimal in-sample and
out-sample risks in three settings where they separate.

Threshold expressions depend only on the spectrum shape (the tail levels
scale jointly with ``rho``), so each preset evaluates them on a reference
shape before choosing ``rho``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..spectrum import (
    Regime,
    SpectrumSpec,
    make_three_level_spectrum,
    make_two_level_spectrum,
    ter_metrics,
)
from .config import ExperimentConfig

_REFERENCE_RHO = 0.5


@dataclass(frozen=True)
class Fig1Preset:
    """One corollary study: dimensions, threshold rule, and target risk."""

    name: str
    d: int
    n: int
    p: int
    threshold: Callable[[float, float, int, int], float]  # (r1, r2, d, n) -> rho
    target: str  # which risk the corollary bounds: "out" or "in"
    window: str  # CorollaryThresholds window attribute for metadata


FIG1_PRESETS: dict[str, Fig1Preset] = {
    "c1": Fig1Preset(
        name="c1",
        d=5,
        n=1500,
        p=1500,
        threshold=lambda r1, r2, d, n: np.sqrt(d / n) * np.sqrt(d / r2),
        target="out",
        window="window_out_small",
    ),
    "c2": Fig1Preset(
        name="c2",
        d=5,
        n=1500,
        p=1500,
        threshold=lambda r1, r2, d, n: d / r1,
        target="in",
        window="window_in_small",
    ),
    "c3a": Fig1Preset(
        name="c3a",
        d=5,
        n=50,
        p=1500,
        threshold=lambda r1, r2, d, n: np.sqrt(n * d) / r1,
        target="out",
        window="window_out_large",
    ),
    "c3b": Fig1Preset(
        name="c3b",
        d=5,
        n=150,
        p=1500,
        threshold=lambda r1, r2, d, n: d / np.sqrt(n * r2),
        target="out",
        window="window_out_large",
    ),
    "c4": Fig1Preset(
        name="c4",
        d=5,
        n=150,
        p=1500,
        threshold=lambda r1, r2, d, n: d / r1,
        target="in",
        window="window_in_large",
    ),
}


@dataclass(frozen=True)
class Fig2Preset:
    """One optimal-risk-gap setting: dimensions, spectrum shape, gap rule."""

    name: str
    d: int
    n: int
    p: int
    pattern: str  # "two_level" or "three_level"
    rho: Callable[[float, float, int, int], float]
    regime: Regime


def _gap_small_regime(r1: float, r2: float, d: int, n: int) -> float:
    return (d / n) * np.sqrt(n / r2)


def _gap_large_regime(r1: float, r2: float, d: int, n: int) -> float:
    disc = n * np.sqrt(r2) / (np.sqrt(d) * r1)
    return d / np.sqrt(n * r2) * min(1.0, disc)


FIG2_PRESETS: dict[str, Fig2Preset] = {
    "i": Fig2Preset(
        name="i", d=2, n=300, p=15000, pattern="three_level",
        rho=_gap_small_regime, regime=Regime.SMALL_MODERATE,
    ),
    "ii": Fig2Preset(
        name="ii", d=2, n=150, p=15000, pattern="two_level",
        rho=_gap_large_regime, regime=Regime.LARGE,
    ),
    "iii": Fig2Preset(
        name="iii", d=2, n=300, p=15000, pattern="two_level",
        rho=_gap_large_regime, regime=Regime.LARGE,
    ),
}


def build_spectrum(config: ExperimentConfig, d: int, p: int, rho: float) -> SpectrumSpec:
    if config.pattern == "three_level":
        return make_three_level_spectrum(
            d, p, rho, config.mid_multiplier, config.tail_factor
        )
    return make_two_level_spectrum(d, p, rho)


def reference_shape_metrics(config: ExperimentConfig, d: int, n: int, p: int):
    """Tail-rank quantities of the configured shape (independent of ``rho``)."""
    spec = build_spectrum(config, d, p, _REFERENCE_RHO)
    return ter_metrics(spec, n)


def fig1_rho(config: ExperimentConfig, preset: Fig1Preset, multiplier: float) -> float:
    """Spike-gap ratio for one multiplier of a corollary study."""
    d = config.d if config.d is not None else preset.d
    n = config.n if config.n is not None else preset.n
    p = config.p if config.p is not None else preset.p
    m = reference_shape_metrics(config, d, n, p)
    rho = multiplier * preset.threshold(m.r_d_sigma, m.r_d_sigma_sq, d, n)
    if not 0.0 < rho < 1.0:
        raise ValueError(
            f"invalid preset override: multiplier {multiplier} gives rho={rho:.4g} "
            "outside (0, 1)"
        )
    return float(rho)


def fig2_rho(config: ExperimentConfig, preset: Fig2Preset) -> float:
    d = config.d if config.d is not None else preset.d
    n = config.n if config.n is not None else preset.n
    p = config.p if config.p is not None else preset.p
    m = reference_shape_metrics(config, d, n, p)
    rho = preset.rho(m.r_d_sigma, m.r_d_sigma_sq, d, n)
    if not 0.0 < rho < 1.0:
        raise ValueError(f"invalid preset override: rho={rho:.4g} outside (0, 1)")
    return float(rho)
