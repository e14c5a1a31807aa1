"""Figure runners: replicate averaging over ridge sweeps.

Replicates are generated from per-index seed streams and may be evaluated
concurrently; results are gathered and reduced in replicate order, so the
emitted tables are identical for any thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..detequiv import approx_risk, dn_condition_thresholds, optimal_order_prediction
from ..risk import sweep_tau
from ..scenario import Scenario, generate_dataset, make_scenario
from ..spectrum import ter_metrics
from .config import ExperimentConfig
from .presets import FIG1_PRESETS, FIG2_PRESETS, build_spectrum, fig1_rho, fig2_rho


@dataclass(frozen=True)
class FigureRow:
    setting: str
    multiplier: float
    tau: float
    mse_out: float
    mse_out_se: float
    mse_in: float
    mse_in_se: float
    norm_out: float
    norm_in: float
    is_argmin_out: bool
    is_argmin_in: bool


@dataclass
class FigureTable:
    rows: list[FigureRow]
    metadata: dict[str, str] = field(default_factory=dict)

    def multipliers(self) -> list[float]:
        seen: list[float] = []
        for row in self.rows:
            if row.multiplier not in seen:
                seen.append(row.multiplier)
        return seen


def tau_grid_for(config: ExperimentConfig, spec) -> np.ndarray:
    """Configured ridge grid, defaulting to the spectrum-adapted log grid."""
    lo = config.tau_min if config.tau_min is not None else spec.lambda_d1 / 10.0
    hi = config.tau_max if config.tau_max is not None else 10.0 * spec.lambda_d
    if config.tau_count == 1:
        return np.array([lo])
    if config.tau_scale == "linear":
        return np.linspace(lo, hi, config.tau_count)
    return np.geomspace(lo, hi, config.tau_count)


def scenario_curves(
    scenario: Scenario, taus: np.ndarray, replicates: int, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Per-replicate risk curves, shape (replicates, grid)."""

    def one(index: int) -> tuple[np.ndarray, np.ndarray]:
        data = generate_dataset(scenario, index)
        sweep = sweep_tau(data, scenario, taus)
        out = np.array([r.mse_out for r in sweep.grid])
        inn = np.array([r.mse_in for r in sweep.grid])
        return out, inn

    results: list[tuple[np.ndarray, np.ndarray] | None] = [None] * replicates
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {pool.submit(one, i): i for i in range(replicates)}
            for future, index in futures.items():
                results[index] = future.result()
    else:
        for i in range(replicates):
            results[i] = one(i)
    out_curves = np.stack([r[0] for r in results])
    in_curves = np.stack([r[1] for r in results])
    return out_curves, in_curves


def _aggregate_rows(
    setting: str,
    multiplier: float,
    taus: np.ndarray,
    out_curves: np.ndarray,
    in_curves: np.ndarray,
    d: int,
    n: int,
) -> list[FigureRow]:
    reps = out_curves.shape[0]
    out_mean = out_curves.mean(axis=0)
    in_mean = in_curves.mean(axis=0)
    if reps > 1:
        out_se = out_curves.std(axis=0, ddof=1) / np.sqrt(reps)
        in_se = in_curves.std(axis=0, ddof=1) / np.sqrt(reps)
    else:
        out_se = np.zeros_like(out_mean)
        in_se = np.zeros_like(in_mean)
    argmin_out = int(np.nanargmin(out_mean))
    argmin_in = int(np.nanargmin(in_mean))
    scale = n / d
    return [
        FigureRow(
            setting=setting,
            multiplier=multiplier,
            tau=float(taus[i]),
            mse_out=float(out_mean[i]),
            mse_out_se=float(out_se[i]),
            mse_in=float(in_mean[i]),
            mse_in_se=float(in_se[i]),
            norm_out=float(out_mean[i] * scale),
            norm_in=float(in_mean[i] * scale),
            is_argmin_out=(i == argmin_out),
            is_argmin_in=(i == argmin_in),
        )
        for i in range(taus.size)
    ]


def _emit_debug_replicates(
    config: ExperimentConfig,
    tag: str,
    taus: np.ndarray,
    out_curves: np.ndarray,
    in_curves: np.ndarray,
    d: int,
    n: int,
) -> None:
    """One single-replicate CSV per run, for aggregation cross-checks."""
    if not config.debug_replicates:
        return
    import os

    from .emit import emit_csv

    os.makedirs(config.debug_replicates, exist_ok=True)
    for rep in range(out_curves.shape[0]):
        rows = _aggregate_rows(
            tag, 1.0, taus, out_curves[rep : rep + 1], in_curves[rep : rep + 1], d, n
        )
        table = FigureTable(rows=rows, metadata={"replicate": str(rep), "tag": tag})
        emit_csv(table, f"{config.debug_replicates}/{tag}_r{rep}.csv")


def run_sweep(config: ExperimentConfig) -> FigureTable:
    """One scenario over the configured ridge grid, averaged over replicates."""
    spec = build_spectrum(config, config.d, config.p, config.rho)
    scenario = make_scenario(spec, config.n, config.sigma2, config.seed)
    taus = tau_grid_for(config, spec)
    out_curves, in_curves = scenario_curves(
        scenario, taus, config.replicates, config.threads
    )
    rows = _aggregate_rows(
        "sweep", 1.0, taus, out_curves, in_curves, config.d, config.n
    )
    _emit_debug_replicates(config, "sweep", taus, out_curves, in_curves, config.d, config.n)
    meta = {
        "figure": "sweep",
        "d": str(config.d),
        "n": str(config.n),
        "p": str(config.p),
        "rho": repr(config.rho),
        "replicates": str(config.replicates),
        "seed": str(config.seed),
        "sigma2": repr(config.sigma2),
    }
    return FigureTable(rows=rows, metadata=meta)


@dataclass(frozen=True)
class ApproxRow:
    tau: float
    alpha: float
    mse_out: float
    mse_out_se: float
    mse_in: float
    mse_in_se: float
    mse_out_hat: float
    mse_in_hat: float


def run_approx(config: ExperimentConfig) -> tuple[list[ApproxRow], dict[str, str]]:
    """Exact risks (replicate-averaged) next to the approximation formulas."""
    spec = build_spectrum(config, config.d, config.p, config.rho)
    scenario = make_scenario(spec, config.n, config.sigma2, config.seed)
    taus = tau_grid_for(config, spec)
    taus = taus[taus > 0.0]
    out_curves, in_curves = scenario_curves(
        scenario, taus, config.replicates, config.threads
    )
    reps = out_curves.shape[0]
    out_mean, in_mean = out_curves.mean(axis=0), in_curves.mean(axis=0)
    if reps > 1:
        out_se = out_curves.std(axis=0, ddof=1) / np.sqrt(reps)
        in_se = in_curves.std(axis=0, ddof=1) / np.sqrt(reps)
    else:
        out_se = np.zeros_like(out_mean)
        in_se = np.zeros_like(in_mean)
    rows = []
    for i, tau in enumerate(taus):
        report = approx_risk(spec, scenario.theta_star, config.n, config.sigma2, float(tau))
        rows.append(
            ApproxRow(
                tau=float(tau),
                alpha=report.alpha,
                mse_out=float(out_mean[i]),
                mse_out_se=float(out_se[i]),
                mse_in=float(in_mean[i]),
                mse_in_se=float(in_se[i]),
                mse_out_hat=report.mse_out_hat,
                mse_in_hat=report.mse_in_hat,
            )
        )
    meta = {
        "figure": "approx",
        "d": str(config.d),
        "n": str(config.n),
        "p": str(config.p),
        "rho": repr(config.rho),
        "replicates": str(config.replicates),
        "seed": str(config.seed),
        "sigma2": repr(config.sigma2),
    }
    return rows, meta


def run_fig1(config: ExperimentConfig, corollary: str) -> FigureTable:
    """Threshold study: sweep each multiplier of one corollary preset."""
    if corollary not in FIG1_PRESETS:
        raise ValueError(f"unknown corollary preset: {corollary!r}")
    preset = FIG1_PRESETS[corollary]
    d = config.d if config.d is not None else preset.d
    n = config.n if config.n is not None else preset.n
    p = config.p if config.p is not None else preset.p

    rows: list[FigureRow] = []
    meta: dict[str, str] = {
        "figure": "fig1",
        "corollary": preset.name,
        "target": preset.target,
        "d": str(d),
        "n": str(n),
        "p": str(p),
        "replicates": str(config.replicates),
        "seed": str(config.seed),
        "sigma2": repr(config.sigma2),
    }
    for multiplier in config.multipliers:
        rho = fig1_rho(config, preset, multiplier)
        spec = build_spectrum(config, d, p, rho)
        scenario = make_scenario(spec, n, config.sigma2, config.seed)
        taus = tau_grid_for(config, spec)
        out_curves, in_curves = scenario_curves(
            scenario, taus, config.replicates, config.threads
        )
        rows.extend(
            _aggregate_rows(preset.name, multiplier, taus, out_curves, in_curves, d, n)
        )
        _emit_debug_replicates(
            config, f"fig1_{preset.name}_m{multiplier:g}", taus, out_curves, in_curves, d, n
        )
        thresholds = dn_condition_thresholds(spec, n)
        window = getattr(thresholds, preset.window)
        meta[f"rho_m{multiplier:g}"] = repr(rho)
        meta[f"window_m{multiplier:g}"] = f"{window[0]:.6g}..{window[1]:.6g}"
    metrics = reference_metrics_line(config, d, n, p)
    meta.update(metrics)
    return FigureTable(rows=rows, metadata=meta)


def reference_metrics_line(
    config: ExperimentConfig, d: int, n: int, p: int
) -> dict[str, str]:
    spec = build_spectrum(config, d, p, 0.5)
    m = ter_metrics(spec, n)
    return {
        "r_d_sigma": repr(m.r_d_sigma),
        "r_d_sigma_sq": repr(m.r_d_sigma_sq),
        "regime": m.regime.value,
    }


def run_fig2(config: ExperimentConfig, setting: str) -> FigureTable:
    """Optimal-risk-gap study: one setting, single gap value."""
    if setting not in FIG2_PRESETS:
        raise ValueError(f"unknown setting preset: {setting!r}")
    preset = FIG2_PRESETS[setting]
    config = config.with_overrides(pattern=preset.pattern)
    d = config.d if config.d is not None else preset.d
    n = config.n if config.n is not None else preset.n
    p = config.p if config.p is not None else preset.p

    rho = fig2_rho(config, preset)
    spec = build_spectrum(config, d, p, rho)
    scenario = make_scenario(spec, n, config.sigma2, config.seed)
    taus = tau_grid_for(config, spec)
    out_curves, in_curves = scenario_curves(
        scenario, taus, config.replicates, config.threads
    )
    rows = _aggregate_rows(f"fig2_{preset.name}", 1.0, taus, out_curves, in_curves, d, n)
    _emit_debug_replicates(config, f"fig2_{preset.name}", taus, out_curves, in_curves, d, n)

    out_star = min(row.mse_out for row in rows)
    in_star = min(row.mse_in for row in rows)
    prediction = optimal_order_prediction(
        spec, scenario.theta_star, n, config.sigma2, preset.regime
    )
    m = ter_metrics(spec, n)
    meta = {
        "figure": "fig2",
        "setting": preset.name,
        "pattern": preset.pattern,
        "d": str(d),
        "n": str(n),
        "p": str(p),
        "replicates": str(config.replicates),
        "seed": str(config.seed),
        "sigma2": repr(config.sigma2),
        "rho": repr(rho),
        "gap_ratio": repr(rho),
        "r_d_sigma": repr(m.r_d_sigma),
        "r_d_sigma_sq": repr(m.r_d_sigma_sq),
        "n_over_r_d_sigma_sq": repr(n / m.r_d_sigma_sq),
        "mse_out_star": repr(out_star),
        "mse_in_star": repr(in_star),
        "measured_ratio_in_over_out": repr(in_star / out_star),
        "predicted_ratio_in_over_out": repr(prediction.ratio_in_over_out),
        "predicted_tau_out": repr(prediction.tau_out),
        "predicted_tau_in": repr(prediction.tau_in),
    }
    return FigureTable(rows=rows, metadata=meta)
