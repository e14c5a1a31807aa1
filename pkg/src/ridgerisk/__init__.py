"""Exact and approximate prediction risk of ridge regression in
rotationally sparse high-dimensional linear models."""

from .spectrum import (
    Regime,
    SpectrumSpec,
    TerMetrics,
    make_three_level_spectrum,
    make_two_level_spectrum,
    sparsity_ratio,
    ter_metrics,
)
from .scenario import (
    Dataset,
    Scenario,
    generate_dataset,
    generate_theta,
    make_scenario,
    sample_sphere,
)
from .risk import (
    McRiskEstimate,
    RiskReport,
    SweepResult,
    default_tau_grid,
    exact_risk,
    mc_risk_oracle,
    ridge_fit,
    rotation_invariance_check,
    sweep_tau,
)
from .detequiv import (
    ApproxReport,
    CorollaryThresholds,
    OptimalOrderPrediction,
    OrderExpressions,
    approx_risk,
    dn_condition_thresholds,
    kappa,
    optimal_order_prediction,
    order_in,
    order_out,
    order_table,
    solve_alpha,
)

__version__ = "0.1.0"

__all__ = [
    "Regime",
    "SpectrumSpec",
    "TerMetrics",
    "make_two_level_spectrum",
    "make_three_level_spectrum",
    "sparsity_ratio",
    "ter_metrics",
    "Dataset",
    "Scenario",
    "generate_dataset",
    "generate_theta",
    "make_scenario",
    "sample_sphere",
    "McRiskEstimate",
    "RiskReport",
    "SweepResult",
    "default_tau_grid",
    "exact_risk",
    "mc_risk_oracle",
    "ridge_fit",
    "rotation_invariance_check",
    "sweep_tau",
    "ApproxReport",
    "CorollaryThresholds",
    "OptimalOrderPrediction",
    "OrderExpressions",
    "approx_risk",
    "dn_condition_thresholds",
    "kappa",
    "optimal_order_prediction",
    "order_in",
    "order_out",
    "order_table",
    "solve_alpha",
]
