"""Oracle cross-check suites: each suite measures a discrepancy against an
independent route to the same quantity and reports it next to its tolerance.

Failures are report entries, not exceptions, so a corrupted tolerance can be
used as a negative control of the harness itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..detequiv import approx_risk, fixed_point_residual, solve_alpha
from ..risk import exact_risk, mc_risk_oracle, ridge_fit, rotation_invariance_check, sweep_tau
from ..scenario import generate_dataset, make_scenario
from ..spectrum import SpectrumSpec, make_two_level_spectrum
from .config import DEFAULT_SEED

DEFAULT_TOLERANCES: dict[str, float] = {
    "kernel_identity": 1e-8,
    "mc_vs_exact": 3.0,  # in Monte-Carlo standard-error units
    "rotation_invariance": 1e-8,
    "alpha_golden_ratio": 1e-10,
    "alpha_residual": 1e-12,
    "v_in_alternate_form": 1e-8,
    "variance_monotonicity": 1e-12,
}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    measured: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class CheckReport:
    seed: int
    results: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)


def _normal_equations(data, tau: float) -> np.ndarray:
    xtx = data.X.T @ data.X
    return np.linalg.solve(xtx + data.n * tau * np.eye(data.p), data.X.T @ data.Y)


def _kernel_identity(seed: int) -> float:
    worst = 0.0
    for n, p in ((20, 10), (10, 20), (50, 50)):
        spec = make_two_level_spectrum(max(1, p // 4), p, 0.5)
        scenario = make_scenario(spec, n, 1.0, seed)
        data = generate_dataset(scenario, 0)
        for tau in (1e-3, 1.0, 10.0):
            kernel = ridge_fit(data, tau)
            normal = _normal_equations(data, tau)
            worst = max(
                worst, float(np.linalg.norm(kernel - normal) / np.linalg.norm(normal))
            )
    return worst


def _mc_vs_exact(seed: int) -> float:
    spec = make_two_level_spectrum(2, 5, 0.5)
    scenario = make_scenario(spec, 8, 1.0, seed)
    data = generate_dataset(scenario, 0)
    tau = 0.7
    exact = exact_risk(data, spec, scenario.theta_star, 1.0, tau)
    mc = mc_risk_oracle(data, scenario, tau, 100_000, np.random.default_rng(seed + 1))
    dev_out = abs(exact.mse_out - mc.mse_out) / mc.se_out
    dev_in = abs(exact.mse_in - mc.mse_in) / mc.se_in
    return max(dev_out, dev_in)


def _rotation(seed: int) -> float:
    spec = make_two_level_spectrum(3, 12, 0.4)
    scenario = make_scenario(spec, 30, 1.0, seed)
    data = generate_dataset(scenario, 0)
    return rotation_invariance_check(data, scenario, tau=0.5, orthogonal_seed=seed + 2)


def _alpha_golden(seed: int) -> float:
    del seed
    alpha = solve_alpha(np.array([1.0, 1.0]), n=2, tau=1.0)
    return abs(alpha - (1.0 + np.sqrt(5.0)) / 2.0)


def _alpha_residual(seed: int) -> float:
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for _ in range(100):
        p = int(rng.integers(2, 40))
        lam = np.sort(rng.uniform(0.05, 4.0, size=p))[::-1]
        n = int(rng.integers(2, 60))
        tau = float(rng.uniform(0.01, 5.0))
        alpha = solve_alpha(lam, n, tau)
        worst = max(worst, abs(fixed_point_residual(alpha, lam, n, tau)))
    return worst


def _v_in_alternate(seed: int) -> float:
    rng = np.random.default_rng(seed + 4)
    worst = 0.0
    for _ in range(100):
        p = int(rng.integers(3, 50))
        d = int(rng.integers(1, p))
        lam = np.sort(rng.uniform(0.05, 3.0, size=p))[::-1]
        spec = SpectrumSpec(eigenvalues=lam, spike_dim=d)
        theta = rng.standard_normal(p)
        n = int(rng.integers(3, 80))
        tau = float(rng.uniform(0.05, 3.0))
        report = approx_risk(spec, theta, n, float(rng.uniform(0.1, 2.0)), tau)
        denom = max(abs(report.v_in_hat), abs(report.v_in_hat_alt))
        if denom > 0.0:
            worst = max(worst, abs(report.v_in_hat - report.v_in_hat_alt) / denom)
    return worst


def _variance_monotonic(seed: int) -> float:
    worst = -np.inf
    for offset, (d, n, p, rho) in enumerate(
        ((2, 40, 30, 0.3), (3, 25, 60, 0.2), (5, 80, 80, 0.5))
    ):
        spec = make_two_level_spectrum(d, p, rho)
        scenario = make_scenario(spec, n, 1.0, seed + offset)
        data = generate_dataset(scenario, 0)
        taus = np.geomspace(spec.lambda_d1 / 10.0, 10.0 * spec.lambda_d, 61)
        sweep = sweep_tau(data, scenario, taus)
        v_out = np.array([r.v_out for r in sweep.grid])
        worst = max(worst, float(np.max(np.diff(v_out))))
    return worst


_SUITES = {
    "kernel_identity": _kernel_identity,
    "mc_vs_exact": _mc_vs_exact,
    "rotation_invariance": _rotation,
    "alpha_golden_ratio": _alpha_golden,
    "alpha_residual": _alpha_residual,
    "v_in_alternate_form": _v_in_alternate,
    "variance_monotonicity": _variance_monotonic,
}


def run_checks(
    seed: int = DEFAULT_SEED, tolerances: dict[str, float] | None = None
) -> CheckReport:
    """Execute every oracle suite and report measured value vs tolerance."""
    tols = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tols)
        if unknown:
            raise ValueError(f"unknown check suites: {sorted(unknown)}")
        tols.update(tolerances)
    results = []
    for suite, runner in _SUITES.items():
        measured = float(runner(seed))
        tolerance = tols[suite]
        results.append(
            CheckResult(
                suite=suite,
                measured=measured,
                tolerance=tolerance,
                passed=measured <= tolerance,
            )
        )
    return CheckReport(seed=seed, results=tuple(results))
