"""Exact conditional prediction risk of the ridge estimator.

The estimator is computed through the kernel identity rather than the
normal equations, so the same code path covers ``n > p``, ``n < p``, and the
min-norm limit.  All per-``tau`` quantities reduce to diagonal operations on
the dataset's cached singular values, so a grid sweep costs one SVD plus a
cheap batched update per grid point.

With ``A = X X' + n tau I`` and ``v = (I - X' A^{-1} X) theta*``:

* out-sample bias    ``v' Sigma v``
* out-sample variance ``sigma^2 tr(A^{-1} X Sigma X' A^{-1})``
* in-sample bias     ``v' Sigmahat v`` with ``Sigmahat = X'X/n``
* in-sample variance ``sigma^2 tr(A^{-1} X Sigmahat X' A^{-1})``
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import Dataset, Scenario, sample_covariates
from .spectrum import SpectrumSpec

#: Relative rank threshold for allowing the min-norm limit (tau = 0): the
#: smallest eigenvalue of XX' must exceed this fraction of trace(XX')/n.
MIN_NORM_RANK_RTOL = 1e-10

#: Absolute slack below zero tolerated before clamping risk components.
COMPONENT_SLACK = 1e-12


@dataclass(frozen=True)
class RiskReport:
    """Exact bias/variance split of both prediction risks at one ridge level."""

    tau: float
    b_out: float
    v_out: float
    b_in: float
    v_in: float

    @property
    def mse_out(self) -> float:
        return self.b_out + self.v_out

    @property
    def mse_in(self) -> float:
        return self.b_in + self.v_in

    @property
    def valid(self) -> bool:
        return bool(np.isfinite(self.b_out))


@dataclass(frozen=True)
class SweepResult:
    """Risk reports over a ridge grid plus the grid minimizers."""

    grid: list[RiskReport]
    argmin_out: tuple[float, float]
    argmin_in: tuple[float, float]


@dataclass(frozen=True)
class McRiskEstimate:
    """Monte-Carlo estimates of both risks with standard errors."""

    mse_out: float
    se_out: float
    mse_in: float
    se_in: float


def _clamp(value: float) -> float:
    if np.isfinite(value) and value < -COMPONENT_SLACK:
        raise FloatingPointError(
            f"risk component {value:.3e} below the tolerated roundoff slack"
        )
    return max(value, 0.0)


def _check_tau(data: Dataset, tau: float) -> None:
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        s = data.s
        trace = float(np.sum(s**2))
        full_rank = s.size == data.n and float(np.min(s) ** 2) > MIN_NORM_RANK_RTOL * trace / data.n
        if not full_rank:
            raise ValueError(
                "min-norm limit ill-conditioned: XX' fails the rank threshold, use tau > 0"
            )


def ridge_fit(data: Dataset, tau: float) -> np.ndarray:
    """Ridge coefficients ``X'(XX' + n tau I)^{-1} Y`` via the cached SVD."""
    _check_tau(data, tau)
    s = data.s
    shrink = s / (s**2 + data.n * tau)
    return data.vt.T @ (shrink * (data.u.T @ data.Y))


class _SvdRiskEngine:
    """Per-dataset precomputation shared by every ``tau`` on a grid.

    ``sigma`` may be a :class:`SpectrumSpec`, a 1-D array of eigenvalues
    (diagonal fast path), or a dense PSD matrix (used by the rotation check).
    """

    def __init__(self, data: Dataset, sigma, theta_star: np.ndarray, noise_var: float):
        if isinstance(sigma, SpectrumSpec):
            sigma = sigma.eigenvalues
        sigma = np.asarray(sigma, dtype=float)
        theta = np.asarray(theta_star, dtype=float)
        self.data = data
        self.noise_var = float(noise_var)
        self.diagonal = sigma.ndim == 1
        self.sigma = sigma

        vt = data.vt
        self.w_coeffs = vt @ theta                      # V' theta*
        self.theta_perp = theta - vt.T @ self.w_coeffs  # component outside span(V)
        if self.diagonal:
            self.sv_diag = np.einsum("ij,ij,j->i", vt, vt, sigma)
            self.sigma_perp = sigma * self.theta_perp
        else:
            sv = sigma @ vt.T
            self.sv_diag = np.einsum("ij,ji->i", vt, sv)
            self.sigma_perp = sigma @ self.theta_perp
        self.cross = vt @ self.sigma_perp               # V' Sigma theta_perp
        self.perp_bias = float(self.theta_perp @ self.sigma_perp)

    def risks(self, taus: np.ndarray) -> tuple[np.ndarray, ...]:
        """Vectorized bias/variance components over a validated ``tau`` array."""
        data, n = self.data, self.data.n
        s2 = data.s**2
        denom = s2[:, None] + n * taus[None, :]
        g = (n * taus[None, :]) / denom            # k x G shrinkage toward prior
        shrunk = g * self.w_coeffs[:, None]

        if self.diagonal:
            vmat = data.vt.T @ shrunk              # p x G in-span part of v
            lam = self.sigma
            b_out = (
                np.einsum("j,jg,jg->g", lam, vmat, vmat)
                + 2.0 * (self.sigma_perp @ vmat)
                + self.perp_bias
            )
        else:
            m = data.vt @ (self.sigma @ data.vt.T)
            b_out = (
                np.einsum("ig,ij,jg->g", shrunk, m, shrunk)
                + 2.0 * (self.cross @ shrunk)
                + self.perp_bias
            )
        ratio = s2[:, None] / denom**2
        v_out = self.noise_var * (self.sv_diag @ ratio)
        b_in = np.sum(s2[:, None] * shrunk**2, axis=0) / n
        v_in = self.noise_var * np.sum(s2[:, None] * ratio, axis=0) / n
        return b_out, v_out, b_in, v_in

    def report(self, tau: float) -> RiskReport:
        b_out, v_out, b_in, v_in = (float(a[0]) for a in self.risks(np.array([tau])))
        return RiskReport(
            tau=float(tau),
            b_out=_clamp(b_out),
            v_out=_clamp(v_out),
            b_in=_clamp(b_in),
            v_in=_clamp(v_in),
        )


def exact_risk(
    data: Dataset, sigma, theta_star: np.ndarray, noise_var: float, tau: float
) -> RiskReport:
    """Exact conditional bias/variance of both risks at one ridge level."""
    _check_tau(data, tau)
    return _SvdRiskEngine(data, sigma, theta_star, noise_var).report(tau)


def sweep_tau(data: Dataset, scenario: Scenario, tau_grid) -> SweepResult:
    """Risk reports over a nondecreasing ridge grid, sharing one factorization.

    Grid points violating the min-norm precondition are kept as NaN reports
    and excluded from the minimizers; ties break toward the smaller ``tau``.
    """
    taus = np.asarray(tau_grid, dtype=float)
    if taus.size == 0:
        raise ValueError("tau grid must be nonempty")
    if np.any(np.diff(taus) < 0.0):
        raise ValueError("tau grid must be nondecreasing")

    engine = _SvdRiskEngine(
        data, scenario.spectrum, scenario.theta_star, scenario.noise_var
    )
    reports: list[RiskReport] = []
    for tau in taus:
        try:
            _check_tau(data, float(tau))
        except ValueError:
            reports.append(
                RiskReport(tau=float(tau), b_out=np.nan, v_out=np.nan, b_in=np.nan, v_in=np.nan)
            )
            continue
        reports.append(engine.report(float(tau)))

    valid = [r for r in reports if r.valid]
    if not valid:
        raise ValueError("all tau grid points violate the ridge preconditions")
    best_out = min(valid, key=lambda r: (r.mse_out, r.tau))
    best_in = min(valid, key=lambda r: (r.mse_in, r.tau))
    return SweepResult(
        grid=reports,
        argmin_out=(best_out.tau, best_out.mse_out),
        argmin_in=(best_in.tau, best_in.mse_in),
    )


def default_tau_grid(spec: SpectrumSpec, count: int = 61) -> np.ndarray:
    """Log grid from a tenth of the top tail eigenvalue to ten times the spike floor."""
    return np.geomspace(spec.lambda_d1 / 10.0, 10.0 * spec.lambda_d, count)


def mc_risk_oracle(
    data: Dataset,
    scenario: Scenario,
    tau: float,
    num_draws: int,
    rng: np.random.Generator,
    chunk: int = 4096,
) -> McRiskEstimate:
    """Monte-Carlo risk estimates from fresh noise (and fresh covariates).

    Integrates the defining expectations directly: each draw redraws the
    noise vector, and for the out-sample risk also a fresh covariate row from
    the scenario's law.  This path is the independent oracle for
    :func:`exact_risk` and deliberately shares none of its algebra beyond the
    estimator itself.
    """
    if num_draws < 100:
        raise ValueError("num_draws must be >= 100")
    _check_tau(data, tau)
    n = data.n
    s = data.s
    q = s / (s**2 + n * tau)
    g = 1.0 - q * s  # n*tau/(s^2+n*tau)
    engine = _SvdRiskEngine(
        data, scenario.spectrum, scenario.theta_star, scenario.noise_var
    )
    gw = g * engine.w_coeffs
    sd = np.sqrt(scenario.noise_var)

    out_vals = np.empty(num_draws)
    in_vals = np.empty(num_draws)
    done = 0
    while done < num_draws:
        c = min(chunk, num_draws - done)
        eps = rng.standard_normal((n, c)) * sd
        t = q[:, None] * (data.u.T @ eps) - gw[:, None]   # V'(thetahat - theta*)
        in_vals[done : done + c] = np.sum((s[:, None] * t) ** 2, axis=0) / n

        x0 = sample_covariates(scenario.spectrum, c, rng)
        proj = np.einsum("ck,kc->c", x0 @ data.vt.T, t) - x0 @ engine.theta_perp
        out_vals[done : done + c] = proj**2
        done += c

    def _mean_se(vals: np.ndarray) -> tuple[float, float]:
        return float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(vals.size))

    mse_out, se_out = _mean_se(out_vals)
    mse_in, se_in = _mean_se(in_vals)
    return McRiskEstimate(mse_out=mse_out, se_out=se_out, mse_in=mse_in, se_in=se_in)


def random_orthogonal(p: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-like orthogonal matrix from the QR of a Gaussian draw."""
    q, r = np.linalg.qr(rng.standard_normal((p, p)))
    return q * np.sign(np.diag(r))


def apply_orthogonal(
    data: Dataset, scenario: Scenario, q: np.ndarray
) -> tuple[Dataset, np.ndarray, np.ndarray]:
    """Rotated dataset, coefficients, and dense covariance for invariance checks."""
    x_rot = data.X @ q
    theta_rot = q.T @ scenario.theta_star
    sigma_rot = (q.T * scenario.spectrum.eigenvalues) @ q
    return Dataset.from_arrays(x_rot, data.Y.copy(), data.eps.copy()), theta_rot, sigma_rot


def risk_discrepancy(
    data: Dataset, scenario: Scenario, tau: float, q: np.ndarray
) -> float:
    """Max relative disagreement of the four components under a rotation ``q``."""
    base = exact_risk(
        data, scenario.spectrum, scenario.theta_star, scenario.noise_var, tau
    )
    data_rot, theta_rot, sigma_rot = apply_orthogonal(data, scenario, q)
    rot = exact_risk(data_rot, sigma_rot, theta_rot, scenario.noise_var, tau)
    worst = 0.0
    for a, b in (
        (base.b_out, rot.b_out),
        (base.v_out, rot.v_out),
        (base.b_in, rot.b_in),
        (base.v_in, rot.v_in),
    ):
        denom = max(abs(a), abs(b))
        if denom > 0.0:
            worst = max(worst, abs(a - b) / denom)
    return worst


def rotation_invariance_check(
    data: Dataset, scenario: Scenario, tau: float, orthogonal_seed: int
) -> float:
    """Max relative risk discrepancy under a random orthogonal transform."""
    q = random_orthogonal(data.p, np.random.default_rng(orthogonal_seed))
    return risk_discrepancy(data, scenario, tau, q)
