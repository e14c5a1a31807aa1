"""Deterministic equivalents and constant-free order skeletons.

The random conditional risks concentrate, as ``n`` and ``p`` grow
proportionally, around closed-form expressions driven by a scalar fixed
point ``alpha > 1`` solving

    1/alpha = 1 - (1/n) * sum_j lambda_j / (lambda_j + alpha * tau).

This module solves that fixed point, evaluates the resulting bias/variance
approximation formulas (including an algebraically equal alternate form of
the in-sample variance, kept as a cross-check), and evaluates the
constant-free order expressions used for ratio-based verification of the
two tail-effective-rank regimes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .spectrum import Regime, SpectrumSpec, spiked_inv_norm_sq, ter_metrics

#: Required residual of the fixed-point solve.
ALPHA_RESIDUAL_TOL = 1e-12

#: Lower bound on the common denominator of the approximation formulas.
DENOMINATOR_FLOOR = 1e-8


class TauRangeWarning(UserWarning):
    """The requested ridge level lies outside the stated validity range."""


def _eigenvalues(spectrum) -> np.ndarray:
    if isinstance(spectrum, SpectrumSpec):
        return spectrum.eigenvalues
    return np.asarray(spectrum, dtype=float)


def fixed_point_residual(alpha: float, spectrum, n: int, tau: float) -> float:
    """Defect of ``alpha`` in the fixed-point equation (zero at the solution)."""
    lam = _eigenvalues(spectrum)
    return 1.0 / alpha - 1.0 + float(np.sum(lam / (lam + alpha * tau))) / n


def solve_alpha(spectrum, n: int, tau: float) -> float:
    """Unique root ``alpha > 1`` of the fixed-point equation.

    The residual is strictly decreasing in ``alpha``, positive at 1 and
    tending to -1, so bisection with geometric bracket growth always
    converges; the returned root has residual at most 1e-12.
    """
    if tau <= 0.0:
        raise ValueError("fixed point defined only for positive tau")
    lam = _eigenvalues(spectrum)

    def h(alpha: float) -> float:
        return 1.0 / alpha - 1.0 + float(np.sum(lam / (lam + alpha * tau))) / n

    lo, hi = 1.0 + 1e-12, 2.0
    if h(lo) <= 0.0:
        # Root pinned against 1 (huge tau); shrink the lower bracket instead.
        lo = np.nextafter(1.0, 2.0)
    while h(hi) > 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise FloatingPointError("fixed-point bracket expansion failed")

    best, best_res = lo, abs(h(lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = h(mid)
        if abs(val) < best_res:
            best, best_res = mid, abs(val)
        if val > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 2.0 * np.finfo(float).eps * mid and best_res <= ALPHA_RESIDUAL_TOL:
            break
    if best_res > ALPHA_RESIDUAL_TOL:
        raise FloatingPointError(
            f"fixed-point residual {best_res:.3e} above {ALPHA_RESIDUAL_TOL}"
        )
    return best


@dataclass(frozen=True)
class ApproxReport:
    """Fixed point and approximation-formula values at one ridge level."""

    tau: float
    alpha: float
    b_out_hat: float
    v_out_hat: float
    b_in_hat: float
    v_in_hat: float
    v_in_hat_alt: float

    @property
    def mse_out_hat(self) -> float:
        return self.b_out_hat + self.v_out_hat

    @property
    def mse_in_hat(self) -> float:
        return self.b_in_hat + self.v_in_hat


def approx_risk(
    spectrum: SpectrumSpec, theta_star: np.ndarray, n: int, noise_var: float, tau: float
) -> ApproxReport:
    """Deterministic-equivalent bias/variance approximations at one ridge level.

    The in-sample variance is evaluated twice, through two algebraically
    equal expressions, and both values are reported so downstream checks can
    confirm the implementation.
    """
    lam = _eigenvalues(spectrum)
    theta = np.asarray(theta_star, dtype=float)
    alpha = solve_alpha(spectrum, n, tau)
    at = alpha * tau
    shr = lam / (lam + at)
    s2 = float(np.sum(shr**2)) / n
    denom = 1.0 - s2
    if denom <= DENOMINATOR_FLOOR:
        raise ValueError(
            "deterministic equivalent degenerate: tau too small for the formulas"
        )
    # Signal term: plain coordinate sum.  (Scaling it by 1/n, as one might
    # guess from the variance terms, breaks the match with the exact risk by
    # a factor of n; the equivalent Stieltjes-transform form confirms the
    # unscaled sum.)
    signal = at**2 * float(np.sum(theta**2 * lam / (lam + at) ** 2))

    b_out = signal / denom
    v_out = noise_var * s2 / denom
    b_in = b_out / alpha**2
    v_in = noise_var * (1.0 - 2.0 / alpha + (1.0 / alpha**2) / denom)
    v_in_alt = noise_var * ((1.0 - 1.0 / alpha) ** 2 + (s2 / denom) / alpha**2)
    return ApproxReport(
        tau=tau,
        alpha=alpha,
        b_out_hat=b_out,
        v_out_hat=v_out,
        b_in_hat=b_in,
        v_in_hat=v_in,
        v_in_hat_alt=v_in_alt,
    )


def _effective_tau(spec: SpectrumSpec, n: int, tau: float, regime: Regime) -> float:
    if regime is Regime.SMALL_MODERATE:
        return tau
    r1 = ter_metrics(spec, n).r_d_sigma
    return tau + spec.lambda_d1 * r1 / n


def _warn_range(spec: SpectrumSpec, n: int, tau: float, regime: Regime) -> None:
    tau_eff = _effective_tau(spec, n, tau, regime)
    if regime is Regime.SMALL_MODERATE:
        ok = spec.lambda_d1 <= tau <= spec.lambda_d
    else:
        ok = tau_eff <= spec.lambda_d
    if not ok:
        warnings.warn(
            f"tau={tau:.4g} outside the stated range for regime {regime.value}",
            TauRangeWarning,
            stacklevel=3,
        )


def order_out(
    spec: SpectrumSpec,
    theta_star: np.ndarray,
    n: int,
    noise_var: float,
    tau: float,
    regime: Regime,
) -> tuple[float, float]:
    """Out-sample (bias, variance) order skeletons for the requested regime."""
    _warn_range(spec, n, tau, regime)
    tau_eff = _effective_tau(spec, n, tau, regime)
    r2 = ter_metrics(spec, n).r_d_sigma_sq
    d = spec.spike_dim
    bias = spiked_inv_norm_sq(spec, theta_star) * tau_eff**2
    if noise_var == 0.0:
        return bias, 0.0
    var = noise_var * (d / n + (spec.lambda_d1**2 / tau_eff**2) * r2 / n)
    return bias, var


def order_in(
    spec: SpectrumSpec,
    theta_star: np.ndarray,
    n: int,
    noise_var: float,
    tau: float,
    regime: Regime,
) -> tuple[float, float, float]:
    """In-sample (bias upper, variance upper, variance lower) skeletons.

    The two variance skeletons differ only in the small/moderate regime,
    through the tail rank entering linearly (upper) versus squared over ``n``
    (lower); in the large regime they coincide.
    """
    _warn_range(spec, n, tau, regime)
    tau_eff = _effective_tau(spec, n, tau, regime)
    r1 = ter_metrics(spec, n).r_d_sigma
    d = spec.spike_dim
    bias = spiked_inv_norm_sq(spec, theta_star) * tau_eff**2
    if noise_var == 0.0:
        return bias, 0.0, 0.0
    tail_sq = spec.lambda_d1**2 / tau_eff**2
    var_lower = noise_var * (d / n + tail_sq * (r1 / n) ** 2)
    if regime is Regime.SMALL_MODERATE:
        var_upper = noise_var * (d / n + tail_sq * r1 / n)
    else:
        var_upper = var_lower
    return bias, var_upper, var_lower


@dataclass(frozen=True)
class OrderExpressions:
    """Order skeletons evaluated on a ridge grid for one regime."""

    regime: Regime
    taus: np.ndarray
    bias_out: np.ndarray
    var_out: np.ndarray
    bias_in_upper: np.ndarray
    var_in_upper: np.ndarray
    var_in_lower: np.ndarray


def order_table(
    spec: SpectrumSpec,
    theta_star: np.ndarray,
    n: int,
    noise_var: float,
    taus,
    regime: Regime,
) -> OrderExpressions:
    """Evaluate both skeleton families on a grid (range warnings suppressed)."""
    taus = np.asarray(taus, dtype=float)
    rows_out, rows_in = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TauRangeWarning)
        for tau in taus:
            rows_out.append(order_out(spec, theta_star, n, noise_var, float(tau), regime))
            rows_in.append(order_in(spec, theta_star, n, noise_var, float(tau), regime))
    b_out, v_out = map(np.array, zip(*rows_out))
    b_in, v_in_u, v_in_l = map(np.array, zip(*rows_in))
    return OrderExpressions(
        regime=regime,
        taus=taus,
        bias_out=b_out,
        var_out=v_out,
        bias_in_upper=b_in,
        var_in_upper=v_in_u,
        var_in_lower=v_in_l,
    )


@dataclass(frozen=True)
class CorollaryThresholds:
    """Spike-gap thresholds and prescribed ridge windows of the four corollaries.

    Thresholds bound ``lambda_{d+1}/lambda_d`` for each regime/target pair;
    windows are stated with the absolute constants set to 1.  Large-regime
    windows constrain the shifted level ``tau + lambda_{d+1} r_d / n``.
    """

    out_small: float
    in_small: float
    out_large: float
    in_large: float
    cor3_discriminant: float
    window_out_small: tuple[float, float]
    window_in_small: tuple[float, float]
    window_out_large: tuple[float, float]
    window_in_large: tuple[float, float]


def dn_condition_thresholds(spec: SpectrumSpec, n: int) -> CorollaryThresholds:
    """Evaluate the four spike-gap thresholds and their ridge windows."""
    m = ter_metrics(spec, n)
    r1, r2 = m.r_d_sigma, m.r_d_sigma_sq
    d = spec.spike_dim
    lam_d, lam_d1 = spec.lambda_d, spec.lambda_d1
    root_dn = np.sqrt(d / n)

    disc = n * np.sqrt(r2) / (np.sqrt(d) * r1)
    if r2 <= d:
        w1 = (lam_d1, lam_d1)
    else:
        w1 = (lam_d1 * max(np.sqrt(r2 / d), 1.0), lam_d * min(root_dn, 1.0))
    if r1 <= d:
        w2 = (lam_d1, lam_d1)
    else:
        w2 = (lam_d1 * max(np.sqrt(r1 / d), 1.0), lam_d * min(root_dn, 1.0))
    if disc <= 1.0:
        w3 = (0.0, root_dn * lam_d)
    else:
        w3 = (np.sqrt(r2 / d) * lam_d1, root_dn * lam_d)
    w4 = (lam_d1 * (r1 / n) * np.sqrt(n / d), lam_d * root_dn)

    return CorollaryThresholds(
        out_small=root_dn * min(1.0, np.sqrt(d / r2)),
        in_small=root_dn * min(1.0, np.sqrt(d / r1)),
        out_large=root_dn * min(np.sqrt(d / r2), n / r1),
        in_large=d / r1,
        cor3_discriminant=float(disc),
        window_out_small=w1,
        window_in_small=w2,
        window_out_large=w3,
        window_in_large=w4,
    )


@dataclass(frozen=True)
class OptimalOrderPrediction:
    """Predicted optimal-risk orders and minimizing ridge levels."""

    mse_out_order: float
    mse_in_order: float
    tau_out: float
    tau_in: float

    @property
    def ratio_in_over_out(self) -> float:
        return self.mse_in_order / self.mse_out_order


def optimal_order_prediction(
    spec: SpectrumSpec,
    theta_star: np.ndarray,
    n: int,
    noise_var: float,
    regime: Regime,
) -> OptimalOrderPrediction:
    """Table-level predictions of the optimal risks and minimizing ridge levels.

    The max-expressions presume the experiment normalization (unit noise
    variance and unit spiked inverse-covariance energy times ``lambda_d^2``);
    ``theta_star`` and ``noise_var`` are accepted for interface symmetry and
    enter only through that presumption.
    """
    del theta_star, noise_var
    m = ter_metrics(spec, n)
    r1, r2 = m.r_d_sigma, m.r_d_sigma_sq
    d = spec.spike_dim
    lam_d, lam_d1 = spec.lambda_d, spec.lambda_d1
    gap = lam_d1 / lam_d
    dn = d / n

    if regime is Regime.SMALL_MODERATE:
        out_order = max(gap * np.sqrt(r2 / n), dn)
        in_order = max(gap, dn)
        tau_out = np.sqrt(lam_d * lam_d1 * np.sqrt(r2 / n))
        tau_in = np.sqrt(lam_d * lam_d1)
    else:
        shift = lam_d1 * r1 / n
        out_order = max(gap * np.sqrt(r2 / n), gap**2 * (r1 / n) ** 2, dn)
        in_order = max(gap * r1 / n, dn)
        disc = n * np.sqrt(r2) / (np.sqrt(d) * r1)
        if disc <= gap * r1 / n:
            tau_out = 0.0
        else:
            tau_out = max(0.0, np.sqrt(lam_d * lam_d1 * np.sqrt(r2 / n)) - shift)
        tau_in = max(0.0, np.sqrt(lam_d * lam_d1 * r1 / n) - shift)

    return OptimalOrderPrediction(
        mse_out_order=float(out_order),
        mse_in_order=float(in_order),
        tau_out=float(tau_out),
        tau_in=float(tau_in),
    )


def _delta_term(delta: float) -> float:
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta constants must lie in [0, 1)")
    root = np.sqrt(delta)
    return root / (1.0 - root)


def kappa(
    tau: float,
    spec: SpectrumSpec,
    n: int,
    *,
    c0_sigma_x_sq: float | None = None,
    c1: float | None = None,
    delta1: float | None = None,
    delta2: float | None = None,
) -> float:
    """Bias-activation factor of the in-sample lower bounds.

    The absolute constants are never pinned by the theory, so they must be
    supplied explicitly: the small/moderate form needs ``c0_sigma_x_sq``
    (the product of the concentration constant and the squared sub-gaussian
    norm), ``c1``, and ``delta1``; the large form needs ``delta2`` alone.
    """
    small_args = (c0_sigma_x_sq, c1, delta1)
    if all(a is not None for a in small_args) and delta2 is None:
        phi = _delta_term(delta1)
        penalty = 2.0 * c0_sigma_x_sq * (2.0 + c1) * (spec.lambda_d1 / tau) * (
            1.0 + 16.0 * (2.0 * c0_sigma_x_sq + 1.0) * (1.0 + c1) * phi
        ) + 64.0 * phi
        return max(1.0 - penalty, 0.0)
    if delta2 is not None and all(a is None for a in small_args):
        phi = _delta_term(delta2)
        shift = spec.lambda_d1 * ter_metrics(spec, n).r_d_sigma / n
        penalty = 16.0 * (shift / (tau + shift)) * (1.0 + 112.0 * phi) + 64.0 * phi
        return max(1.0 - penalty, 0.0)
    raise ValueError(
        "kappa requires explicit constants: either (c0_sigma_x_sq, c1, delta1) or delta2"
    )
