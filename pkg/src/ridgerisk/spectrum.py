"""Diagonal covariance spectra and tail-effective-rank diagnostics.

A spectrum is a nonincreasing vector of positive eigenvalues split into a
spiked block (the first ``d`` entries) and a tail block.  The tail effective
rank of the spectrum and of its square drive everything else in this
package: regime classification, risk-order skeletons, and the experiment
presets.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

#: Operational regime split: the tail effective rank is "large" when it is at
#: least this multiple of the sample size.
LARGE_TER_FACTOR = 10.0


class Regime(enum.Enum):
    """Tail-effective-rank regime of a spectrum relative to a sample size."""

    SMALL_MODERATE = "small_moderate"
    LARGE = "large"


@dataclass(frozen=True)
class SpectrumSpec:
    """Eigenvalues of a diagonal covariance plus the spike dimension.

    Eigenvalues are sorted nonincreasing at construction (human-written
    configs may list them in any order); all must be strictly positive and
    the spike dimension must satisfy ``0 < spike_dim < p``.
    """

    eigenvalues: np.ndarray
    spike_dim: int

    def __post_init__(self) -> None:
        lam = np.asarray(self.eigenvalues, dtype=float)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("eigenvalues must be a 1-D array of length >= 2")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0.0):
            raise ValueError("eigenvalues must be finite and strictly positive")
        lam = np.sort(lam)[::-1].copy()
        lam.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)
        d = int(self.spike_dim)
        if not 0 < d < lam.size:
            raise ValueError(f"spike_dim must satisfy 0 < d < p, got d={d}, p={lam.size}")
        object.__setattr__(self, "spike_dim", d)

    @property
    def p(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def lambda_d(self) -> float:
        """Smallest spiked eigenvalue."""
        return float(self.eigenvalues[self.spike_dim - 1])

    @property
    def lambda_d1(self) -> float:
        """Largest tail eigenvalue."""
        return float(self.eigenvalues[self.spike_dim])

    @property
    def spiked(self) -> np.ndarray:
        return self.eigenvalues[: self.spike_dim]

    @property
    def tail(self) -> np.ndarray:
        return self.eigenvalues[self.spike_dim :]

    def tail_sum(self) -> float:
        # np.sum uses pairwise accumulation, keeping relative error far below
        # 1e-12 for the p ~ 1.5e4 near-equal tails used here.
        return float(np.sum(self.tail))

    def tail_sq_sum(self) -> float:
        return float(np.sum(self.tail**2))


@dataclass(frozen=True)
class TerMetrics:
    """Tail effective ranks of a spectrum and the regime they imply."""

    r_d_sigma: float
    r_d_sigma_sq: float
    ratio_to_n: float
    regime: Regime = field(compare=False)


def ter_metrics(spec: SpectrumSpec, n: int) -> TerMetrics:
    """Tail effective ranks of ``spec`` and its square, classified against ``n``.

    ``r_d`` of the spectrum is the tail eigenvalue sum over the largest tail
    eigenvalue; for the squared spectrum the same with squared entries.  The
    regime is Large iff ``r_d >= 10 n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lam_d1 = spec.lambda_d1
    r1 = spec.tail_sum() / lam_d1
    r2 = spec.tail_sq_sum() / lam_d1**2
    regime = Regime.LARGE if r1 >= LARGE_TER_FACTOR * n else Regime.SMALL_MODERATE
    return TerMetrics(r_d_sigma=r1, r_d_sigma_sq=r2, ratio_to_n=r1 / n, regime=regime)


def make_two_level_spectrum(d: int, p: int, rho: float) -> SpectrumSpec:
    """Spectrum with ``d`` unit spikes and a flat tail at height ``rho``."""
    if not 0 < d < p:
        raise ValueError(f"need 0 < d < p, got d={d}, p={p}")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    lam = np.full(p, rho)
    lam[:d] = 1.0
    return SpectrumSpec(eigenvalues=lam, spike_dim=d)


def make_three_level_spectrum(
    d: int, p: int, rho: float, mid_multiplier: int, tail_factor: float
) -> SpectrumSpec:
    """Spectrum with unit spikes, a mid block, and a lower tail.

    Entries ``1..d`` are 1, entries ``d+1..(mid_multiplier+1)*d`` are ``rho``,
    and the remaining entries are ``tail_factor * rho``.
    """
    if not 0 < d:
        raise ValueError(f"d must be positive, got {d}")
    mid_end = d * (mid_multiplier + 1)
    if not d <= mid_end < p:
        raise ValueError(
            f"need d*(mid_multiplier+1) < p, got mid end {mid_end} with p={p}"
        )
    if not 0.0 < tail_factor <= 1.0:
        raise ValueError(f"tail_factor must lie in (0, 1], got {tail_factor}")
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    lam = np.full(p, tail_factor * rho)
    lam[:d] = 1.0
    lam[d:mid_end] = rho
    return SpectrumSpec(eigenvalues=lam, spike_dim=d)


def spiked_inv_norm_sq(spec: SpectrumSpec, theta: np.ndarray) -> float:
    """Squared norm of the spiked coefficients under the inverse spiked covariance."""
    theta = np.asarray(theta, dtype=float)
    d = spec.spike_dim
    return float(np.sum(theta[:d] ** 2 / spec.spiked))


def tail_norm_sq(spec: SpectrumSpec, theta: np.ndarray) -> float:
    """Squared norm of the tail coefficients under the tail covariance."""
    theta = np.asarray(theta, dtype=float)
    return float(np.sum(spec.tail * theta[spec.spike_dim :] ** 2))


def sparsity_ratio(spec: SpectrumSpec, theta: np.ndarray) -> float:
    """Tail coefficient energy relative to the spiked part.

    Returns the tail covariance-weighted squared norm divided by the spiked
    inverse-covariance-weighted squared norm.  Exactly sparse vectors give 0;
    a zero spiked part leaves the ratio undefined.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.p,):
        raise ValueError(f"theta must have length p={spec.p}, got shape {theta.shape}")
    denom = spiked_inv_norm_sq(spec, theta)
    if denom == 0.0:
        raise ValueError("undefined sparsity ratio: spiked part of theta is zero")
    return tail_norm_sq(spec, theta) / denom
