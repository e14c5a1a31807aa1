"""Problem-instance materialization: coefficient vectors and datasets.

Coefficients follow the two-branch recipe tied to the tail-effective-rank
regime; covariates mix a uniform draw on the radius-``sqrt(p)`` sphere with
an independent Gaussian, giving an isotropic vector with dependent
components.  All randomness is derived from a master seed through splittable
seed sequences, so replicates are reproducible under any scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectrum import LARGE_TER_FACTOR, SpectrumSpec, spiked_inv_norm_sq, ter_metrics

#: Stream tags separating coefficient generation from per-replicate data.
_THETA_STREAM = 0x7E7A
_DATA_STREAM = 0xDA7A

#: Target tail-to-spike energy ratio of the coefficient generator.
SPARSITY_LEVEL = 0.01

#: Relative Frobenius tolerance for the cached SVD reconstruction.
SVD_RECONSTRUCTION_RTOL = 1e-8


def theta_rng(master_seed: int) -> np.random.Generator:
    """Generator for the coefficient draw of a scenario."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, _THETA_STREAM)))


def replicate_rng(master_seed: int, replicate_index: int) -> np.random.Generator:
    """Generator for one data replicate, independent across indices."""
    if replicate_index < 0:
        raise ValueError("replicate_index must be >= 0")
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, _DATA_STREAM, replicate_index))
    )


def sample_sphere(p: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw on the sphere of radius ``sqrt(p)`` in ``p`` dimensions."""
    if p < 1:
        raise ValueError("p must be >= 1")
    while True:
        g = rng.standard_normal(p)
        norm = float(np.linalg.norm(g))
        if norm > 0.0:
            return g * (np.sqrt(p) / norm)


def generate_theta(spec: SpectrumSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Coefficient vector with unit spiked energy and a small random tail.

    The spiked entries are ``1/sqrt(d)`` each.  The tail is an isotropic
    Gaussian direction rescaled so that its covariance-weighted squared norm
    equals ``0.01`` times the spiked inverse-covariance energy times a
    regime-dependent scale: ``lambda_{d+1}^2`` in the small/moderate regime,
    ``(1/lambda_d + n / tail_sum)^{-2}`` in the large regime.
    """
    d, p = spec.spike_dim, spec.p
    theta = np.zeros(p)
    theta[:d] = 1.0 / np.sqrt(d)
    spike_energy = spiked_inv_norm_sq(spec, theta)

    metrics = ter_metrics(spec, n)
    if metrics.r_d_sigma < LARGE_TER_FACTOR * n:
        scale_sq = spec.lambda_d1**2
    else:
        scale_sq = (1.0 / spec.lambda_d + n / spec.tail_sum()) ** (-2)
    target_sq = SPARSITY_LEVEL * spike_energy * scale_sq

    while True:
        beta = rng.standard_normal(p - d)
        beta_norm = float(np.sqrt(np.sum(spec.tail * beta**2)))
        if beta_norm > 0.0:
            break
    theta[d:] = beta * (np.sqrt(target_sq) / beta_norm)
    return theta


@dataclass(frozen=True)
class Scenario:
    """A fully materialized problem instance."""

    spectrum: SpectrumSpec
    theta_star: np.ndarray
    n: int
    noise_var: float
    master_seed: int

    def __post_init__(self) -> None:
        theta = np.asarray(self.theta_star, dtype=float).copy()
        if theta.shape != (self.spectrum.p,):
            raise ValueError("theta_star length must equal the spectrum length")
        theta.flags.writeable = False
        object.__setattr__(self, "theta_star", theta)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.noise_var < 0.0:
            raise ValueError("noise_var must be >= 0")


def make_scenario(
    spec: SpectrumSpec, n: int, noise_var: float, master_seed: int
) -> Scenario:
    """Scenario with the coefficient vector drawn from the master seed."""
    theta = generate_theta(spec, n, theta_rng(master_seed))
    return Scenario(
        spectrum=spec, theta_star=theta, n=n, noise_var=noise_var, master_seed=master_seed
    )


@dataclass(frozen=True)
class Dataset:
    """Design matrix, response, realized noise, and a cached thin SVD of X."""

    X: np.ndarray
    Y: np.ndarray
    eps: np.ndarray
    u: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    vt: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, X: np.ndarray, Y: np.ndarray, eps: np.ndarray) -> "Dataset":
        u, s, vt = np.linalg.svd(X, full_matrices=False)
        x_norm = float(np.linalg.norm(X))
        resid = float(np.linalg.norm(X - (u * s) @ vt))
        if x_norm > 0.0 and resid > SVD_RECONSTRUCTION_RTOL * x_norm:
            raise np.linalg.LinAlgError(
                f"SVD reconstruction error {resid / x_norm:.3e} exceeds tolerance"
            )
        for arr in (X, Y, eps, u, s, vt):
            arr.flags.writeable = False
        return cls(X=X, Y=Y, eps=eps, u=u, s=s, vt=vt)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def p(self) -> int:
        return int(self.X.shape[1])


def sample_covariates(
    spec: SpectrumSpec, n: int, rng: np.random.Generator
) -> np.ndarray:
    """``n`` rows of the sphere-plus-Gaussian isotropic design, scaled by the spectrum."""
    p = spec.p
    z1 = np.empty((n, p))
    for i in range(n):
        z1[i] = sample_sphere(p, rng)
    z2 = rng.standard_normal((n, p))
    z = (np.sqrt(2.0) / 2.0) * z1 + (np.sqrt(2.0) / 2.0) * z2
    return z * np.sqrt(spec.eigenvalues)


def generate_dataset(scenario: Scenario, replicate_index: int) -> Dataset:
    """One data replicate of the scenario, deterministic in (seed, index)."""
    rng = replicate_rng(scenario.master_seed, replicate_index)
    X = sample_covariates(scenario.spectrum, scenario.n, rng)
    eps = rng.standard_normal(scenario.n) * np.sqrt(scenario.noise_var)
    Y = X @ scenario.theta_star + eps
    return Dataset.from_arrays(X, Y, eps)
