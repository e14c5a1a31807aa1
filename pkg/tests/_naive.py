"""Independent brute-force oracles used by the test suite.

Everything here goes through dense textbook linear algebra (explicit
inverses, p x p normal equations, elementwise summation loops) and shares no
code with the SVD-based production paths it validates.
"""

import numpy as np


def naive_ridge_normal_equations(X, Y, tau):
    n, p = X.shape
    return np.linalg.solve(X.T @ X + n * tau * np.eye(p), X.T @ Y)


def naive_risk_components(X, sigma, theta_star, noise_var, tau):
    """Bias/variance of both risks via explicit matrix inverses."""
    n, p = X.shape
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim == 1:
        sigma = np.diag(sigma)
    a_inv = np.linalg.inv(X @ X.T + n * tau * np.eye(n))
    shrink = np.eye(p) - X.T @ a_inv @ X
    v = shrink @ theta_star
    sigma_hat = X.T @ X / n
    b_out = float(v @ sigma @ v)
    b_in = float(v @ sigma_hat @ v)
    v_out = float(noise_var * np.trace(a_inv @ X @ sigma @ X.T @ a_inv))
    v_in = float(noise_var * np.trace(a_inv @ X @ sigma_hat @ X.T @ a_inv))
    return b_out, v_out, b_in, v_in


def naive_sparsity_ratio(eigenvalues, d, theta):
    num = 0.0
    for j in range(d, len(eigenvalues)):
        num += eigenvalues[j] * theta[j] ** 2
    den = 0.0
    for j in range(d):
        den += theta[j] ** 2 / eigenvalues[j]
    return num / den


def golden_ratio():
    return (1.0 + np.sqrt(5.0)) / 2.0
