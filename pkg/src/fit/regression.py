"""Weighted linear least squares for polynomial models."""

import numpy as np

from ..errors import RankDeficientError


def weighted_polyfit(x, y, deg, sigma=None):
    """
    Weighted polynomial regression with a Gauss-Markov covariance.

    Args:
        x, y: Data arrays
        deg: Polynomial degree
        sigma: Per-point standard errors (None = unit weights)

    Returns:
        (coef, covariance, chi2_red) with coef[k] multiplying x**k. The
        covariance is scaled by the reduced chi-square when there are
        degrees of freedom left.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sigma = np.ones_like(y) if sigma is None else np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise RankDeficientError("Point uncertainties must be > 0")

    design = np.vander(x, deg + 1, increasing=True)
    w = 1.0 / sigma
    a = design * w[:, None]
    b = y * w
    if np.linalg.matrix_rank(a) < deg + 1:
        raise RankDeficientError(f"Design matrix for degree {deg} is rank deficient ({len(np.unique(x))} distinct x)")

    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    resid = b - a @ coef
    dof = len(x) - (deg + 1)
    chi2_red = float(resid @ resid / dof) if dof > 0 else 0.0
    covariance = np.linalg.inv(a.T @ a)
    if dof > 0:
        covariance = covariance * chi2_red
    return coef, covariance, chi2_red
