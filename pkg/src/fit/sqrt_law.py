"""Square-root law of spectral diffusion versus Stark shift, and sigma_E."""

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from sklearn.metrics import r2_score

from ..errors import DataError
from ..physics.stark import sqrt_law_sigma
from .regression import weighted_polyfit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SqrtLawFit:
    """
    sigma^2 = 4 a shift + sigma0^2.

    covariance is for (a, sigma0). unphysical is set when the fitted slope
    or intercept came out negative; a keeps its fitted sign, sigma0 is
    clipped at zero.
    """

    a: float
    sigma0: float
    covariance: np.ndarray
    chi2_red: float
    r2: float
    n_points: int
    unphysical: bool = False

    @property
    def a_err(self):
        return float(np.sqrt(max(self.covariance[0, 0], 0.0)))

    @property
    def sigma0_err(self):
        return float(np.sqrt(max(self.covariance[1, 1], 0.0)))

    def predict(self, shifts):
        return np.sqrt(np.maximum(4.0 * self.a * np.asarray(shifts, dtype=float) + self.sigma0**2, 0.0))

    def to_dict(self):
        return {
            "a": float(self.a),
            "a_err": self.a_err,
            "sigma0": float(self.sigma0),
            "sigma0_err": self.sigma0_err,
            "chi2_red": float(self.chi2_red),
            "r2": float(self.r2),
            "n_points": int(self.n_points),
            "unphysical": bool(self.unphysical),
            "covariance": np.asarray(self.covariance).tolist(),
        }


def fit_sqrt_law(shifts, sigmas, sigma_errs=None):
    """
    Fit the square-root law in the variance domain, where it is linear.

    Args:
        shifts: |Stark shift| values, MHz (>= 0)
        sigmas: Spectral-diffusion widths, MHz
        sigma_errs: Width uncertainties, MHz (None = unit weights on sigma^2)

    Returns:
        SqrtLawFit
    """
    shifts = np.asarray(shifts, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if shifts.shape != sigmas.shape:
        raise DataError("shifts and sigmas must have the same length")
    if len(shifts) < 3:
        raise DataError(f"Need at least 3 points, got {len(shifts)}")
    if np.any(shifts < 0):
        raise DataError("Shifts must be >= 0 (use |shift|)")

    variance = sigmas**2
    variance_errs = None
    if sigma_errs is not None:
        variance_errs = np.maximum(2.0 * sigmas * np.asarray(sigma_errs, dtype=float), 1e-12)

    coef, coef_cov, chi2_red = weighted_polyfit(shifts, variance, 1, variance_errs)
    intercept, slope = coef
    a = slope / 4.0
    sigma0 = float(np.sqrt(max(intercept, 0.0)))
    unphysical = bool(a < 0 or intercept < 0)
    if unphysical:
        logger.warning(f"  Unphysical sqrt-law fit: a = {a:.4g} MHz, sigma0^2 = {intercept:.4g} MHz^2")

    d_sigma0 = 0.5 / sigma0 if sigma0 > 0 else 0.0
    jac = np.array([[0.0, 0.25], [d_sigma0, 0.0]])
    covariance = jac @ coef_cov @ jac.T
    if sigma0 == 0:
        covariance[1, 1] = np.sqrt(max(coef_cov[0, 0], 0.0))

    fit = SqrtLawFit(
        a=float(a),
        sigma0=sigma0,
        covariance=covariance,
        chi2_red=chi2_red,
        r2=float(r2_score(variance, intercept + slope * shifts)) if np.ptp(variance) > 0 else 1.0,
        n_points=len(shifts),
        unphysical=unphysical,
    )
    logger.info(f"  Sqrt law: a = {fit.a:.4f} +/- {fit.a_err:.4f} MHz, sigma0 = {fit.sigma0:.1f} MHz")
    return fit


class FieldVariance(NamedTuple):
    sigma_e: float
    sigma_e_err: float


def extract_field_variance(a, kappa, a_err=0.0, kappa_err=0.0):
    """
    Local field noise sigma_E = sqrt(a / kappa) with first-order errors.

    For the second reference emitter, a = 0.53 MHz and kappa = 1.65 give
    0.567 kV/cm; the 1.56 kV/cm printed alongside those inputs does not
    follow from them.

    Args:
        a: Sqrt-law product kappa * sigma_E^2, MHz
        kappa: Polarizability coefficient, MHz/(kV/cm)^2
        a_err, kappa_err: Uncertainties of the inputs

    Returns:
        FieldVariance(sigma_e, sigma_e_err) in kV/cm
    """
    if not kappa > 0:
        raise DataError(f"kappa must be > 0, got {kappa}")
    if a < 0:
        raise DataError(f"a must be >= 0, got {a}")
    sigma_e = float(np.sqrt(a / kappa))
    if a > 0:
        err = 0.5 * sigma_e * np.hypot(a_err / a, kappa_err / kappa)
    else:
        err = np.sqrt(a_err / kappa)
    return FieldVariance(sigma_e, float(err))


def sd_vs_shift(centers, vertex_frequency):
    """
    Spectral-diffusion width against |shift| from a line-centre table.

    Args:
        centers: DataFrame with center_MHz, sigma_MHz, sigma_err_MHz (one track)
        vertex_frequency: Parabola vertex, MHz

    Returns:
        DataFrame with shift_MHz, sigma_MHz, sigma_err_MHz
    """
    return pd.DataFrame({
        "shift_MHz": np.abs(centers["center_MHz"].to_numpy() - vertex_frequency),
        "sigma_MHz": centers["sigma_MHz"].to_numpy(),
        "sigma_err_MHz": centers["sigma_err_MHz"].to_numpy(),
    })


def sqrt_law_table(fit, shifts):
    """Model curve of a SqrtLawFit on a shift grid (for plotting)."""
    shifts = np.asarray(shifts, dtype=float)
    return pd.DataFrame({"shift_MHz": shifts, "sigma_model_MHz": sqrt_law_sigma(shifts, max(fit.a, 0.0), fit.sigma0)})
