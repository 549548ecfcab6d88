"""Voigt fits of excitation spectra."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.optimize import least_squares
from sklearn.metrics import mean_absolute_error, r2_score

from .. import config
from ..errors import DataError, FitError, NoPeakError
from ..physics.lineshape import FWHM_PER_SIGMA, spectrum_model, voigt_fwhm

logger = logging.getLogger(__name__)

PARAMETERS = ("center", "gamma", "sigma", "amplitude", "baseline")
SMOOTHING_BINS = 5
MIN_WIDTH = 1e-6


@dataclass(frozen=True)
class VoigtFit:
    """Voigt fit result; covariance is ordered as PARAMETERS (zero rows for fixed gamma)."""

    center: float
    gamma: float
    sigma: float
    amplitude: float
    baseline: float
    covariance: np.ndarray
    chi2_red: float
    r2: float
    mae: float
    gamma_fixed: bool = False
    n_bins: int = 0
    n_sweeps: int = 1
    observation_span: float = 0.0
    residuals: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)

    def _err(self, name):
        i = PARAMETERS.index(name)
        return float(np.sqrt(max(self.covariance[i, i], 0.0)))

    @property
    def center_err(self):
        return self._err("center")

    @property
    def gamma_err(self):
        return self._err("gamma")

    @property
    def sigma_err(self):
        return self._err("sigma")

    @property
    def amplitude_err(self):
        return self._err("amplitude")

    @property
    def baseline_err(self):
        return self._err("baseline")

    @property
    def fwhm(self):
        return float(voigt_fwhm(self.gamma, self.sigma))

    def to_dict(self):
        values = {}
        for name in PARAMETERS:
            values[name] = float(getattr(self, name))
            values[f"{name}_err"] = self._err(name)
        values.update(
            fwhm=self.fwhm,
            gamma_fixed=self.gamma_fixed,
            chi2_red=float(self.chi2_red),
            r2=float(self.r2),
            mae=float(self.mae),
            n_bins=int(self.n_bins),
            n_sweeps=int(self.n_sweeps),
            observation_span=float(self.observation_span),
            covariance=np.asarray(self.covariance).tolist(),
        )
        return values


def initial_guess(x, y, fix_gamma=None):
    """
    Moment-style starting values.

    The baseline is the 20th percentile of the counts, the centre sits at the
    smoothed maximum and the FWHM counts bins above half maximum.

    Returns:
        Dict of PARAMETERS values
    """
    smooth = uniform_filter1d(y, size=min(SMOOTHING_BINS, len(y)), mode="nearest")
    baseline = float(np.percentile(y, 20))
    peak = int(np.argmax(smooth))
    amplitude = float(smooth[peak] - baseline)

    noise = np.sqrt(max(float(np.median(y)), 1.0) / SMOOTHING_BINS)
    if amplitude <= 0 or smooth[peak] - np.median(y) < config.PEAK_PROMINENCE_SIGMAS * noise:
        raise NoPeakError(f"No line above the noise (peak {amplitude:.1f} counts over baseline {baseline:.1f})")

    step = float(np.mean(np.abs(np.diff(x))))
    fwhm = max(np.sum(smooth - baseline > 0.5 * amplitude) * step, 2.0 * step)

    if fix_gamma is not None:
        gamma = float(fix_gamma)
        f_g2 = (fwhm - 0.5 * gamma) ** 2 - 0.25 * gamma**2
        sigma = np.sqrt(f_g2) / FWHM_PER_SIGMA if f_g2 > 0 else 0.1 * fwhm
    else:
        gamma = 0.5 * fwhm
        sigma = 0.5 * fwhm / FWHM_PER_SIGMA

    return {
        "center": float(x[peak]),
        "gamma": max(gamma, MIN_WIDTH),
        "sigma": max(float(sigma), MIN_WIDTH),
        "amplitude": amplitude,
        "baseline": max(baseline, 0.0),
        "fwhm": fwhm,
    }


def _solve(x, y, weights, start, fix_gamma, lower, upper):
    free = [p for p in PARAMETERS if not (p == "gamma" and fix_gamma is not None)]

    def unpack(p):
        values = dict(zip(free, p))
        if fix_gamma is not None:
            values["gamma"] = float(fix_gamma)
        return values

    def residual(p):
        v = unpack(p)
        model = spectrum_model(x, v["center"], v["gamma"], v["sigma"], v["amplitude"], v["baseline"])
        return (model - y) / weights

    p0 = np.clip([start[p] for p in free], [lower[p] for p in free], [upper[p] for p in free])
    result = least_squares(
        residual,
        p0,
        bounds=([lower[p] for p in free], [upper[p] for p in free]),
        method="trf",
        x_scale="jac",
        xtol=1e-12,
        ftol=1e-12,
        gtol=1e-12,
        max_nfev=config.FIT_MAX_EVALUATIONS,
    )
    if result.status <= 0:
        raise FitError(
            "Voigt fit did not converge",
            diagnostics={
                "status": int(result.status),
                "message": result.message,
                "nfev": int(result.nfev),
                "last_parameters": unpack(result.x),
            },
        )
    return result, free, unpack(result.x)


def fit_voigt(trace, fix_gamma=None, window=None):
    """
    Weighted least-squares Voigt fit of a trace or integrated spectrum.

    A first pass uses sqrt(counts) weights; the second refits with the
    Poisson variance predicted by the first-pass model.

    Args:
        trace: ScanTrace (or anything with detunings and counts arrays)
        fix_gamma: Lorentzian FWHM to hold fixed, MHz (None = free)
        window: Optional (low, high) detuning range to fit, MHz

    Returns:
        VoigtFit
    """
    x = np.asarray(trace.detunings, dtype=float)
    y = np.asarray(trace.counts, dtype=float)
    if window is not None:
        keep = (x >= window[0]) & (x <= window[1])
        x, y = x[keep], y[keep]
    if len(x) < config.MIN_FIT_BINS:
        raise DataError(f"Need at least {config.MIN_FIT_BINS} bins, got {len(x)}")
    order = np.argsort(x)
    x, y = x[order], y[order]

    start = initial_guess(x, y, fix_gamma)
    span = x[-1] - x[0]
    if span < 3.0 * start["fwhm"]:
        logger.warning(f"  Fit window {span:.0f} MHz is narrower than 3x the estimated FWHM {start['fwhm']:.0f} MHz")

    lower = {"center": x[0], "gamma": MIN_WIDTH, "sigma": MIN_WIDTH, "amplitude": 0.0, "baseline": 0.0}
    upper = {"center": x[-1], "gamma": 10.0 * span, "sigma": 10.0 * span, "amplitude": np.inf, "baseline": np.inf}

    weights = np.sqrt(np.maximum(y, 1.0))
    result, free, values = _solve(x, y, weights, start, fix_gamma, lower, upper)
    model = spectrum_model(x, values["center"], values["gamma"], values["sigma"], values["amplitude"], values["baseline"])
    weights = np.sqrt(np.maximum(model, 1.0))
    result, free, values = _solve(x, y, weights, values, fix_gamma, lower, upper)
    model = spectrum_model(x, values["center"], values["gamma"], values["sigma"], values["amplitude"], values["baseline"])

    dof = max(len(x) - len(free), 1)
    chi2_red = float(np.sum(result.fun**2) / dof)
    free_cov = np.linalg.pinv(result.jac.T @ result.jac) * chi2_red
    covariance = np.zeros((len(PARAMETERS), len(PARAMETERS)))
    idx = [PARAMETERS.index(p) for p in free]
    covariance[np.ix_(idx, idx)] = free_cov

    fit = VoigtFit(
        center=values["center"],
        gamma=values["gamma"],
        sigma=values["sigma"],
        amplitude=values["amplitude"],
        baseline=values["baseline"],
        covariance=covariance,
        chi2_red=chi2_red,
        r2=float(r2_score(y, model)),
        mae=float(mean_absolute_error(y, model)),
        gamma_fixed=fix_gamma is not None,
        n_bins=len(x),
        n_sweeps=getattr(trace, "n_sweeps", 1),
        observation_span=float(getattr(trace, "observation_span", 0.0) or 0.0),
        residuals=y - model,
        weights=weights,
    )
    logger.debug(
        f"  Voigt fit: center {fit.center:.1f} +/- {fit.center_err:.1f} MHz, "
        f"gamma {fit.gamma:.1f}, sigma {fit.sigma:.1f} +/- {fit.sigma_err:.1f} MHz"
    )
    return fit
