"""Dependence of the fitted spectral-diffusion width on the observation time."""

import logging

import pandas as pd

from .. import config
from ..errors import DataError
from .spectra import integrate_traces
from .voigt import fit_voigt

logger = logging.getLogger(__name__)


def sd_vs_observation_time(traces, sweep_counts=None, fix_gamma=config.FIX_GAMMA):
    """
    Fit spectra integrated over a growing number of sweeps.

    Args:
        traces: Consecutive sweeps (list of ScanTrace) on one grid
        sweep_counts: Numbers of leading sweeps to integrate (default 1..N)
        fix_gamma: Lorentzian FWHM held fixed, MHz

    Returns:
        DataFrame with n_sweeps, observation_span_s, sigma_MHz, sigma_err_MHz,
        center_MHz
    """
    if not traces:
        raise DataError("No sweeps given")
    if sweep_counts is None:
        sweep_counts = range(1, len(traces) + 1)

    rows = []
    for n in sweep_counts:
        if not 1 <= n <= len(traces):
            raise DataError(f"Cannot integrate {n} of {len(traces)} sweeps")
        spectrum = integrate_traces(traces[:n])
        fit = fit_voigt(spectrum, fix_gamma=fix_gamma)
        rows.append([n, spectrum.observation_span, fit.sigma, fit.sigma_err, fit.center])

    df = pd.DataFrame(rows, columns=["n_sweeps", "observation_span_s", "sigma_MHz", "sigma_err_MHz", "center_MHz"])
    logger.info(
        f"  Observation time {df['observation_span_s'].iloc[0]:.0f} s -> {df['observation_span_s'].iloc[-1]:.0f} s: "
        f"sigma {df['sigma_MHz'].iloc[0]:.1f} -> {df['sigma_MHz'].iloc[-1]:.1f} MHz"
    )
    return df
