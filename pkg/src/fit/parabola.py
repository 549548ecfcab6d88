"""Stark parabolas: line centres versus voltage and their quadratic fits."""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks
from sklearn.metrics import r2_score

from .. import config
from ..errors import DataError, FitError, RankDeficientError
from .regression import weighted_polyfit
from .voigt import SMOOTHING_BINS, fit_voigt

logger = logging.getLogger(__name__)

CENTER_COLUMNS = [
    "track", "voltage_V", "center_MHz", "center_err_MHz",
    "sigma_MHz", "sigma_err_MHz", "gamma_MHz",
]


@dataclass(frozen=True)
class ParabolaFit:
    """
    Quadratic fit nu(V) = a0 + a1 V + a2 V^2 of a Stark parabola.

    curvature = -a2 (positive for a red-shifting parabola). covariance is
    for (curvature, vertex_voltage, vertex_frequency).
    """

    curvature: float
    vertex_voltage: float
    vertex_frequency: float
    covariance: np.ndarray
    coefficients: np.ndarray
    kappa_xx: float
    kappa_xx_err: float
    geometry_factor: float
    chi2_red: float
    r2: float
    n_points: int

    @property
    def curvature_err(self):
        return float(np.sqrt(max(self.covariance[0, 0], 0.0)))

    @property
    def vertex_voltage_err(self):
        return float(np.sqrt(max(self.covariance[1, 1], 0.0)))

    @property
    def vertex_frequency_err(self):
        return float(np.sqrt(max(self.covariance[2, 2], 0.0)))

    def predict(self, voltages):
        a0, a1, a2 = self.coefficients
        v = np.asarray(voltages, dtype=float)
        return a0 + a1 * v + a2 * v**2

    def to_dict(self):
        return {
            "curvature": float(self.curvature),
            "curvature_err": self.curvature_err,
            "vertex_voltage": float(self.vertex_voltage),
            "vertex_voltage_err": self.vertex_voltage_err,
            "vertex_frequency": float(self.vertex_frequency),
            "vertex_frequency_err": self.vertex_frequency_err,
            "kappa_xx": float(self.kappa_xx),
            "kappa_xx_err": float(self.kappa_xx_err),
            "geometry_factor": float(self.geometry_factor),
            "chi2_red": float(self.chi2_red),
            "r2": float(self.r2),
            "n_points": int(self.n_points),
            "covariance": np.asarray(self.covariance).tolist(),
        }


def fit_parabola(voltages, centers, center_errs=None, geom=None,
                 geometry_factor_err=config.GEOMETRY_FACTOR_UNCERTAINTY):
    """
    Weighted quadratic regression of line centre against voltage.

    The x-polarizability follows as kappa_xx = curvature / g^2, with the
    curvature and geometry-factor uncertainties propagated.

    Args:
        voltages: Electrode voltages, V
        centers: Line centres, MHz
        center_errs: Centre uncertainties, MHz (None = unit weights)
        geom: ElectrodeGeometry (default geometry factor if None)
        geometry_factor_err: Uncertainty of g, (kV/cm)/V

    Returns:
        ParabolaFit
    """
    voltages = np.asarray(voltages, dtype=float)
    centers = np.asarray(centers, dtype=float)
    if voltages.shape != centers.shape:
        raise DataError("voltages and centers must have the same length")
    if len(np.unique(voltages)) < 4:
        raise RankDeficientError(f"Need at least 4 distinct voltages, got {len(np.unique(voltages))}")

    coef, coef_cov, chi2_red = weighted_polyfit(voltages, centers, 2, center_errs)
    a0, a1, a2 = coef

    if a2 != 0:
        vertex_v = -a1 / (2.0 * a2)
        vertex_f = a0 - a1**2 / (4.0 * a2)
        jac = np.array([
            [0.0, 0.0, -1.0],
            [0.0, -1.0 / (2.0 * a2), a1 / (2.0 * a2**2)],
            [1.0, -a1 / (2.0 * a2), a1**2 / (4.0 * a2**2)],
        ])
        covariance = jac @ coef_cov @ jac.T
    else:
        vertex_v = vertex_f = np.nan
        covariance = np.full((3, 3), np.nan)
        covariance[0, 0] = coef_cov[2, 2]

    g = geom.geometry_factor if geom is not None else config.GEOMETRY_FACTOR
    curvature = -a2
    kappa = curvature / g**2
    kappa_err = np.sqrt((np.sqrt(coef_cov[2, 2]) / g**2) ** 2 + (2.0 * curvature * geometry_factor_err / g**3) ** 2)

    fit = ParabolaFit(
        curvature=float(curvature),
        vertex_voltage=float(vertex_v),
        vertex_frequency=float(vertex_f),
        covariance=covariance,
        coefficients=coef,
        kappa_xx=float(kappa),
        kappa_xx_err=float(kappa_err),
        geometry_factor=float(g),
        chi2_red=chi2_red,
        r2=float(r2_score(centers, a0 + a1 * voltages + a2 * voltages**2)) if np.ptp(centers) > 0 else 1.0,
        n_points=len(voltages),
    )
    logger.info(
        f"  Parabola: curvature {fit.curvature:.3f} +/- {fit.curvature_err:.3f} MHz/V^2, "
        f"vertex {fit.vertex_voltage:.2f} V, kappa_xx {fit.kappa_xx:.3f} +/- {fit.kappa_xx_err:.3f}"
    )
    return fit


def detect_peaks(trace, prominence_sigmas=config.PEAK_PROMINENCE_SIGMAS, min_separation=None):
    """
    Candidate line positions in one trace.

    Args:
        trace: ScanTrace
        prominence_sigmas: Required prominence in units of the smoothed shot
            noise, both of the background and at the peak itself
        min_separation: Minimum distance between peaks, MHz

    Returns:
        Array of detunings, MHz
    """
    counts = trace.counts.astype(float)
    smooth = uniform_filter1d(counts, size=min(SMOOTHING_BINS, len(counts)), mode="nearest")
    noise = np.sqrt(max(float(np.median(counts)), 1.0) / SMOOTHING_BINS)
    step = float(np.mean(np.abs(np.diff(trace.detunings))))
    distance = max(int(min_separation / step), 1) if min_separation else None
    peaks, props = find_peaks(smooth, prominence=prominence_sigmas * noise, distance=distance)
    local = np.sqrt(np.maximum(smooth[peaks], 1.0) / SMOOTHING_BINS)
    keep = props["prominences"] >= prominence_sigmas * local
    return trace.detunings[peaks[keep]]


def track_lines(peaks_per_voltage, max_jump=config.LINE_TRACK_MAX_JUMP):
    """
    Nearest-neighbour association of peaks across consecutive voltages.

    Args:
        peaks_per_voltage: List (one entry per voltage) of peak detunings
        max_jump: Largest allowed move of a line between steps, MHz

    Returns:
        List (one entry per voltage) of track ids aligned with the peaks
    """
    last_position = {}
    assignments = []
    next_id = 0
    for peaks in peaks_per_voltage:
        ids = [None] * len(peaks)
        pairs = sorted(
            (abs(p - pos), i, track)
            for i, p in enumerate(peaks)
            for track, pos in last_position.items()
            if abs(p - pos) <= max_jump
        )
        used = set()
        for _, i, track in pairs:
            if ids[i] is None and track not in used:
                ids[i] = track
                used.add(track)
        for i, p in enumerate(peaks):
            if ids[i] is None:
                ids[i] = next_id
                next_id += 1
            last_position[ids[i]] = p
        assignments.append(ids)
    return assignments


def find_line_centers(sweep_map, fix_gamma=config.FIX_GAMMA, max_jump=config.LINE_TRACK_MAX_JUMP,
                      mask=None, half_window=1000.0):
    """
    Line centres and widths of every tracked line in a sweep map.

    Args:
        sweep_map: SweepMap
        fix_gamma: Lorentzian FWHM held fixed in the Voigt fits (None = free)
        max_jump: Tracking threshold, MHz per voltage step
        mask: Optional (v_low, v_high); voltages outside are ignored
        half_window: Half width of the fit window around each peak, MHz

    Returns:
        DataFrame with CENTER_COLUMNS, sorted by track and voltage
    """
    order = np.argsort(sweep_map.voltages)
    voltages = sweep_map.voltages[order]
    traces = [sweep_map.traces[i] for i in order]
    if mask is not None:
        keep = (voltages >= mask[0]) & (voltages <= mask[1])
        voltages = voltages[keep]
        traces = [t for t, k in zip(traces, keep) if k]

    min_separation = fix_gamma if fix_gamma else None
    peaks = [detect_peaks(t, min_separation=min_separation) for t in traces]
    tracks = track_lines(peaks, max_jump)

    rows = []
    for v, trace, v_peaks, v_tracks in zip(voltages, traces, peaks, tracks):
        for p, track in zip(v_peaks, v_tracks):
            try:
                fit = fit_voigt(trace, fix_gamma=fix_gamma, window=(p - half_window, p + half_window))
            except (FitError, DataError) as e:
                logger.warning(f"  Skipping line near {p:.0f} MHz at {v:+.1f} V: {e}")
                continue
            rows.append([track, v, fit.center, fit.center_err, fit.sigma, fit.sigma_err, fit.gamma])

    df = pd.DataFrame(rows, columns=CENTER_COLUMNS)
    logger.info(f"  Tracked {df['track'].nunique() if len(df) else 0} line(s) over {len(voltages)} voltages")
    return df.sort_values(["track", "voltage_V"]).reset_index(drop=True)
