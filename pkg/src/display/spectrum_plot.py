"""Spectrum with its Voigt fit."""

import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from ..physics.lineshape import spectrum_model

logger = logging.getLogger(__name__)


def spectrum_table(trace, fit=None):
    """
    Plot-ready table of counts against detuning.

    Args:
        trace: ScanTrace
        fit: Optional VoigtFit; adds model and residual columns

    Returns:
        DataFrame with detuning_MHz, counts[, model_counts, residual]
    """
    df = pd.DataFrame({"detuning_MHz": trace.detunings, "counts": trace.counts})
    if fit is not None:
        model = spectrum_model(trace.detunings, fit.center, fit.gamma, fit.sigma, fit.amplitude, fit.baseline)
        df["model_counts"] = model
        df["residual"] = trace.counts - model
    return df


def create_spectrum_plot(table, fit=None, output_path="outputs/spectrum.png", title="Excitation spectrum"):
    """
    Counts versus detuning, with the fitted model when present.

    Args:
        table: DataFrame from spectrum_table
        fit: Optional VoigtFit for the annotation box
        output_path: PNG path
        title: Axes title

    Returns:
        Figure object
    """
    fig, ax = plt.subplots(figsize=(10, 6))
    ax.plot(table["detuning_MHz"], table["counts"], ".", color="#34495e", markersize=4, label="Counts")
    if "model_counts" in table:
        ax.plot(table["detuning_MHz"], table["model_counts"], "-", color="#e74c3c", linewidth=2, label="Voigt fit")

    ax.set_xlabel("Detuning (MHz)", fontsize=12, fontweight="bold")
    ax.set_ylabel("Counts per bin", fontsize=12, fontweight="bold")
    ax.set_title(title, fontsize=14, fontweight="bold", pad=20)

    if fit is not None:
        textstr = (
            f"center = {fit.center:.1f} $\\pm$ {fit.center_err:.1f} MHz\n"
            f"$\\sigma$ = {fit.sigma:.1f} $\\pm$ {fit.sigma_err:.1f} MHz\n"
            f"$\\gamma$ = {fit.gamma:.1f} MHz{' (fixed)' if fit.gamma_fixed else ''}\n"
            f"FWHM = {fit.fwhm:.1f} MHz\n"
            f"R² = {fit.r2:.3f}"
        )
        props = dict(boxstyle="round", facecolor="wheat", alpha=0.8)
        ax.text(0.02, 0.97, textstr, transform=ax.transAxes, fontsize=10, verticalalignment="top", bbox=props)

    ax.grid(alpha=0.3, linestyle="--")
    ax.legend(fontsize=10, loc="upper right")
    ax.set_xlim(np.min(table["detuning_MHz"]), np.max(table["detuning_MHz"]))
    plt.tight_layout()

    directory = os.path.dirname(output_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    plt.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"  Spectrum plot saved to {output_path}")
    return fig
