"""Spectral-diffusion width against Stark shift."""

import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from ..fit.sqrt_law import sqrt_law_table

logger = logging.getLogger(__name__)


def sdlaw_table(shifts, sigmas, sigma_errs=None, fit=None):
    """
    Measured points and, with a fit, the model value at every point.

    Returns:
        DataFrame with shift_MHz, sigma_MHz, sigma_err_MHz[, sigma_model_MHz]
    """
    df = pd.DataFrame({
        "shift_MHz": np.asarray(shifts, dtype=float),
        "sigma_MHz": np.asarray(sigmas, dtype=float),
        "sigma_err_MHz": np.asarray(sigma_errs, dtype=float) if sigma_errs is not None else np.nan,
    })
    if fit is not None:
        df["sigma_model_MHz"] = fit.predict(df["shift_MHz"])
    return df.sort_values("shift_MHz").reset_index(drop=True)


def create_sdlaw_plot(table, fit=None, output_path="outputs/sdlaw.png"):
    """
    sigma versus |shift| with the square-root law overlaid.

    Returns:
        Figure object
    """
    fig, ax = plt.subplots(figsize=(10, 6))
    errs = table["sigma_err_MHz"] if table["sigma_err_MHz"].notna().any() else None
    ax.errorbar(
        table["shift_MHz"] / 1000.0, table["sigma_MHz"], yerr=errs,
        fmt="o", color="#2c3e50", ecolor="#7f8c8d", capsize=3, label="Measured",
    )
    if fit is not None:
        grid = np.linspace(0.0, table["shift_MHz"].max() * 1.05, 200)
        curve = sqrt_law_table(fit, grid)
        ax.plot(curve["shift_MHz"] / 1000.0, curve["sigma_model_MHz"], "-", color="#e74c3c", linewidth=2,
                label=f"a = {fit.a:.3f} $\\pm$ {fit.a_err:.3f} MHz")

    ax.set_xlabel("|Stark shift| (GHz)", fontsize=12, fontweight="bold")
    ax.set_ylabel("$\\sigma$ (MHz)", fontsize=12, fontweight="bold")
    ax.set_title("Spectral diffusion versus Stark shift", fontsize=14, fontweight="bold", pad=20)
    ax.grid(alpha=0.3, linestyle="--")
    ax.legend(fontsize=10)
    plt.tight_layout()

    directory = os.path.dirname(output_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    plt.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"  Sqrt-law plot saved to {output_path}")
    return fig
