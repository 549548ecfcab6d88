"""Stark parabola: line centre against voltage."""

import logging
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

logger = logging.getLogger(__name__)


def parabola_table(centers, fit=None):
    """
    Line-centre points (one track or several) with the fitted parabola.

    Returns:
        DataFrame with track, voltage_V, center_MHz, center_err_MHz[, model_MHz, residual_MHz]
    """
    df = centers[["track", "voltage_V", "center_MHz", "center_err_MHz"]].copy()
    if fit is not None:
        df["model_MHz"] = fit.predict(df["voltage_V"])
        df["residual_MHz"] = df["center_MHz"] - df["model_MHz"]
    return df


def create_parabola_plot(table, fit=None, output_path="outputs/parabola.png"):
    """
    Line centres versus voltage, one colour per track.

    Returns:
        Figure object
    """
    fig, ax = plt.subplots(figsize=(10, 6))
    for track, group in table.groupby("track"):
        ax.errorbar(group["voltage_V"], group["center_MHz"] / 1000.0, yerr=group["center_err_MHz"] / 1000.0,
                    fmt="o", markersize=4, capsize=2, label=f"Line {track}")
    if fit is not None:
        grid = np.linspace(table["voltage_V"].min(), table["voltage_V"].max(), 200)
        ax.plot(grid, fit.predict(grid) / 1000.0, "-", color="#e74c3c", linewidth=2,
                label=f"$\\kappa_{{xx}}$ = {fit.kappa_xx:.2f} $\\pm$ {fit.kappa_xx_err:.2f}")
        if np.isfinite(fit.vertex_voltage):
            ax.axvline(fit.vertex_voltage, color="black", linestyle="--", linewidth=1)

    ax.set_xlabel("Voltage (V)", fontsize=12, fontweight="bold")
    ax.set_ylabel("Line centre (GHz)", fontsize=12, fontweight="bold")
    ax.set_title("Stark parabola", fontsize=14, fontweight="bold", pad=20)
    ax.grid(alpha=0.3, linestyle="--")
    ax.legend(fontsize=10)
    plt.tight_layout()

    directory = os.path.dirname(output_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    plt.savefig(output_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    logger.info(f"  Parabola plot saved to {output_path}")
    return fig
