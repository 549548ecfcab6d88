"""Polarizability difference from electronic level data (sum over states)."""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .. import config
from ..errors import DataError, DegeneracyError
from .constants import DEBYE2_PER_EV_TO_KAPPA

logger = logging.getLogger(__name__)

AXES = ("x", "y", "z")


@dataclass(frozen=True)
class LevelData:
    """
    Electronic levels along one molecular axis.

    energies[0] is the ground state, energies[1] the emitting state.
    dipoles[i, j] is |<i|mu|j>| in Debye.
    """

    energies: np.ndarray
    dipoles: np.ndarray

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float)
        dipoles = np.asarray(self.dipoles, dtype=float)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "dipoles", dipoles)

        n = len(energies)
        if dipoles.shape != (n, n):
            raise DataError(f"Dipole matrix must be {n}x{n}, got {dipoles.shape}")
        if np.any(dipoles < 0):
            raise DataError("Dipole magnitudes must be >= 0")
        if not np.allclose(dipoles, dipoles.T):
            raise DataError("Dipole matrix must be symmetric")
        if np.any(np.diag(dipoles) != 0):
            raise DataError("Dipole matrix must have a zero diagonal")
        if np.any(np.diff(energies) == 0):
            raise DegeneracyError(f"Degenerate level energies: {energies.tolist()}")
        if np.any(np.diff(energies) < 0):
            raise DataError(f"Level energies must be strictly increasing: {energies.tolist()}")


def _state_sum(levels, state):
    energies = levels.energies
    total = 0.0
    for n in range(len(energies)):
        if n == state:
            continue
        gap = energies[n] - energies[state]
        if gap == 0:
            raise DegeneracyError(f"Levels {state} and {n} are degenerate")
        total += levels.dipoles[state, n] ** 2 / gap
    return total


def alpha_sum_over_states(levels, axis="x"):
    """
    Second-order polarizability difference (excited minus ground) as kappa.

    kappa = (1/2h) [ sum_{n!=1} |mu_1n|^2/(E_n-E_1) - sum_{n!=0} |mu_0n|^2/(E_n-E_0) ]

    The sign is not forced: a negative value is returned as is.

    Args:
        levels: LevelData for the requested axis
        axis: Axis label, kept for reporting

    Returns:
        kappa in MHz/(kV/cm)^2
    """
    if axis not in AXES:
        raise DataError(f"Unknown axis '{axis}', expected one of {AXES}")
    if len(levels.energies) < 2:
        raise DataError("Need at least two levels")

    bracket = _state_sum(levels, 1) - _state_sum(levels, 0)
    kappa = 0.5 * bracket * DEBYE2_PER_EV_TO_KAPPA
    logger.debug(f"  kappa_{axis}{axis} from {len(levels.energies)} levels: {kappa:.6g}")
    return kappa


def alpha_three_level(d01, d12, e10, e21):
    """
    Three-level truncation of the sum over states.

    Args:
        d01: Ground-to-emitting transition dipole, Debye
        d12: Emitting-to-upper transition dipole, Debye
        e10: E1 - E0, eV
        e21: E2 - E1, eV

    Returns:
        kappa in MHz/(kV/cm)^2
    """
    if e10 <= 0 or e21 <= 0:
        raise DataError(f"Level gaps must be positive, got e10={e10}, e21={e21}")
    return 0.5 * (d12**2 / e21 - 2.0 * d01**2 / e10) * DEBYE2_PER_EV_TO_KAPPA


def three_level_data(d01, d12, e10, e21):
    """LevelData for the truncated ground / emitting / upper system (no 0-2 dipole)."""
    dipoles = np.zeros((3, 3))
    dipoles[0, 1] = dipoles[1, 0] = d01
    dipoles[1, 2] = dipoles[2, 1] = d12
    return LevelData(energies=[0.0, e10, e10 + e21], dipoles=dipoles)


def sanity_check(kappa, band=config.KAPPA_SANITY_BAND):
    """
    Flag a kappa outside the band usually observed for DBT.

    Returns:
        True if kappa lies inside the band
    """
    inside = bool(band[0] <= kappa <= band[1])
    if not inside:
        logger.warning(
            f"  kappa = {kappa:.4g} MHz/(kV/cm)^2 lies outside the expected band "
            f"{band[0]}-{band[1]}; no rescaling applied"
        )
    return inside


def load_level_data(filepath):
    """
    Load level data from a pair table.

    Expected format:
    # energies_eV: 0.0, 1.6, 3.6
    i,j,dipole_D
    0,1,12.0
    1,2,25.0

    Args:
        filepath: Path to the CSV table

    Returns:
        LevelData
    """
    energies = None
    with open(filepath) as f:
        for line in f:
            line = line.strip()
            if line.startswith("#") and "energies_eV" in line:
                values = line.split(":", 1)[1]
                energies = [float(v) for v in values.split(",") if v.strip()]
                break
    if energies is None:
        raise DataError(f"{filepath}: missing '# energies_eV: ...' line")

    df = pd.read_csv(filepath, comment="#")
    missing = {"i", "j", "dipole_D"} - set(df.columns)
    if missing:
        raise DataError(f"{filepath}: missing columns {sorted(missing)}")

    n = len(energies)
    dipoles = np.zeros((n, n))
    for _, row in df.iterrows():
        i, j = int(row["i"]), int(row["j"])
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise DataError(f"{filepath}: bad level pair ({i}, {j}) for {n} levels")
        dipoles[i, j] = dipoles[j, i] = float(row["dipole_D"])

    return LevelData(energies=energies, dipoles=dipoles)
