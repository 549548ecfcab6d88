"""Anisotropy calibration from measured spectral-diffusion triples."""

import logging
from dataclasses import dataclass, fields, replace

import numpy as np

from ..errors import DataError
from ..physics.stark import NoiseModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnisotropyCalibration:
    """
    Per-axis sqrt-law products a_i = kappa_ii * sigma_Ei^2 (MHz) and the
    measurements they came from. sigma_base is assumed shared by both axes.
    """

    sigma_base: float
    sigma_x: float
    shift_x: float
    sigma_z: float
    shift_z: float
    a_x: float
    a_z: float
    post_shift_ratio: float
    increase_ratio: float

    def to_dict(self):
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}

    @classmethod
    def from_dict(cls, values):
        """Rebuild from a stored document, recomputing the derived values."""
        try:
            return calibrate_anisotropy(
                values["sigma_base"], values["sigma_x"], values["shift_x"], values["sigma_z"], values["shift_z"]
            )
        except KeyError as e:
            raise DataError(f"Calibration is missing {e.args[0]}") from e


def calibrate_anisotropy(sigma_base, sigma_x, shift_x, sigma_z, shift_z):
    """
    Invert the sqrt law on both axes.

    Args:
        sigma_base: Width at the parabola vertex, MHz
        sigma_x: Width after tuning along x by shift_x, MHz
        shift_x: |shift| of the x-tuned measurement, MHz
        sigma_z: Width after tuning along z by shift_z, MHz
        shift_z: |shift| of the z-tuned measurement, MHz

    Returns:
        AnisotropyCalibration
    """
    if not (shift_x > 0 and shift_z > 0):
        raise DataError(f"Shifts must be > 0, got shift_x={shift_x}, shift_z={shift_z}")
    if sigma_base < 0:
        raise DataError(f"sigma_base must be >= 0, got {sigma_base}")
    if sigma_x < sigma_base:
        raise DataError(f"sigma_x ({sigma_x}) is below sigma_base ({sigma_base})")
    if sigma_z < sigma_base:
        raise DataError(f"sigma_z ({sigma_z}) is below sigma_base ({sigma_base})")

    a_x = (sigma_x**2 - sigma_base**2) / (4.0 * shift_x)
    a_z = (sigma_z**2 - sigma_base**2) / (4.0 * shift_z)
    post_ratio = sigma_x / sigma_z if sigma_z > 0 else np.inf
    increase_ratio = (sigma_x - sigma_base) / (sigma_z - sigma_base) if sigma_z > sigma_base else np.inf

    cal = AnisotropyCalibration(
        sigma_base=float(sigma_base),
        sigma_x=float(sigma_x),
        shift_x=float(shift_x),
        sigma_z=float(sigma_z),
        shift_z=float(shift_z),
        a_x=float(a_x),
        a_z=float(a_z),
        post_shift_ratio=float(post_ratio),
        increase_ratio=float(increase_ratio),
    )
    logger.info(
        f"  Calibrated a_x = {cal.a_x:.4f} MHz, a_z = {cal.a_z:.4f} MHz "
        f"(ratios {cal.post_shift_ratio:.2f}, {cal.increase_ratio:.1f})"
    )
    return cal


def noise_from_calibration(cal, mol, kappa_zz=None):
    """
    Split the calibrated products into field noise for a given molecule.

    Only a_z is measurable, not kappa_zz and sigma_Ez separately. When
    neither the argument nor the molecule supplies kappa_zz, kappa_xx is
    used and the assumption is logged.

    Args:
        cal: AnisotropyCalibration
        mol: MoleculeModel (kappa_xx > 0)
        kappa_zz: Vertical polarizability to assume, MHz/(kV/cm)^2

    Returns:
        (MoleculeModel with kappa_zz set, NoiseModel)
    """
    if not mol.kappa_xx > 0:
        raise DataError("noise_from_calibration needs kappa_xx > 0")
    if kappa_zz is None:
        if mol.kappa_zz > 0:
            kappa_zz = mol.kappa_zz
        else:
            kappa_zz = mol.kappa_xx
            logger.info(f"  Assuming kappa_zz = kappa_xx = {kappa_zz:.3f} MHz/(kV/cm)^2")
    if not kappa_zz > 0:
        raise DataError(f"kappa_zz must be > 0, got {kappa_zz}")

    noise = NoiseModel(
        sigma_ex=float(np.sqrt(cal.a_x / mol.kappa_xx)),
        sigma_ez=float(np.sqrt(cal.a_z / kappa_zz)),
        sigma0=cal.sigma_base,
    )
    return replace(mol, kappa_zz=float(kappa_zz)), noise
