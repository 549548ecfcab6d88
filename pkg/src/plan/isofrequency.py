"""Isofrequency curves of the Stark paraboloid."""

import numpy as np

from .. import config
from ..errors import DataError, InfeasiblePlanError
from ..physics.stark import FieldVector


def check_plannable(mol):
    if mol.d_x != 0 or mol.d_z != 0:
        raise DataError("Isofrequency planning assumes a centrosymmetric emitter (d_x = d_z = 0)")
    if mol.kappa_xx == 0 and mol.kappa_zz == 0:
        raise DataError("kappa_xx and kappa_zz are both zero: the shift cannot be tuned")


def isofrequency_locus(mol, target_shift, n_points=360, extent=config.E_Z_MAX):
    """
    External fields producing a given shift.

    The local field p = e + e0 lies on the ellipse
    kappa_xx p_x^2 + kappa_zz p_z^2 = |target|; the returned points are the
    external fields e = p - e0. With one kappa zero the ellipse degenerates
    into two straight lines, sampled over +-extent along the free axis.

    Args:
        mol: MoleculeModel with d = 0
        target_shift: Shift to hold, MHz (<= 0)
        n_points: Points on the curve
        extent: Half length of degenerate lines, kV/cm

    Returns:
        List of FieldVector
    """
    check_plannable(mol)
    if target_shift > 0:
        raise InfeasiblePlanError(
            f"Target {target_shift:+.0f} MHz is a blue shift; the quadratic model only red-shifts",
            binding="target_shift",
        )
    magnitude = -float(target_shift)
    if magnitude == 0:
        return [FieldVector(-mol.e0_x, -mol.e0_z)]

    if mol.kappa_zz == 0:
        p_x = np.sqrt(magnitude / mol.kappa_xx)
        free = np.linspace(-extent, extent, max(n_points // 2, 1))
        points = [(sign * p_x, z) for sign in (1.0, -1.0) for z in free]
    elif mol.kappa_xx == 0:
        p_z = np.sqrt(magnitude / mol.kappa_zz)
        free = np.linspace(-extent, extent, max(n_points // 2, 1))
        points = [(x, sign * p_z) for sign in (1.0, -1.0) for x in free]
    else:
        theta = np.linspace(0.0, 2.0 * np.pi, n_points, endpoint=False)
        p_x = np.sqrt(magnitude / mol.kappa_xx) * np.cos(theta)
        p_z = np.sqrt(magnitude / mol.kappa_zz) * np.sin(theta)
        points = zip(p_x, p_z)

    return [FieldVector(float(x) - mol.e0_x, float(z) - mol.e0_z) for x, z in points]
