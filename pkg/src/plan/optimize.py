"""Minimum spectral-diffusion operating point for a target shift."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import config
from ..errors import DataError, InfeasiblePlanError
from ..physics.stark import FieldVector, sd_sigma, stark_shift
from .isofrequency import check_plannable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TuningConstraints:
    """
    Box on the external field and the shift tolerance of a plan.

    noise is used by plan_min_sd when no NoiseModel is passed to it;
    operating_voltage is carried into the plan and becomes the default
    operating voltage of synthesize_schedule.
    """

    e_x_max: float = config.E_X_MAX
    e_z_max: float = config.E_Z_MAX
    noise: object = None
    operating_voltage: float = None
    tolerance: float = config.SHIFT_TOLERANCE

    def __post_init__(self):
        if not (self.e_x_max > 0 and self.e_z_max > 0):
            raise DataError(f"Field limits must be > 0, got e_x_max={self.e_x_max}, e_z_max={self.e_z_max}")
        if not self.tolerance > 0:
            raise DataError(f"Shift tolerance must be > 0, got {self.tolerance}")


@dataclass(frozen=True)
class TuningPlan:
    """Chosen operating field for a target shift and how to get there."""

    target_shift: float
    e_x: float
    e_z: float
    predicted_sigma: float
    achieved_shift: float
    tolerance: float
    feasible: bool
    e_offset_x: float = 0.0
    e_offset_z: float = 0.0
    binding: str = None
    operating_voltage: float = None
    schedule: object = None
    provenance: dict = field(default_factory=dict)

    @property
    def field(self):
        return FieldVector(self.e_x, self.e_z)

    def to_dict(self):
        return {
            "target_shift": float(self.target_shift),
            "achieved_shift": float(self.achieved_shift),
            "tolerance": float(self.tolerance),
            "field": {"e_x": float(self.e_x), "e_z": float(self.e_z)},
            "predicted_sigma": float(self.predicted_sigma),
            "feasible": bool(self.feasible),
            "binding": self.binding,
            "e_offset": {"e_x": float(self.e_offset_x), "e_z": float(self.e_offset_z)},
            "operating_voltage": None if self.operating_voltage is None else float(self.operating_voltage),
            "schedule": self.schedule.to_dict() if self.schedule is not None else None,
            "provenance": dict(self.provenance),
        }


def _magnitude_range(offset, limit):
    """Reachable |p| for p = e + offset with |e| <= limit."""
    return max(0.0, abs(offset) - limit), abs(offset) + limit


def _pick_sign(magnitude, offset, limit, prefer_positive=False):
    """Local-field component of the given magnitude whose external part fits the box."""
    options = []
    for sign in (1.0, -1.0):
        p = sign * magnitude
        e = p - offset
        if abs(e) <= limit * (1 + 1e-9):
            options.append((abs(e), 0 if (prefer_positive and e >= 0) else 1, p))
    if not options:
        return None
    if prefer_positive:
        options.sort(key=lambda o: (o[1], o[0]))
    else:
        options.sort()
    return options[0][2]


def plan_min_sd(mol, noise, target_shift, constraints=None):
    """
    Lowest-sigma field on the isofrequency curve inside the box constraints.

    On the curve the variance is sigma0^2 + 4 a_x s_x + 4 a_z s_z with
    a_i = kappa_ii sigma_Ei^2 and s_x + s_z = |target|, so it is linear in the
    x share s_x and the exact minimum sits at an end of the feasible share
    interval: the axis with the smaller a takes as much of the shift as the
    box allows. Ties go to the x (electrode-only) axis.

    Args:
        mol: MoleculeModel with d = 0
        noise: NoiseModel (constraints.noise if None)
        target_shift: Desired shift, MHz (<= 0)
        constraints: TuningConstraints (defaults if None)

    Returns:
        TuningPlan (without schedule)
    """
    constraints = constraints or TuningConstraints()
    noise = noise if noise is not None else constraints.noise
    if noise is None:
        raise DataError("No noise model: pass one or set TuningConstraints.noise")
    check_plannable(mol)
    if target_shift > 0:
        raise InfeasiblePlanError(
            f"Target {target_shift:+.0f} MHz is a blue shift; the quadratic model only red-shifts",
            binding="target_shift",
        )
    magnitude = -float(target_shift)

    lo_x, hi_x = _magnitude_range(mol.e0_x, constraints.e_x_max)
    lo_z, hi_z = _magnitude_range(mol.e0_z, constraints.e_z_max)
    sx_lo, sx_hi = mol.kappa_xx * lo_x**2, mol.kappa_xx * hi_x**2
    sz_lo, sz_hi = mol.kappa_zz * lo_z**2, mol.kappa_zz * hi_z**2

    share_lo = max(sx_lo, magnitude - sz_hi)
    share_hi = min(sx_hi, magnitude - sz_lo)
    if share_lo > share_hi + 1e-9 * max(magnitude, 1.0):
        if magnitude > sx_hi + sz_hi:
            binding = "e_x_max" if mol.kappa_zz == 0 else ("e_z_max" if mol.kappa_xx == 0 else "e_x_max+e_z_max")
            reason = f"needs more than the {sx_hi + sz_hi:.0f} MHz reachable inside the field box"
        else:
            binding = "e0_offset"
            reason = "the emitter offset keeps the shift above the target everywhere in the box"
        raise InfeasiblePlanError(f"Target {target_shift:.0f} MHz unreachable: {reason}", binding=binding)

    a_x = mol.kappa_xx * noise.sigma_ex**2
    a_z = mol.kappa_zz * noise.sigma_ez**2
    if mol.kappa_xx == 0:
        share = 0.0
    elif mol.kappa_zz == 0:
        share = magnitude
    else:
        share = share_hi if a_x <= a_z else share_lo
    share = min(max(share, share_lo), share_hi)

    if mol.kappa_xx > 0:
        p_x = _pick_sign(np.sqrt(max(share, 0.0) / mol.kappa_xx), mol.e0_x, constraints.e_x_max)
    else:
        p_x = mol.e0_x
    if mol.kappa_zz > 0:
        p_z = _pick_sign(np.sqrt(max(magnitude - share, 0.0) / mol.kappa_zz), mol.e0_z, constraints.e_z_max,
                         prefer_positive=True)
    else:
        p_z = mol.e0_z

    e = FieldVector(p_x - mol.e0_x, p_z - mol.e0_z)
    achieved = stark_shift(mol, e)
    sigma = sd_sigma(mol, e, noise)

    binding = None
    if np.isclose(abs(e.e_x), constraints.e_x_max) and mol.kappa_xx > 0:
        binding = "e_x_max"
    elif np.isclose(abs(e.e_z), constraints.e_z_max) and mol.kappa_zz > 0:
        binding = "e_z_max"

    plan = TuningPlan(
        target_shift=float(target_shift),
        e_x=float(e.e_x),
        e_z=float(e.e_z),
        predicted_sigma=float(sigma),
        achieved_shift=float(achieved),
        tolerance=constraints.tolerance,
        feasible=abs(achieved - target_shift) <= constraints.tolerance,
        e_offset_x=mol.e0_x,
        e_offset_z=mol.e0_z,
        binding=binding,
        operating_voltage=constraints.operating_voltage,
        provenance={
            "a_x": float(a_x),
            "a_z": float(a_z),
            "sigma0": float(noise.sigma0),
            "kappa_xx": float(mol.kappa_xx),
            "kappa_zz": float(mol.kappa_zz),
        },
    )
    logger.info(
        f"  Plan for {target_shift:.0f} MHz: E = ({plan.e_x:.1f}, {plan.e_z:.1f}) kV/cm, "
        f"predicted sigma {plan.predicted_sigma:.1f} MHz"
    )
    return plan


def grid_oracle(mol, noise, target_shift, constraints, n_points=20001):
    """
    Brute-force reference: densest sampling of the isofrequency curve in the box.

    Returns:
        (sigma, FieldVector) of the best sampled point, or (inf, None)
    """
    magnitude = -float(target_shift)
    theta = np.linspace(0.0, 2.0 * np.pi, n_points)
    if mol.kappa_xx > 0 and mol.kappa_zz > 0:
        p_x = np.sqrt(magnitude / mol.kappa_xx) * np.cos(theta)
        p_z = np.sqrt(magnitude / mol.kappa_zz) * np.sin(theta)
    elif mol.kappa_zz == 0:
        p_x = np.full(n_points, np.sqrt(magnitude / mol.kappa_xx)) * np.sign(np.cos(theta))
        p_z = np.linspace(-constraints.e_z_max, constraints.e_z_max, n_points) + mol.e0_z
    else:
        p_z = np.full(n_points, np.sqrt(magnitude / mol.kappa_zz)) * np.sign(np.sin(theta))
        p_x = np.linspace(-constraints.e_x_max, constraints.e_x_max, n_points) + mol.e0_x
    e_x, e_z = p_x - mol.e0_x, p_z - mol.e0_z
    inside = (np.abs(e_x) <= constraints.e_x_max) & (np.abs(e_z) <= constraints.e_z_max)
    if not np.any(inside):
        return np.inf, None
    sigmas = sd_sigma(mol, FieldVector(e_x[inside], e_z[inside]), noise)
    best = int(np.argmin(sigmas))
    return float(sigmas[best]), FieldVector(float(e_x[inside][best]), float(e_z[inside][best]))
