"""Quadratic Stark shift of the ZPL and its spectral-diffusion width.

Units: frequencies and linewidths in MHz (linear frequency), fields in
kV/cm, kappa in MHz/(kV/cm)^2 with kappa = alpha / h.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .. import config
from ..errors import DataError


@dataclass(frozen=True)
class MoleculeModel:
    """Single emitter: ZPL, Stark coefficients, linewidth and brightness."""

    nu_zpl: float = 381.0
    kappa_xx: float = 1.82
    kappa_yy: float = 0.0
    kappa_zz: float = 0.0
    d_x: float = 0.0
    d_z: float = 0.0
    e0_x: float = 0.0
    e0_z: float = 0.0
    gamma0: float = 80.0
    peak_rate: float = 20000.0
    dw_qy: float = 0.35
    name: str = "molecule"

    def __post_init__(self):
        problems = molecule_problems(self)
        if problems:
            raise DataError(f"Invalid molecule '{self.name}': " + "; ".join(problems))

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})

    def with_offset(self, e0_x=None, e0_z=None):
        return replace(
            self,
            e0_x=self.e0_x if e0_x is None else e0_x,
            e0_z=self.e0_z if e0_z is None else e0_z,
        )


def molecule_problems(mol):
    """
    List violated MoleculeModel invariants.

    Args:
        mol: Any object with the MoleculeModel attributes

    Returns:
        List of "field: constraint" strings (empty when valid)
    """
    problems = []
    for name in ("kappa_xx", "kappa_yy", "kappa_zz"):
        if getattr(mol, name) < 0:
            problems.append(f"{name}: must be >= 0")
    if not mol.gamma0 > 0:
        problems.append("gamma0: must be > 0")
    if mol.peak_rate < 0:
        problems.append("peak_rate: must be >= 0")
    if not 0 < mol.dw_qy <= 1:
        problems.append("dw_qy: must be in (0, 1]")
    return problems


@dataclass(frozen=True)
class FieldVector:
    """In-plane (x) and vertical (z) field components, kV/cm."""

    e_x: float = 0.0
    e_z: float = 0.0

    def __post_init__(self):
        if not (np.all(np.isfinite(self.e_x)) and np.all(np.isfinite(self.e_z))):
            raise DataError(f"Field components must be finite, got ({self.e_x}, {self.e_z})")

    def __add__(self, other):
        return FieldVector(self.e_x + other.e_x, self.e_z + other.e_z)


@dataclass(frozen=True)
class NoiseModel:
    """
    Gaussian field noise with a fast and a slow Ornstein-Uhlenbeck component.

    sigma_ex / sigma_ez are the stationary std of the total field noise per
    axis; w_fast is the share of the variance carried by the fast component.
    sigma0 is a residual frequency noise (MHz) with the same time structure.
    """

    sigma_ex: float = config.NOISE_SIGMA_E
    sigma_ez: float = 0.0
    tau_fast: float = config.NOISE_TAU_FAST
    tau_slow: float = config.NOISE_TAU_SLOW
    w_fast: float = config.NOISE_W_FAST
    sigma0: float = 0.0

    def __post_init__(self):
        problems = noise_problems(self)
        if problems:
            raise DataError("Invalid noise model: " + "; ".join(problems))

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})

    @classmethod
    def silent(cls):
        return cls(sigma_ex=0.0, sigma_ez=0.0, sigma0=0.0)


def noise_problems(noise):
    problems = []
    for name in ("sigma_ex", "sigma_ez", "sigma0"):
        if getattr(noise, name) < 0:
            problems.append(f"{name}: must be >= 0")
    if not 0 < noise.tau_fast <= noise.tau_slow:
        problems.append("tau_fast, tau_slow: need 0 < tau_fast <= tau_slow")
    if not 0 <= noise.w_fast <= 1:
        problems.append("w_fast: must be in [0, 1]")
    return problems


def stark_shift(mol, e):
    """
    ZPL frequency shift at a given external field.

    delta_nu = -d.E_loc - kappa_xx E_x,loc^2 - kappa_zz E_z,loc^2, where the
    local field includes the emitter's intrinsic offset e0.

    Args:
        mol: MoleculeModel
        e: FieldVector (components may be numpy arrays)

    Returns:
        Shift in MHz (negative = red shift)
    """
    ex = np.asarray(e.e_x, dtype=float) + mol.e0_x
    ez = np.asarray(e.e_z, dtype=float) + mol.e0_z
    shift = -mol.d_x * ex - mol.d_z * ez - mol.kappa_xx * ex**2 - mol.kappa_zz * ez**2
    return float(shift) if shift.ndim == 0 else shift


def shift_gradient(mol, e):
    """
    Gradient of stark_shift with respect to the external field.

    Returns:
        (d shift / d E_x, d shift / d E_z) in MHz/(kV/cm)
    """
    ex = np.asarray(e.e_x, dtype=float) + mol.e0_x
    ez = np.asarray(e.e_z, dtype=float) + mol.e0_z
    gx = -mol.d_x - 2.0 * mol.kappa_xx * ex
    gz = -mol.d_z - 2.0 * mol.kappa_zz * ez
    if gx.ndim == 0:
        return float(gx), float(gz)
    return gx, gz


def sd_sigma(mol, e, noise):
    """
    Spectral-diffusion width from first-order propagation of the field noise.

    Each axis contributes |d shift/dE_i| * sigma_Ei; contributions and the
    residual floor sigma0 add in quadrature.

    Args:
        mol: MoleculeModel
        e: FieldVector
        noise: NoiseModel

    Returns:
        sigma in MHz
    """
    gx, gz = shift_gradient(mol, e)
    var = (np.abs(gx) * noise.sigma_ex) ** 2 + (np.abs(gz) * noise.sigma_ez) ** 2 + noise.sigma0**2
    sigma = np.sqrt(var)
    return float(sigma) if np.ndim(sigma) == 0 else sigma


def sqrt_law_sigma(shift_mag, a, sigma0=0.0):
    """
    Square-root law sigma = sqrt(4 a |shift| + sigma0^2).

    Args:
        shift_mag: |shift| in MHz
        a: kappa * sigma_E^2 product, MHz
        sigma0: quadrature offset, MHz

    Returns:
        sigma in MHz
    """
    shift_mag = np.asarray(shift_mag, dtype=float)
    if np.any(shift_mag < 0) or a < 0 or sigma0 < 0:
        raise DataError(
            f"sqrt law needs non-negative inputs, got shift={shift_mag}, a={a}, sigma0={sigma0}"
        )
    sigma = np.sqrt(4.0 * a * shift_mag + sigma0**2)
    return float(sigma) if sigma.ndim == 0 else sigma
