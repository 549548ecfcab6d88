"""Electrode voltage to field mapping and the persistent field state."""

from dataclasses import dataclass, replace

import numpy as np

from .. import config
from ..errors import DataError
from ..physics.stark import FieldVector


@dataclass(frozen=True)
class ElectrodeGeometry:
    """Parametric electrode: e_x = g * V."""

    geometry_factor: float = config.GEOMETRY_FACTOR
    voltage_range: tuple = config.VOLTAGE_RANGE

    def __post_init__(self):
        if not self.geometry_factor > 0:
            raise DataError(f"geometry_factor must be > 0, got {self.geometry_factor}")
        v_min, v_max = self.voltage_range
        if not v_min < v_max:
            raise DataError(f"voltage_range must satisfy V_min < V_max, got {self.voltage_range}")
        object.__setattr__(self, "voltage_range", (float(v_min), float(v_max)))

    def check_voltage(self, v):
        v_min, v_max = self.voltage_range
        v_arr = np.asarray(v, dtype=float)
        if np.any(v_arr < v_min) or np.any(v_arr > v_max):
            raise DataError(f"Voltage {v} outside range [{v_min}, {v_max}] V")


@dataclass(frozen=True)
class FieldState:
    """
    Controllable and persistent field environment of one session.

    Args:
        v_applied: Electrode voltage, V
        e_screen_x: In-plane field of trapped charges, kV/cm
        e_z_charge: Vertical field of trapped charges, kV/cm
    """

    v_applied: float = 0.0
    e_screen_x: float = 0.0
    e_z_charge: float = 0.0

    def __post_init__(self):
        values = (self.v_applied, self.e_screen_x, self.e_z_charge)
        if not all(np.isfinite(values)):
            raise DataError(f"FieldState components must be finite, got {values}")

    def at_voltage(self, v):
        return replace(self, v_applied=float(v))


def field_from_voltage(v, geom):
    """
    In-plane electrode field.

    Args:
        v: Voltage(s), V
        geom: ElectrodeGeometry

    Returns:
        e_x in kV/cm
    """
    geom.check_voltage(v)
    e_x = geom.geometry_factor * np.asarray(v, dtype=float)
    return float(e_x) if e_x.ndim == 0 else e_x


def local_field(state, geom):
    """
    External field at the emitter: electrode field plus trapped-charge fields.

    The emitter's own offset e0 is added by the Stark model, not here.

    Returns:
        FieldVector
    """
    e_x = field_from_voltage(state.v_applied, geom) + state.e_screen_x
    return FieldVector(e_x=e_x, e_z=state.e_z_charge)
