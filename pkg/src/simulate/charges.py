"""Trapped-charge dynamics under optical pumping (OSS and EGOSS).

Both charge fields follow first-order laws in the pump dose D = I * t:
  screening:  de_s/dD = -k_screen (e_drive + e_s + e_offset)
  vertical:   de_z/dD =  r_z (1 - e_z / e_z_sat)
and are integrated in closed form.
"""

import logging
from dataclasses import dataclass, fields, replace

import numpy as np

from .. import config
from ..errors import DataError
from .electrodes import field_from_voltage

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChargeDynamics:
    """Rates of the trapped-charge fields; decay_time None means no relaxation."""

    k_screen: float = config.K_SCREEN
    r_z: float = config.R_Z
    e_z_sat: float = config.E_Z_SAT
    decay_time: float = config.DECAY_TIME

    def __post_init__(self):
        for name in ("k_screen", "r_z", "e_z_sat"):
            if not getattr(self, name) > 0:
                raise DataError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.decay_time is not None and not self.decay_time > 0:
            raise DataError(f"decay_time must be > 0 or None, got {self.decay_time}")

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})


def screening_after(e_screen, e_drive, dose, dyn, e_offset_x=0.0):
    """Screening field after a pump dose with drive field e_drive (= g * V)."""
    target = -(e_drive + e_offset_x)
    return target + (e_screen - target) * np.exp(-dyn.k_screen * dose)


def z_field_after(e_z, dose, dyn):
    """Vertical charge field after a pump dose."""
    return dyn.e_z_sat - (dyn.e_z_sat - e_z) * np.exp(-dyn.r_z * dose / dyn.e_z_sat)


def _check_pulse(pump_intensity, duration):
    if duration < 0:
        raise DataError(f"Pump duration must be >= 0, got {duration}")
    if pump_intensity < 0:
        raise DataError(f"Pump intensity must be >= 0, got {pump_intensity}")


def apply_oss(state, dyn, pump_intensity, duration, e_offset_x=0.0):
    """
    Optical pumping with the electrodes grounded.

    Builds the vertical charge field and mildly screens whatever in-plane
    field the emitter sees at 0 V.

    Args:
        state: FieldState before the pulse
        dyn: ChargeDynamics
        pump_intensity: Pump intensity in units of the reference intensity
        duration: Pulse length, s
        e_offset_x: In-plane offset of the pumped emitter, kV/cm

    Returns:
        FieldState after the pulse
    """
    _check_pulse(pump_intensity, duration)
    if duration == 0 or pump_intensity == 0:
        return state

    dose = pump_intensity * duration
    new_state = replace(
        state,
        e_screen_x=float(screening_after(state.e_screen_x, 0.0, dose, dyn, e_offset_x)),
        e_z_charge=float(z_field_after(state.e_z_charge, dose, dyn)),
    )
    logger.info(
        f"  OSS {duration:.0f} s at I={pump_intensity:g}: e_z {state.e_z_charge:.2f} -> "
        f"{new_state.e_z_charge:.2f} kV/cm"
    )
    return new_state


def apply_egoss(state, dyn, pump_intensity, v_bias, duration, geom, e_offset_x=0.0):
    """
    Optical pumping under an electrode bias.

    Charges move to cancel the local in-plane field at the bias, so the
    screening field relaxes toward -(g * v_bias + e_offset_x) and the vertex
    of the Stark parabola moves to v_bias.

    Args:
        state: FieldState before the pulse
        dyn: ChargeDynamics
        pump_intensity: Pump intensity in units of the reference intensity
        v_bias: Bias during the pulse, V
        duration: Pulse length, s
        geom: ElectrodeGeometry
        e_offset_x: In-plane offset of the pumped emitter, kV/cm

    Returns:
        FieldState after the pulse, with v_applied = v_bias (unchanged state
        for a zero-length pulse)
    """
    _check_pulse(pump_intensity, duration)
    e_drive = field_from_voltage(v_bias, geom)
    if duration == 0:
        return state
    if pump_intensity == 0:
        return replace(state, v_applied=float(v_bias))

    dose = pump_intensity * duration
    new_state = replace(
        state,
        v_applied=float(v_bias),
        e_screen_x=float(screening_after(state.e_screen_x, e_drive, dose, dyn, e_offset_x)),
        e_z_charge=float(z_field_after(state.e_z_charge, dose, dyn)),
    )
    logger.info(
        f"  EGOSS {duration:.0f} s at {v_bias:+.1f} V: screening {state.e_screen_x:.2f} -> "
        f"{new_state.e_screen_x:.2f} kV/cm"
    )
    return new_state


def relax_charges(state, dyn, duration):
    """Slow decay of both trapped-charge fields while the pump is off."""
    if duration < 0:
        raise DataError(f"Wait duration must be >= 0, got {duration}")
    if dyn.decay_time is None or duration == 0:
        return state
    factor = float(np.exp(-duration / dyn.decay_time))
    return replace(state, e_screen_x=state.e_screen_x * factor, e_z_charge=state.e_z_charge * factor)
