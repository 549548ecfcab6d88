"""EGOSS schedules that bring the trapped-charge fields to a planned operating point.

Schedules are computed on the pump dose D = intensity * time by inverting the
closed-form charge laws of simulate.charges.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .. import config
from ..errors import DataError, InfeasiblePlanError
from ..simulate.charges import apply_egoss
from ..simulate.electrodes import FieldState

logger = logging.getLogger(__name__)

# Screening settles to 1% of its initial mismatch at least
SETTLE_LOG = np.log(100.0)


@dataclass(frozen=True)
class EgossStep:
    v_bias: float
    pump_intensity: float
    duration: float

    @property
    def dose(self):
        return self.pump_intensity * self.duration

    def to_dict(self):
        return {
            "v_bias": float(self.v_bias),
            "pump_intensity": float(self.pump_intensity),
            "duration": float(self.duration),
        }


@dataclass(frozen=True)
class EgossSchedule:
    """
    Ordered pump steps followed by a return to the operating voltage.

    expected_state is the field state the charge model predicts after the
    last step, already at the operating voltage.
    """

    steps: tuple
    operating_voltage: float
    expected_state: FieldState = None
    kind: str = "empty"
    notes: list = field(default_factory=list)

    @property
    def is_empty(self):
        return len(self.steps) == 0

    @property
    def total_duration(self):
        return float(sum(s.duration for s in self.steps))

    @property
    def total_dose(self):
        return float(sum(s.dose for s in self.steps))

    def to_dict(self):
        out = {
            "kind": self.kind,
            "operating_voltage": float(self.operating_voltage),
            "steps": [s.to_dict() for s in self.steps],
            "total_duration": self.total_duration,
        }
        if self.expected_state is not None:
            out["expected_state"] = {
                "v_applied": float(self.expected_state.v_applied),
                "e_screen_x": float(self.expected_state.e_screen_x),
                "e_z_charge": float(self.expected_state.e_z_charge),
            }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def field_tolerance(component, offset, kappa, tolerance):
    """
    Largest move of one field component that keeps its share of the shift
    error within tolerance / 2.

    Returns:
        Tolerance in kV/cm (inf when kappa is zero)
    """
    if kappa == 0:
        return np.inf
    p = abs(component + offset)
    return -p + np.sqrt(p**2 + tolerance / (2.0 * kappa))


def z_dose(e_z, e_z_start, dyn):
    """Pump dose that grows the vertical field from e_z_start to e_z (< e_z_sat)."""
    if e_z <= e_z_start:
        return 0.0
    return float(-(dyn.e_z_sat / dyn.r_z) * np.log((dyn.e_z_sat - e_z) / (dyn.e_z_sat - e_z_start)))


def _overdrive_bias(e_start, e_target, dose, e_offset_x, dyn, geom):
    """Bias that lands the screening field exactly on e_target after the given dose."""
    q = np.exp(-dyn.k_screen * dose)
    return (e_start * q - e_offset_x * (1.0 - q) - e_target) / (geom.geometry_factor * (1.0 - q))


def _in_range(v, geom):
    v_min, v_max = geom.voltage_range
    return v_min <= v <= v_max


def _limit_landing(e_start, e_target, e_offset_x, dyn, geom):
    """
    Dose after which a step at the voltage limit brings the screening field
    exactly to e_target.

    Returns:
        (v_limit, dose), or None when the target lies beyond that limit's fixed point
    """
    v_min, v_max = geom.voltage_range
    v_limit = v_max if e_target < e_start else v_min
    asymptote = -(geom.geometry_factor * v_limit + e_offset_x)
    if e_target == asymptote:
        return None
    ratio = (e_start - asymptote) / (e_target - asymptote)
    if not ratio > 1:
        return None
    return v_limit, float(np.log(ratio) / dyn.k_screen)


def synthesize_schedule(plan, dyn, geom, operating_voltage=None, state=None,
                        intensity=config.REFERENCE_PUMP_INTENSITY):
    """
    EGOSS steps after which the field at operating_voltage matches the plan.

    Tries, in order: one step at the direct bias (the bias whose screening
    fixed point is the target), a two-step schedule that reaches the target
    at the voltage limit and then holds at the direct bias until the
    vertical field is in its window, and one over-driven step stopped while
    the screening field passes the target. The vertical charge field only
    grows under pumping.

    Args:
        plan: Feasible TuningPlan
        dyn: ChargeDynamics
        geom: ElectrodeGeometry
        operating_voltage: Electrode voltage during the experiment, V
            (plan.operating_voltage if None)
        state: FieldState before the schedule (fresh sample if None)
        intensity: Pump intensity of every step

    Returns:
        EgossSchedule
    """
    if not plan.feasible:
        raise InfeasiblePlanError("Cannot schedule an infeasible plan", binding=plan.binding)
    if not intensity > 0:
        raise DataError(f"Pump intensity must be > 0, got {intensity}")
    if operating_voltage is None:
        operating_voltage = plan.operating_voltage
    if operating_voltage is None:
        raise DataError("No operating voltage: pass one or plan with TuningConstraints.operating_voltage")
    geom.check_voltage(operating_voltage)
    state = state or FieldState()

    g = geom.geometry_factor
    e_off = plan.e_offset_x
    kappa_xx = plan.provenance.get("kappa_xx", 0.0)
    kappa_zz = plan.provenance.get("kappa_zz", 0.0)

    e_s_target = plan.e_x - g * operating_voltage
    e_z_target = plan.e_z
    tol_x = field_tolerance(plan.e_x, plan.e_offset_x, kappa_xx, plan.tolerance)
    tol_z = field_tolerance(plan.e_z, plan.e_offset_z, kappa_zz, plan.tolerance)

    e_s0, e_z0 = state.e_screen_x, state.e_z_charge
    mismatch = e_s0 - e_s_target

    def finish(steps, kind, notes=()):
        end = apply_schedule(state, EgossSchedule(tuple(steps), operating_voltage), dyn, geom, e_off)
        schedule = EgossSchedule(tuple(steps), float(operating_voltage), end, kind, list(notes))
        logger.info(
            f"  Schedule ({kind}): {len(steps)} step(s), {schedule.total_duration:.0f} s of pumping, "
            f"screening {end.e_screen_x:.2f} kV/cm, e_z {end.e_z_charge:.2f} kV/cm"
        )
        return schedule

    if abs(mismatch) <= tol_x and abs(e_z0 - e_z_target) <= tol_z:
        return finish([], "empty")

    # vertical field window and the dose range that reaches it
    z_lo, z_hi = e_z_target - tol_z, e_z_target + tol_z
    if e_z0 > z_hi:
        raise InfeasiblePlanError(
            f"Vertical charge field {e_z0:.1f} kV/cm already exceeds the planned {e_z_target:.1f} kV/cm",
            binding="e_z_charge",
        )
    if z_lo >= dyn.e_z_sat:
        raise InfeasiblePlanError(
            f"Planned e_z {e_z_target:.1f} kV/cm is beyond saturation at {dyn.e_z_sat:.1f} kV/cm",
            binding="e_z_sat",
        )
    dose_lo = z_dose(max(z_lo, e_z0), e_z0, dyn)
    dose_hi = z_dose(z_hi, e_z0, dyn) if z_hi < dyn.e_z_sat else np.inf
    dose_z = z_dose(min(max(e_z_target, e_z0), z_hi), e_z0, dyn) if np.isfinite(tol_z) else 0.0

    v_direct = -(e_s_target + e_off) / g
    if abs(mismatch) <= tol_x:
        dose_x = 0.0
    else:
        dose_x = max(SETTLE_LOG, np.log(abs(mismatch) / tol_x)) / dyn.k_screen

    # one step at the direct bias
    if _in_range(v_direct, geom) and dose_x <= dose_hi:
        dose = max(dose_x, dose_z, dose_lo)
        return finish([EgossStep(v_direct, intensity, dose / intensity)], "direct")

    landing = _limit_landing(e_s0, e_s_target, e_off, dyn, geom)

    # voltage-limit step, then hold at the direct bias (its screening fixed point)
    if _in_range(v_direct, geom) and landing is not None and landing[1] <= dose_hi:
        v_limit, dose_1 = landing
        steps = [EgossStep(v_limit, intensity, dose_1 / intensity)]
        dose_2 = max(dose_z, dose_lo) - dose_1
        if dose_2 > 0:
            steps.append(EgossStep(v_direct, intensity, dose_2 / intensity))
        return finish(steps, "two-step" if len(steps) == 2 else "overdrive")

    # one over-driven step, stopped while the screening field passes the target
    if np.isfinite(dose_hi):
        candidates = [(None, 0.5 * (dose_lo + dose_hi)), (None, dose_hi)]
    else:
        candidates = [(None, max(dose_lo, SETTLE_LOG / dyn.k_screen))]
    if landing is not None and dose_lo <= landing[1] <= dose_hi:
        candidates.append(landing)
    for v_bias, dose in candidates:
        if dose <= 0:
            continue
        if v_bias is None:
            v_bias = _overdrive_bias(e_s0, e_s_target, dose, e_off, dyn, geom)
        if _in_range(v_bias, geom):
            return finish([EgossStep(v_bias, intensity, dose / intensity)], "overdrive")

    raise InfeasiblePlanError(
        f"No EGOSS schedule reaches screening {e_s_target:.1f} kV/cm and e_z {e_z_target:.1f} kV/cm "
        f"within {geom.voltage_range} V",
        binding="voltage_range",
    )


def apply_schedule(state, schedule, dyn, geom, e_offset_x=0.0):
    """
    Run a schedule through the charge model.

    Returns:
        FieldState after the last step, at the operating voltage
    """
    for step in schedule.steps:
        state = apply_egoss(state, dyn, step.pump_intensity, step.v_bias, step.duration, geom, e_offset_x)
    return state.at_voltage(schedule.operating_voltage)

