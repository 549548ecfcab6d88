import numpy as np
import pytest

from src.errors import DataError
from src.simulate.charges import (
    ChargeDynamics,
    apply_egoss,
    apply_oss,
    relax_charges,
    screening_after,
    z_field_after,
)
from src.simulate.electrodes import ElectrodeGeometry, FieldState, field_from_voltage, local_field

GEOM = ElectrodeGeometry(geometry_factor=1.6)
DYN = ChargeDynamics()


@pytest.mark.parametrize("v, g, expected", [(100.0, 1.6, 160.0), (0.0, 1.2, 0.0), (-100.0, 0.8, -80.0)])
def test_field_from_voltage(v, g, expected):
    assert field_from_voltage(v, ElectrodeGeometry(geometry_factor=g)) == pytest.approx(expected)


def test_voltage_outside_range():
    with pytest.raises(DataError):
        field_from_voltage(150.0, GEOM)


def test_geometry_invariants():
    with pytest.raises(DataError):
        ElectrodeGeometry(geometry_factor=0.0)
    with pytest.raises(DataError):
        ElectrodeGeometry(voltage_range=(10.0, -10.0))


@pytest.mark.parametrize(
    "state, expected",
    [
        (FieldState(), (0.0, 0.0)),
        (FieldState(v_applied=100.0, e_screen_x=-160.0), (0.0, 0.0)),
        (FieldState(v_applied=-25.0, e_screen_x=40.0, e_z_charge=12.0), (0.0, 12.0)),
    ],
)
def test_local_field(state, expected):
    e = local_field(state, GEOM)
    assert (e.e_x, e.e_z) == pytest.approx(expected)


def test_ninety_percent_screening_in_two_minutes():
    assert screening_after(0.0, 100.0, 120.0, DYN) == pytest.approx(-90.0)


def test_zero_duration_leaves_state_unchanged():
    state = FieldState(v_applied=10.0, e_screen_x=3.0, e_z_charge=4.0)
    assert apply_oss(state, DYN, 1.0, 0.0) == state
    assert apply_egoss(state, DYN, 1.0, 10.0, 0.0, GEOM) == state
    assert apply_egoss(state, DYN, 1.0, -60.0, 0.0, GEOM) == state


def test_dark_egoss_only_sets_the_bias():
    state = FieldState(v_applied=10.0, e_screen_x=3.0, e_z_charge=4.0)
    after = apply_egoss(state, DYN, 0.0, -60.0, 30.0, GEOM)
    assert after == FieldState(v_applied=-60.0, e_screen_x=3.0, e_z_charge=4.0)


def test_negative_duration_rejected():
    with pytest.raises(DataError):
        apply_oss(FieldState(), DYN, 1.0, -1.0)
    with pytest.raises(DataError):
        apply_egoss(FieldState(), DYN, 1.0, 0.0, -1.0, GEOM)


def test_repeated_oss_grows_z_below_saturation():
    state = FieldState()
    values = []
    for _ in range(20):
        state = apply_oss(state, DYN, 1.0, 60.0)
        values.append(state.e_z_charge)
    assert np.all(np.diff(values) > 0)
    assert values[-1] < DYN.e_z_sat


def test_z_field_saturates():
    assert z_field_after(0.0, 1e6, DYN) == pytest.approx(DYN.e_z_sat)


def test_oss_screens_offset_at_zero_volts():
    state = apply_oss(FieldState(), DYN, 1.0, 120.0, e_offset_x=20.0)
    assert state.e_screen_x == pytest.approx(-18.0)


def test_long_egoss_screens_the_bias():
    state = apply_egoss(FieldState(), DYN, 1.0, 100.0, 1e4, GEOM)
    assert state.e_screen_x == pytest.approx(-160.0)
    assert state.v_applied == 100.0
    assert local_field(state, GEOM).e_x == pytest.approx(0.0, abs=1e-9)


def test_screening_never_overshoots():
    residuals = []
    for duration in np.linspace(0.0, 600.0, 61):
        state = apply_egoss(FieldState(), DYN, 1.0, 60.0, duration, GEOM)
        residuals.append(abs(GEOM.geometry_factor * 60.0 + state.e_screen_x))
    assert np.all(np.diff(residuals) <= 1e-12)


def test_egoss_is_reversible():
    state = apply_egoss(FieldState(), DYN, 1.0, 100.0, 600.0, GEOM)
    state = apply_egoss(state, DYN, 1.0, -100.0, 600.0, GEOM)
    assert state.e_screen_x == pytest.approx(160.0, abs=0.1)


def test_relaxation():
    dyn = ChargeDynamics(decay_time=3600.0)
    state = relax_charges(FieldState(e_screen_x=-100.0, e_z_charge=50.0), dyn, 3600.0)
    assert state.e_screen_x == pytest.approx(-100.0 / np.e)
    assert state.e_z_charge == pytest.approx(50.0 / np.e)
    persistent = FieldState(e_screen_x=-100.0)
    assert relax_charges(persistent, DYN, 1e5) == persistent


def test_dynamics_invariants():
    with pytest.raises(DataError):
        ChargeDynamics(k_screen=0.0)
    with pytest.raises(DataError):
        ChargeDynamics(decay_time=-1.0)
