import numpy as np
import pytest

from src.errors import DataError, InfeasiblePlanError
from src.physics.stark import MoleculeModel, NoiseModel, stark_shift
from src.plan.calibrate import calibrate_anisotropy, noise_from_calibration
from src.plan.isofrequency import isofrequency_locus
from src.plan.optimize import TuningConstraints, grid_oracle, plan_min_sd
from src.simulate.streams import make_rng

DBT = MoleculeModel(kappa_xx=1.82)


def calibrated():
    cal = calibrate_anisotropy(70.0, 269.0, 13000.0, 86.0, 14000.0)
    return noise_from_calibration(cal, DBT)


def test_locus_for_pure_x_molecule():
    points = isofrequency_locus(DBT, -18200.0, n_points=40)
    assert {round(p.e_x, 9) for p in points} == {100.0, -100.0}


def test_locus_points_hold_the_shift():
    mol = MoleculeModel(kappa_xx=1.82, kappa_zz=0.9, e0_x=12.0, e0_z=-5.0)
    for p in isofrequency_locus(mol, -5000.0, n_points=90):
        assert stark_shift(mol, p) == pytest.approx(-5000.0, rel=1e-9)


def test_locus_at_zero_shift_is_the_offset_point():
    mol = MoleculeModel(kappa_xx=1.82, kappa_zz=0.9, e0_x=12.0, e0_z=-5.0)
    (point,) = isofrequency_locus(mol, 0.0)
    assert (point.e_x, point.e_z) == (-12.0, 5.0)


def test_blue_target_is_infeasible():
    with pytest.raises(InfeasiblePlanError) as err:
        isofrequency_locus(DBT, 100.0)
    assert err.value.binding == "target_shift"
    with pytest.raises(InfeasiblePlanError) as err:
        plan_min_sd(DBT, NoiseModel(), 100.0)
    assert err.value.binding == "target_shift"


def test_polar_molecule_is_rejected():
    with pytest.raises(DataError):
        plan_min_sd(MoleculeModel(d_x=1.0), NoiseModel(), -1000.0)
    with pytest.raises(DataError):
        isofrequency_locus(MoleculeModel(kappa_xx=0.0), -1000.0)


def test_calibrated_plan_tunes_along_z():
    mol, noise = calibrated()
    plan = plan_min_sd(mol, noise, -14000.0)
    assert plan.e_x == pytest.approx(0.0, abs=1e-9)
    assert plan.e_z == pytest.approx(np.sqrt(14000.0 / 1.82), rel=1e-9)
    assert plan.predicted_sigma == pytest.approx(86.0, abs=0.05)
    assert plan.achieved_shift == pytest.approx(-14000.0, rel=1e-9)
    assert plan.feasible
    assert plan.binding is None


def test_z_limit_pushes_the_rest_onto_x():
    mol, noise = calibrated()
    constraints = TuningConstraints(e_z_max=62.02)
    plan = plan_min_sd(mol, noise, -14000.0, constraints)
    assert plan.binding == "e_z_max"
    assert abs(plan.e_z) == pytest.approx(62.02, rel=1e-9)
    assert 1.82 * plan.e_x**2 == pytest.approx(14000.0 - 1.82 * 62.02**2, rel=1e-6)
    oracle_sigma, _ = grid_oracle(mol, noise, -14000.0, constraints)
    assert plan.predicted_sigma <= oracle_sigma + 1e-6


def test_pure_x_molecule_uses_x_only():
    plan = plan_min_sd(DBT, NoiseModel(sigma_ex=0.47), -18200.0)
    assert abs(plan.e_x) == pytest.approx(100.0, rel=1e-9)
    assert plan.predicted_sigma == pytest.approx(2.0 * 1.82 * 100.0 * 0.47, rel=1e-9)


def test_plan_matches_brute_force_on_random_instances():
    rng = make_rng(99)
    for _ in range(100):
        mol = MoleculeModel(
            kappa_xx=rng.uniform(0.5, 2.0),
            kappa_zz=rng.uniform(0.5, 2.0),
            e0_x=rng.uniform(-50.0, 50.0),
            e0_z=rng.uniform(-50.0, 50.0),
        )
        noise = NoiseModel(sigma_ex=rng.uniform(0.1, 1.0), sigma_ez=rng.uniform(0.1, 1.0), sigma0=rng.uniform(0.0, 80.0))
        constraints = TuningConstraints()
        lo_x = max(0.0, abs(mol.e0_x) - constraints.e_x_max)
        lo_z = max(0.0, abs(mol.e0_z) - constraints.e_z_max)
        hi_x = abs(mol.e0_x) + constraints.e_x_max
        hi_z = abs(mol.e0_z) + constraints.e_z_max
        low = mol.kappa_xx * lo_x**2 + mol.kappa_zz * lo_z**2
        high = mol.kappa_xx * hi_x**2 + mol.kappa_zz * hi_z**2
        target = -(low + rng.uniform(0.1, 0.9) * (high - low))

        plan = plan_min_sd(mol, noise, target, constraints)
        oracle_sigma, _ = grid_oracle(mol, noise, target, constraints)
        assert plan.feasible
        assert abs(plan.e_x) <= constraints.e_x_max * (1 + 1e-9)
        assert abs(plan.e_z) <= constraints.e_z_max * (1 + 1e-9)
        assert plan.achieved_shift == pytest.approx(target, rel=1e-6)
        assert plan.predicted_sigma <= oracle_sigma + 0.1


def test_sigma_grows_with_target():
    mol, noise = calibrated()
    sigmas = [plan_min_sd(mol, noise, -s).predicted_sigma for s in np.linspace(0.0, 60000.0, 13)]
    assert np.all(np.diff(sigmas) >= -1e-9)
    assert sigmas[0] == pytest.approx(70.0)


def test_unreachable_target_names_the_field_limit():
    with pytest.raises(InfeasiblePlanError) as err:
        plan_min_sd(DBT, NoiseModel(), -100000.0)
    assert err.value.binding == "e_x_max"


def test_offset_can_keep_the_shift_out_of_reach():
    mol = MoleculeModel(kappa_xx=1.82, e0_x=300.0)
    with pytest.raises(InfeasiblePlanError) as err:
        plan_min_sd(mol, NoiseModel(), -1000.0, TuningConstraints(e_x_max=200.0))
    assert err.value.binding == "e0_offset"


def test_constraint_checks():
    with pytest.raises(DataError):
        TuningConstraints(e_x_max=0.0)
    with pytest.raises(DataError):
        TuningConstraints(tolerance=0.0)


def test_plan_document():
    mol, noise = calibrated()
    doc = plan_min_sd(mol, noise, -14000.0).to_dict()
    assert doc["field"]["e_x"] == pytest.approx(0.0, abs=1e-9)
    assert doc["schedule"] is None
    assert doc["provenance"]["kappa_zz"] == pytest.approx(1.82)


def test_constraints_supply_noise_and_operating_voltage():
    mol, noise = calibrated()
    plan = plan_min_sd(mol, None, -14000.0, TuningConstraints(noise=noise, operating_voltage=-25.0))
    assert plan.predicted_sigma == pytest.approx(86.0, abs=0.1)
    assert plan.operating_voltage == -25.0
    assert plan.to_dict()["operating_voltage"] == -25.0
    assert plan_min_sd(mol, noise, -14000.0).operating_voltage is None


def test_plan_needs_a_noise_model():
    with pytest.raises(DataError, match="noise"):
        plan_min_sd(DBT, None, -1000.0)
