import numpy as np
import pytest

from src.errors import DataError
from src.files.reports import load_calibration
from src.physics.stark import MoleculeModel
from src.plan.calibrate import AnisotropyCalibration, calibrate_anisotropy, noise_from_calibration


@pytest.fixture
def dbt_calibration():
    return calibrate_anisotropy(70.0, 269.0, 13000.0, 86.0, 14000.0)


def test_products(dbt_calibration):
    assert dbt_calibration.a_x == pytest.approx(1.29733, rel=1e-5)
    assert dbt_calibration.a_z == pytest.approx(0.0445714, rel=1e-5)
    assert dbt_calibration.post_shift_ratio == pytest.approx(3.128, abs=1e-3)
    assert dbt_calibration.increase_ratio == pytest.approx(12.4375)


def test_no_broadening_gives_zero_product():
    cal = calibrate_anisotropy(70.0, 70.0, 13000.0, 86.0, 14000.0)
    assert cal.a_x == 0.0
    assert cal.increase_ratio == 0.0


def test_equal_widths_make_increase_ratio_infinite():
    cal = calibrate_anisotropy(70.0, 269.0, 13000.0, 70.0, 14000.0)
    assert cal.a_z == 0.0
    assert cal.increase_ratio == np.inf


def test_document_round_trip(dbt_calibration):
    assert AnisotropyCalibration.from_dict(dbt_calibration.to_dict()) == dbt_calibration


def test_missing_measurement():
    with pytest.raises(DataError, match="shift_z"):
        AnisotropyCalibration.from_dict({"sigma_base": 70.0, "sigma_x": 269.0, "shift_x": 13000.0, "sigma_z": 86.0})


@pytest.mark.parametrize(
    "args",
    [
        (70.0, 269.0, 0.0, 86.0, 14000.0),
        (70.0, 269.0, 13000.0, 86.0, -1.0),
        (-1.0, 269.0, 13000.0, 86.0, 14000.0),
        (70.0, 60.0, 13000.0, 86.0, 14000.0),
        (70.0, 269.0, 13000.0, 60.0, 14000.0),
    ],
)
def test_invalid_measurements(args):
    with pytest.raises(DataError):
        calibrate_anisotropy(*args)


def test_noise_split_assumes_isotropic_kappa(dbt_calibration):
    mol, noise = noise_from_calibration(dbt_calibration, MoleculeModel(kappa_xx=1.82))
    assert mol.kappa_zz == 1.82
    assert noise.sigma_ex == pytest.approx(np.sqrt(1.29733 / 1.82), rel=1e-5)
    assert noise.sigma_ez == pytest.approx(np.sqrt(0.0445714 / 1.82), rel=1e-5)
    assert noise.sigma0 == 70.0


def test_noise_split_with_explicit_kappa(dbt_calibration):
    mol, noise = noise_from_calibration(dbt_calibration, MoleculeModel(kappa_xx=1.82), kappa_zz=0.5)
    assert mol.kappa_zz == 0.5
    assert mol.kappa_zz * noise.sigma_ez**2 == pytest.approx(dbt_calibration.a_z)


def test_noise_split_checks(dbt_calibration):
    with pytest.raises(DataError):
        noise_from_calibration(dbt_calibration, MoleculeModel(kappa_xx=0.0))
    with pytest.raises(DataError):
        noise_from_calibration(dbt_calibration, MoleculeModel(kappa_xx=1.82), kappa_zz=0.0)


def test_shipped_calibration(dbt_calibration):
    cal, extras = load_calibration("data/dbt_calibration.yaml")
    assert cal == dbt_calibration
    assert extras == {"kappa_xx": 1.82}
