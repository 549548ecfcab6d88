import numpy as np
import pytest

from src.errors import DataError
from src.physics.stark import (
    FieldVector,
    MoleculeModel,
    NoiseModel,
    sd_sigma,
    shift_gradient,
    sqrt_law_sigma,
    stark_shift,
)


def test_shift_at_100_kv_per_cm():
    mol = MoleculeModel(kappa_xx=1.82)
    assert stark_shift(mol, FieldVector(100.0, 0.0)) == pytest.approx(-18200.0)


def test_zero_field_gives_zero_shift():
    assert stark_shift(MoleculeModel(), FieldVector()) == 0.0


def test_shift_is_even_in_the_field():
    mol = MoleculeModel(kappa_xx=1.82)
    assert stark_shift(mol, FieldVector(50.0, 0.0)) == pytest.approx(-4550.0)
    assert stark_shift(mol, FieldVector(-50.0, 0.0)) == pytest.approx(-4550.0)


def test_shift_is_even_about_the_offset():
    mol = MoleculeModel(kappa_xx=1.3, kappa_zz=0.4, e0_x=12.0, e0_z=-7.0)
    e = FieldVector(33.0, 18.0)
    mirrored = FieldVector(-e.e_x - 2 * mol.e0_x, -e.e_z - 2 * mol.e0_z)
    assert stark_shift(mol, e) == pytest.approx(stark_shift(mol, mirrored))


def test_shift_never_blue_without_dipole():
    rng = np.random.default_rng(3)
    mol = MoleculeModel(kappa_xx=1.82, kappa_zz=0.9)
    e = FieldVector(rng.uniform(-200, 200, 500), rng.uniform(-150, 150, 500))
    assert np.all(stark_shift(mol, e) <= 0)


def test_linear_term_enters_gradient():
    mol = MoleculeModel(kappa_xx=1.0, d_x=5.0)
    gx, gz = shift_gradient(mol, FieldVector(10.0, 0.0))
    assert gx == pytest.approx(-5.0 - 20.0)
    assert gz == 0.0


def test_sd_sigma_on_x_axis():
    mol = MoleculeModel(kappa_xx=1.82)
    noise = NoiseModel(sigma_ex=0.47, sigma_ez=0.0, sigma0=0.0)
    assert sd_sigma(mol, FieldVector(100.0, 0.0), noise) == pytest.approx(171.08)


def test_sd_sigma_vanishes_at_vertex():
    noise = NoiseModel(sigma_ex=0.47, sigma_ez=0.3, sigma0=0.0)
    assert sd_sigma(MoleculeModel(kappa_zz=1.0), FieldVector(), noise) == 0.0


def test_sd_sigma_is_monotone_in_field_magnitude():
    mol = MoleculeModel(kappa_xx=1.82, kappa_zz=0.5)
    noise = NoiseModel(sigma_ex=0.47, sigma_ez=0.2, sigma0=30.0)
    fields = np.linspace(0, 200, 101)
    along_x = sd_sigma(mol, FieldVector(fields, np.zeros_like(fields)), noise)
    along_z = sd_sigma(mol, FieldVector(np.zeros_like(fields), fields), noise)
    assert np.all(np.diff(along_x) >= 0)
    assert np.all(np.diff(along_z) >= 0)


def test_sd_sigma_matches_sqrt_law_on_the_x_axis():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        kappa = rng.uniform(0.1, 3.0)
        sigma_e = rng.uniform(0.05, 1.5)
        sigma0 = rng.uniform(0.0, 100.0)
        mol = MoleculeModel(kappa_xx=kappa, e0_x=rng.uniform(-50, 50))
        noise = NoiseModel(sigma_ex=sigma_e, sigma_ez=rng.uniform(0, 1), sigma0=sigma0)
        e = FieldVector(rng.uniform(-200, 200), 0.0)
        expected = sqrt_law_sigma(abs(stark_shift(mol, e)), kappa * sigma_e**2, sigma0)
        assert sd_sigma(mol, e, noise) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize(
    "shift, a, sigma0, expected",
    [
        (13000.0, 0.410, 0.0, 146.0),
        (13000.0, 1.297, 70.0, 269.0),
        (0.0, 0.8, 55.0, 55.0),
    ],
)
def test_sqrt_law_values(shift, a, sigma0, expected):
    assert sqrt_law_sigma(shift, a, sigma0) == pytest.approx(expected, abs=0.1)


@pytest.mark.parametrize("args", [(-1.0, 0.4, 0.0), (10.0, -0.4, 0.0), (10.0, 0.4, -1.0)])
def test_sqrt_law_rejects_negative_inputs(args):
    with pytest.raises(DataError):
        sqrt_law_sigma(*args)


@pytest.mark.parametrize(
    "values",
    [{"kappa_xx": -0.1}, {"gamma0": 0.0}, {"peak_rate": -1.0}, {"dw_qy": 0.0}, {"dw_qy": 1.5}],
)
def test_molecule_invariants(values):
    with pytest.raises(DataError):
        MoleculeModel(**values)


def test_noise_invariants():
    with pytest.raises(DataError):
        NoiseModel(tau_fast=10.0, tau_slow=1.0)
    with pytest.raises(DataError):
        NoiseModel(w_fast=1.2)
    with pytest.raises(DataError):
        NoiseModel(sigma_ex=-0.1)


def test_field_vector_must_be_finite():
    with pytest.raises(DataError):
        FieldVector(np.inf, 0.0)


def test_molecule_from_dict_ignores_unknown_keys():
    mol = MoleculeModel.from_dict({"kappa_xx": 1.65, "colour": "red"})
    assert mol.kappa_xx == 1.65
