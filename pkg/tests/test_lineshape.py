import numpy as np
import pytest
from scipy.integrate import quad

from src.errors import DataError, DegenerateProfileError
from src.physics.lineshape import (
    FWHM_PER_SIGMA,
    lorentzian,
    spectrum_model,
    voigt_fwhm,
    voigt_fwhm_numeric,
    voigt_value,
)


def test_pure_lorentzian_peak():
    assert voigt_value(0.0, 80.0, 0.0) == pytest.approx(2.0 / (np.pi * 80.0))
    assert voigt_value(25.0, 80.0, 0.0) == pytest.approx(lorentzian(25.0, 80.0))


def test_pure_gaussian_peak():
    assert voigt_value(0.0, 0.0, 40.0) == pytest.approx(1.0 / (40.0 * np.sqrt(2.0 * np.pi)))


def test_profile_is_symmetric():
    delta = np.linspace(0, 600, 61)
    assert np.allclose(voigt_value(delta, 80.0, 40.0), voigt_value(-delta, 80.0, 40.0), rtol=1e-10)


def test_profile_has_unit_area():
    def density(x):
        return float(voigt_value(x, 80.0, 40.0))

    left, _ = quad(density, -np.inf, 0.0, epsabs=1e-12, limit=200)
    right, _ = quad(density, 0.0, np.inf, epsabs=1e-12, limit=200)
    assert left + right == pytest.approx(1.0, abs=1e-6)


def test_both_widths_zero_is_degenerate():
    with pytest.raises(DegenerateProfileError):
        voigt_value(0.0, 0.0, 0.0)


def test_negative_width_is_rejected():
    with pytest.raises(DegenerateProfileError):
        voigt_value(0.0, -1.0, 40.0)


def test_closed_form_fwhm_value():
    assert voigt_fwhm(80.0, 40.0) == pytest.approx(142.3, abs=0.05)


def test_fwhm_limits():
    assert voigt_fwhm(80.0, 0.0) == pytest.approx(80.0)
    assert voigt_fwhm(0.0, 40.0) == pytest.approx(FWHM_PER_SIGMA * 40.0)
    assert FWHM_PER_SIGMA == pytest.approx(2.3548, abs=1e-4)


def test_fwhm_approximations_against_numeric():
    sigma = 40.0
    for ratio in np.logspace(-1, 1, 50):
        gamma = ratio * sigma
        numeric = voigt_fwhm_numeric(gamma, sigma)
        assert voigt_fwhm(gamma, sigma, method="olivero") == pytest.approx(numeric, rel=5e-3)
        assert voigt_fwhm(gamma, sigma, method="closed_form") == pytest.approx(numeric, rel=1.5e-2)


def test_numeric_fwhm_of_pure_lorentzian():
    assert voigt_fwhm_numeric(80.0, 0.0) == pytest.approx(80.0, rel=1e-9)


def test_unknown_fwhm_method():
    with pytest.raises(DataError):
        voigt_fwhm(80.0, 40.0, method="guess")


def test_spectrum_model_is_peak_normalised():
    assert spectrum_model(120.0, 120.0, 80.0, 40.0, 500.0, 7.0) == pytest.approx(507.0)
    far = spectrum_model(1e6, 0.0, 80.0, 40.0, 500.0, 7.0)
    assert far == pytest.approx(7.0, abs=0.01)
