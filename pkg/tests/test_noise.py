import numpy as np
import pytest

from src.errors import DataError
from src.physics.stark import NoiseModel
from src.simulate.noise import (
    NoisePerturbation,
    channel_sums,
    component_std,
    evolve_noise,
    sample_noise_path,
    stationary_noise,
)
from src.simulate.streams import make_rng


def test_component_std_splits_variance():
    noise = NoiseModel(sigma_ex=0.47, sigma_ez=0.2, sigma0=30.0, w_fast=0.4)
    std = component_std(noise)
    assert std.shape == (3, 2)
    assert np.sum(std**2, axis=1) == pytest.approx([0.47**2, 0.2**2, 30.0**2])
    assert std[0, 0] ** 2 == pytest.approx(0.4 * 0.47**2)


def test_silent_noise_stays_zero():
    noise = NoiseModel.silent()
    rng = make_rng(1)
    state = evolve_noise(noise, 0.5, NoisePerturbation.zero(), rng)
    assert np.all(state.values == 0.0)
    path = sample_noise_path(noise, 100, 0.01, stationary_noise(noise, rng), rng)
    assert np.all(path == 0.0)


def test_path_matches_repeated_updates():
    noise = NoiseModel(sigma_ex=0.47, sigma_ez=0.1, sigma0=5.0)
    start = stationary_noise(noise, make_rng(5, 0))
    path = sample_noise_path(noise, 50, 0.01, start, make_rng(5, 1))

    rng = make_rng(5, 1)
    state = start
    for k in range(50):
        state = evolve_noise(noise, 0.01, state, rng)
        assert np.allclose(path[k], state.values, rtol=1e-12, atol=1e-15)


def test_stationary_variance():
    noise = NoiseModel(sigma_ex=0.47, tau_fast=1.0, tau_slow=1.0, w_fast=0.5)
    rng = make_rng(7)
    path = sample_noise_path(noise, 1_000_000, 1.0, stationary_noise(noise, rng), rng)
    e_x, _, _ = channel_sums(path)
    assert np.var(e_x) == pytest.approx(0.47**2, rel=0.01)


def test_autocorrelation_at_correlation_time():
    noise = NoiseModel(sigma_ex=1.0, tau_fast=2.0, tau_slow=2.0, w_fast=1.0)
    rng = make_rng(8)
    path = sample_noise_path(noise, 1_000_000, 1.0, stationary_noise(noise, rng), rng)
    fast = path[:, 0, 0]
    corr = np.corrcoef(fast[:-2], fast[2:])[0, 1]
    assert corr == pytest.approx(np.exp(-1.0), rel=0.02)


def test_time_step_must_be_positive():
    noise = NoiseModel()
    with pytest.raises(DataError):
        evolve_noise(noise, 0.0, NoisePerturbation.zero(), make_rng(1))
    with pytest.raises(DataError):
        sample_noise_path(noise, 10, -1.0, NoisePerturbation.zero(), make_rng(1))


def test_streams_are_reproducible_and_independent():
    a = make_rng(42, 3, 1).standard_normal(5)
    b = make_rng(42, 3, 1).standard_normal(5)
    c = make_rng(42, 3, 2).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
