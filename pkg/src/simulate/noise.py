"""Two-timescale Ornstein-Uhlenbeck field noise.

Each channel (E_x, E_z, residual frequency) is the sum of a fast and a slow
OU component. Updates use the exact discretisation
x(t + dt) = rho x(t) + s sqrt(1 - rho^2) xi,  rho = exp(-dt / tau),
so any step length preserves the stationary variance.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ..errors import DataError

CHANNELS = ("e_x", "e_z", "nu")


def component_std(noise):
    """
    Stationary std of each (channel, component).

    Returns:
        Array of shape (3, 2): rows e_x [kV/cm], e_z [kV/cm], nu [MHz];
        columns fast, slow
    """
    weights = np.sqrt([noise.w_fast, 1.0 - noise.w_fast])
    totals = np.array([noise.sigma_ex, noise.sigma_ez, noise.sigma0])
    return totals[:, None] * weights[None, :]


def _decay(noise, dt):
    return np.exp(-dt / np.array([noise.tau_fast, noise.tau_slow]))


@dataclass(frozen=True)
class NoisePerturbation:
    """Current value of every OU component, shape (3, 2)."""

    values: np.ndarray

    @classmethod
    def zero(cls):
        return cls(np.zeros((3, 2)))

    @property
    def e_x(self):
        return float(self.values[0].sum())

    @property
    def e_z(self):
        return float(self.values[1].sum())

    @property
    def nu(self):
        return float(self.values[2].sum())


def stationary_noise(noise, rng):
    """Draw a perturbation from the stationary distribution."""
    return NoisePerturbation(component_std(noise) * rng.standard_normal((3, 2)))


def evolve_noise(noise, dt, prev, rng):
    """
    Advance every OU component by dt.

    Args:
        noise: NoiseModel
        dt: Time step, s
        prev: NoisePerturbation
        rng: numpy Generator

    Returns:
        NoisePerturbation
    """
    if not dt > 0:
        raise DataError(f"Noise time step must be > 0, got {dt}")
    rho = _decay(noise, dt)
    kick = component_std(noise) * np.sqrt(1.0 - rho**2)
    return NoisePerturbation(prev.values * rho + kick * rng.standard_normal((3, 2)))


def sample_noise_path(noise, n_steps, dt, prev, rng):
    """
    n_steps successive evolve_noise updates, vectorised with a first-order IIR filter.

    Args:
        noise: NoiseModel
        n_steps: Number of steps
        dt: Step length, s
        prev: NoisePerturbation before the first step
        rng: numpy Generator

    Returns:
        Array (n_steps, 3, 2); entry k is the state after k + 1 steps
    """
    if not dt > 0:
        raise DataError(f"Noise time step must be > 0, got {dt}")
    rho = _decay(noise, dt)
    kick = component_std(noise) * np.sqrt(1.0 - rho**2)
    xi = rng.standard_normal((n_steps, 3, 2))

    path = np.empty_like(xi)
    for j in range(2):
        zi = (rho[j] * prev.values[:, j])[None, :]
        path[:, :, j], _ = lfilter([1.0], [1.0, -rho[j]], xi[:, :, j] * kick[:, j], axis=0, zi=zi)
    return path


def channel_sums(path):
    """Split a noise path into (e_x, e_z, nu) series."""
    total = path.sum(axis=2)
    return total[:, 0], total[:, 1], total[:, 2]
