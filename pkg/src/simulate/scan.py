"""Monte-Carlo excitation scans: laser swept bin by bin, Poisson photon counts."""

import logging
from dataclasses import dataclass, fields

import numpy as np

from .. import config
from ..errors import DataError
from ..physics.stark import FieldVector, stark_shift
from .electrodes import local_field
from .noise import NoisePerturbation, channel_sums, evolve_noise, sample_noise_path, stationary_noise
from .streams import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScanConfig:
    """
    Laser scan settings.

    Args:
        span: Scanned window, GHz
        scan_speed: GHz/s
        bin_time: Counting bin, s
        n_sweeps: Repeated sweeps per scan
        inter_sweep_wait: Dead time between sweeps, s
        seed: Run seed
        center: Window centre relative to the unperturbed ZPL, MHz
        background_fraction: Background rate as a fraction of peak_rate
    """

    span: float = config.SCAN_SPAN
    scan_speed: float = config.SCAN_SPEED
    bin_time: float = config.SCAN_BIN_TIME
    n_sweeps: int = 1
    inter_sweep_wait: float = config.SCAN_INTER_SWEEP_WAIT
    seed: int = config.DEFAULT_SEED
    center: float = 0.0
    background_fraction: float = config.BACKGROUND_FRACTION

    def __post_init__(self):
        problems = scan_problems(self)
        if problems:
            raise DataError("Invalid scan config: " + "; ".join(problems))

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})

    @property
    def bin_width(self):
        """Laser detuning covered by one bin, MHz."""
        return self.scan_speed * 1000.0 * self.bin_time

    @property
    def n_bins(self):
        return max(int(round(self.span * 1000.0 / self.bin_width)), 1)

    @property
    def sweep_duration(self):
        return self.n_bins * self.bin_time

    def detunings(self, center=None):
        center = self.center if center is None else center
        start = center - 0.5 * self.n_bins * self.bin_width
        return start + (np.arange(self.n_bins) + 0.5) * self.bin_width


def scan_problems(cfg):
    problems = []
    for name in ("span", "scan_speed", "bin_time"):
        if not getattr(cfg, name) > 0:
            problems.append(f"{name}: must be > 0")
    if cfg.n_sweeps < 1:
        problems.append("n_sweeps: must be >= 1")
    if cfg.inter_sweep_wait < 0:
        problems.append("inter_sweep_wait: must be >= 0")
    if cfg.background_fraction < 0:
        problems.append("background_fraction: must be >= 0")
    return problems


@dataclass(frozen=True)
class ScanTrace:
    """
    Photon counts versus laser detuning.

    A raw sweep has n_sweeps == 1; integrated spectra carry the number of
    summed sweeps and the total observation span.
    """

    detunings: np.ndarray
    counts: np.ndarray
    start_time: float = 0.0
    sweep_index: int = 0
    bin_time: float = config.SCAN_BIN_TIME
    n_sweeps: int = 1
    observation_span: float = None

    def __post_init__(self):
        detunings = np.asarray(self.detunings, dtype=float)
        counts = np.asarray(self.counts)
        if detunings.shape != counts.shape or detunings.ndim != 1:
            raise DataError(
                f"detunings and counts must be 1-D arrays of equal length, got {detunings.shape} and {counts.shape}"
            )
        if len(detunings) > 1:
            steps = np.diff(detunings)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise DataError("detunings must be strictly monotone")
        if np.any(counts < 0):
            raise DataError("counts must be non-negative")
        object.__setattr__(self, "detunings", detunings)
        object.__setattr__(self, "counts", counts.astype(np.int64))
        if self.observation_span is None:
            object.__setattr__(self, "observation_span", len(detunings) * self.bin_time)

    @property
    def times(self):
        return self.start_time + np.arange(len(self.detunings)) * self.bin_time

    @property
    def total_counts(self):
        return int(self.counts.sum())


def peak_lorentzian(delta, gamma):
    """Lorentzian normalised to 1 at resonance, FWHM gamma."""
    return 1.0 / (1.0 + (2.0 * delta / gamma) ** 2)


def noise_substeps(noise, bin_time):
    """Noise samples per counting bin, spaced no wider than tau_fast."""
    n = int(np.ceil(bin_time / noise.tau_fast - 1e-9))
    return int(np.clip(n, 1, config.NOISE_MAX_SUBSTEPS))


def _sweep(mols, state, noise, geom, cfg, rng, noise_state, start_time, sweep_index, center):
    """One sweep; returns the trace and the noise state at its end."""
    detunings = cfg.detunings(center)
    n = len(detunings)
    sub = noise_substeps(noise, cfg.bin_time)
    path = sample_noise_path(noise, n * sub, cfg.bin_time / sub, noise_state, rng)
    dex, dez, dnu = channel_sums(path)

    # laser position at every noise sample; averages back to the bin centres
    step = cfg.bin_width / sub
    laser = detunings[0] - 0.5 * cfg.bin_width + (np.arange(n * sub) + 0.5) * step

    base = local_field(state, geom)
    field = FieldVector(e_x=base.e_x + dex, e_z=base.e_z + dez)

    background = cfg.background_fraction * max(m.peak_rate for m in mols)
    rate = np.full(n * sub, background)
    for mol in mols:
        centers = stark_shift(mol, field) + dnu
        rate += mol.peak_rate * mol.dw_qy * peak_lorentzian(laser - centers, mol.gamma0)
    rate = rate.reshape(n, sub).mean(axis=1)

    counts = rng.poisson(rate * cfg.bin_time)
    trace = ScanTrace(
        detunings=detunings,
        counts=counts,
        start_time=start_time,
        sweep_index=sweep_index,
        bin_time=cfg.bin_time,
    )
    last = NoisePerturbation(path[-1]) if n else noise_state
    return trace, last


def simulate_sweeps(mols, state, noise, geom, cfg, rng, noise_state=None, start_time=0.0, center=None):
    """
    cfg.n_sweeps consecutive sweeps with inter-sweep waits.

    The noise keeps evolving through the waits, so slow components stay
    correlated from one sweep to the next.

    Args:
        mols: MoleculeModel or list of them (fluorescence adds up)
        state: FieldState
        noise: NoiseModel
        geom: ElectrodeGeometry
        cfg: ScanConfig
        rng: numpy Generator
        noise_state: NoisePerturbation at start_time (stationary draw if None)
        start_time: Time of the first bin, s
        center: Override of cfg.center, MHz

    Returns:
        (list of ScanTrace, NoisePerturbation at the end of the last sweep)
    """
    if not isinstance(mols, (list, tuple)):
        mols = [mols]
    if not mols:
        raise DataError("Need at least one molecule")
    if noise_state is None:
        noise_state = stationary_noise(noise, rng)

    logger.debug(f"  {cfg.n_sweeps} sweep(s) of {cfg.n_bins} bins, {cfg.sweep_duration:.2f} s each")
    traces = []
    t = start_time
    for k in range(cfg.n_sweeps):
        if k > 0 and cfg.inter_sweep_wait > 0:
            noise_state = evolve_noise(noise, cfg.inter_sweep_wait, noise_state, rng)
            t += cfg.inter_sweep_wait
        trace, noise_state = _sweep(mols, state, noise, geom, cfg, rng, noise_state, t, k, center)
        traces.append(trace)
        t += cfg.sweep_duration
    return traces, noise_state


def simulate_scan(mol, state, noise, geom, cfg, rng=None, noise_state=None, start_time=0.0):
    """
    Single excitation sweep of one emitter.

    For every bin the instantaneous line centre is the Stark shift at the
    local field plus the current noise sample; counts are Poisson with the
    Lorentzian rate plus background.

    Args:
        mol: MoleculeModel
        state: FieldState
        noise: NoiseModel
        geom: ElectrodeGeometry
        cfg: ScanConfig
        rng: numpy Generator (stream (cfg.seed, 0) if None)
        noise_state: Starting NoisePerturbation (stationary draw if None)
        start_time: Time of the first bin, s

    Returns:
        ScanTrace
    """
    rng = make_rng(cfg.seed, 0) if rng is None else rng
    if noise_state is None:
        noise_state = stationary_noise(noise, rng)
    trace, _ = _sweep([mol], state, noise, geom, cfg, rng, noise_state, start_time, 0, None)
    return trace
