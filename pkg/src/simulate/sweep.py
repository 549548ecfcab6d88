"""Voltage-sweep maps: one excitation spectrum per electrode voltage."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from ..errors import DataError
from ..fit.spectra import integrate_traces
from ..physics.stark import stark_shift
from .electrodes import local_field
from .scan import ScanTrace, simulate_sweeps
from .streams import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepMap:
    """
    Spectra versus voltage.

    sweeps[i] holds the raw sweeps recorded at voltages[i] (a single
    ScanTrace is accepted too); traces[i] is their integrated spectrum.
    """

    voltages: np.ndarray
    sweeps: list
    molecule_ids: list = field(default_factory=list)
    traces: list = field(init=False, repr=False)

    def __post_init__(self):
        voltages = np.asarray(self.voltages, dtype=float)
        if len(voltages) != len(self.sweeps):
            raise DataError(f"{len(voltages)} voltages but {len(self.sweeps)} sets of sweeps")
        sweeps = [[s] if isinstance(s, ScanTrace) else list(s) for s in self.sweeps]
        object.__setattr__(self, "voltages", voltages)
        object.__setattr__(self, "sweeps", sweeps)
        object.__setattr__(self, "traces", [integrate_traces(s) for s in sweeps])


def simulate_sweep_map(mols, state, noise, geom, voltages, cfg, stream=(), follow=None, jobs=1,
                       show_progress=False):
    """
    Record a spectrum at every voltage.

    Every voltage gets its own random stream (cfg.seed, *stream, index) and
    starts from a stationary noise draw, so steps can run on a thread pool
    without changing the result. Sweeps repeated at one voltage are kept
    and summed into that voltage's spectrum.

    Args:
        mols: List of MoleculeModel (fluorescence of all emitters adds up)
        state: FieldState (its voltage is replaced at every step)
        noise: NoiseModel
        geom: ElectrodeGeometry
        voltages: Electrode voltages, V
        cfg: ScanConfig
        stream: Extra stream keys, e.g. the scenario step index
        follow: Index of the molecule whose noiseless line the laser window
            tracks (None keeps the window at cfg.center)
        jobs: Worker threads
        show_progress: Show a tqdm bar

    Returns:
        SweepMap
    """
    if not isinstance(mols, (list, tuple)):
        mols = [mols]
    if not mols:
        raise DataError("Need at least one molecule")
    voltages = np.asarray(voltages, dtype=float)
    geom.check_voltage(voltages)
    if follow is not None and not 0 <= follow < len(mols):
        raise DataError(f"follow index {follow} out of range for {len(mols)} molecules")

    def record(index):
        step_state = state.at_voltage(voltages[index])
        center = cfg.center
        if follow is not None:
            center += stark_shift(mols[follow], local_field(step_state, geom))
        rng = make_rng(cfg.seed, *stream, index)
        traces, _ = simulate_sweeps(mols, step_state, noise, geom, cfg, rng, center=center)
        return traces

    logger.info(f"Simulating sweep map: {len(voltages)} voltages, {len(mols)} molecule(s)...")
    indices = range(len(voltages))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sweeps = list(tqdm(pool.map(record, indices), total=len(voltages), disable=not show_progress))
    else:
        sweeps = [record(i) for i in tqdm(indices, disable=not show_progress)]

    return SweepMap(voltages=voltages, sweeps=sweeps, molecule_ids=[m.name for m in mols])
