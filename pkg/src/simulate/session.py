"""Multi-step experiments driven by a scenario: sweeps, pumping and waits on one sample."""

import logging
import os
from dataclasses import dataclass, replace

import pandas as pd

from ..errors import ConfigError
from ..files.scenario import expand_voltages
from ..files.traces import write_sweep_map, write_traces
from .charges import apply_egoss, apply_oss, relax_charges
from .electrodes import FieldState
from .noise import evolve_noise
from .scan import simulate_sweeps
from .streams import make_rng
from .sweep import simulate_sweep_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepResult:
    index: int
    action: str
    time: float
    state: FieldState
    output: str = None
    result: object = None


class ScenarioSession:
    """
    Runs the actions of a Scenario in order on one persistent field state.

    Step i draws its randomness from stream (seed, i). Scans and sweeps write
    step_<i>_<action>.csv into output_dir (nothing is written when output_dir
    is None). The pumped emitter for OSS/EGOSS offsets is the first molecule.
    """

    def __init__(self, scenario, output_dir=None, jobs=1, show_progress=False, state=None):
        self.scenario = scenario
        self.output_dir = output_dir
        self.jobs = jobs
        self.show_progress = show_progress
        self.state = state or FieldState()
        self.noise_state = None
        self.clock = 0.0
        self.results = []

    @property
    def pumped_offset(self):
        return self.scenario.molecules[0].e0_x

    def _output_path(self, index, action):
        if self.output_dir is None:
            return None
        os.makedirs(self.output_dir, exist_ok=True)
        return os.path.join(self.output_dir, f"step_{index}_{action}.csv")

    def run(self):
        """
        Execute every action.

        Returns:
            List of StepResult
        """
        sc = self.scenario
        logger.info(f"Running scenario {sc.path or ''} ({len(sc.actions)} actions, seed {sc.seed})...")
        for index, action in enumerate(sc.actions):
            p = action.params
            output, result = None, None

            if action.name == "set_voltage":
                sc.geometry.check_voltage(p["voltage"])
                self.state = self.state.at_voltage(p["voltage"])

            elif action.name == "scan":
                cfg = replace(
                    sc.scan,
                    n_sweeps=p.get("n_sweeps", sc.scan.n_sweeps),
                    center=p.get("center", sc.scan.center),
                )
                rng = make_rng(sc.seed, index)
                traces, self.noise_state = simulate_sweeps(
                    sc.molecules, self.state, sc.noise, sc.geometry, cfg, rng,
                    noise_state=self.noise_state, start_time=self.clock,
                )
                self.clock = traces[-1].start_time + cfg.sweep_duration
                result = traces
                output = self._output_path(index, "scan")
                if output:
                    write_traces(traces, output)

            elif action.name == "sweep":
                voltages = expand_voltages(p["voltages"])
                sweep_map = simulate_sweep_map(
                    sc.molecules, self.state, sc.noise, sc.geometry, voltages, sc.scan,
                    stream=(index,), follow=p.get("follow"), jobs=self.jobs, show_progress=self.show_progress,
                )
                cfg = sc.scan
                per_voltage = cfg.n_sweeps * cfg.sweep_duration + (cfg.n_sweeps - 1) * cfg.inter_sweep_wait
                self.clock += len(voltages) * per_voltage
                self.noise_state = None
                result = sweep_map
                output = self._output_path(index, "sweep")
                if output:
                    write_sweep_map(sweep_map, output)

            elif action.name == "oss":
                self.state = apply_oss(self.state, sc.dynamics, p["intensity"], p["duration"], self.pumped_offset)
                self._advance(index, p["duration"])

            elif action.name == "egoss":
                self.state = apply_egoss(
                    self.state, sc.dynamics, p["intensity"], p["bias"], p["duration"], sc.geometry, self.pumped_offset
                )
                self._advance(index, p["duration"])

            elif action.name == "wait":
                self.state = relax_charges(self.state, sc.dynamics, p["duration"])
                self._advance(index, p["duration"])

            else:
                raise ConfigError(f"Unknown action '{action.name}' at step {index}")

            self.results.append(StepResult(index, action.name, self.clock, self.state, output, result))
            logger.info(
                f"  Step {index} {action.name}: V = {self.state.v_applied:+.1f} V, "
                f"screening {self.state.e_screen_x:.2f} kV/cm, e_z {self.state.e_z_charge:.2f} kV/cm"
            )
        return self.results

    def _advance(self, index, duration):
        """Move the clock; the field noise keeps evolving while no scan runs."""
        if self.noise_state is not None and duration > 0:
            rng = make_rng(self.scenario.seed, index)
            self.noise_state = evolve_noise(self.scenario.noise, duration, self.noise_state, rng)
        self.clock += duration

    def state_table(self):
        """Field state after every step."""
        return pd.DataFrame([
            {
                "step": r.index,
                "action": r.action,
                "time_s": r.time,
                "v_applied_V": r.state.v_applied,
                "e_screen_x_kV_cm": r.state.e_screen_x,
                "e_z_charge_kV_cm": r.state.e_z_charge,
                "output": r.output or "",
            }
            for r in self.results
        ])
