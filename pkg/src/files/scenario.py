"""Scenario files: YAML loading, schema validation and domain objects.

Diagnostics carry the source line of the offending key, taken from the
composed YAML node tree.
"""

import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from .. import config
from ..errors import ConfigError
from ..physics.stark import MoleculeModel, NoiseModel
from ..simulate.charges import ChargeDynamics
from ..simulate.electrodes import ElectrodeGeometry
from ..simulate.scan import ScanConfig

logger = logging.getLogger(__name__)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


# (type name, predicate on the value, constraint text for diagnostics)
ANY_NUMBER = ("number", None, None)
POSITIVE = ("number", lambda v: v > 0, "must be > 0")
NON_NEGATIVE = ("number", lambda v: v >= 0, "must be >= 0")
UNIT_INTERVAL = ("number", lambda v: 0 <= v <= 1, "must be in [0, 1]")
COUNT = ("integer", lambda v: v >= 1, "must be >= 1")
INDEX = ("integer", lambda v: v >= 0, "must be >= 0")
POSITIVE_OR_NULL = ("number|null", lambda v: v > 0, "must be > 0 or null")

SECTIONS = {
    "geometry": {
        "geometry_factor": POSITIVE,
        "voltage_range": ("pair", lambda v: v[0] < v[1], "needs V_min < V_max"),
    },
    "noise": {
        "sigma_ex": NON_NEGATIVE,
        "sigma_ez": NON_NEGATIVE,
        "tau_fast": POSITIVE,
        "tau_slow": POSITIVE,
        "w_fast": UNIT_INTERVAL,
        "sigma0": NON_NEGATIVE,
    },
    "dynamics": {
        "k_screen": POSITIVE,
        "r_z": POSITIVE,
        "e_z_sat": POSITIVE,
        "decay_time": POSITIVE_OR_NULL,
    },
    "scan": {
        "span": POSITIVE,
        "scan_speed": POSITIVE,
        "bin_time": POSITIVE,
        "n_sweeps": COUNT,
        "inter_sweep_wait": NON_NEGATIVE,
        "center": ANY_NUMBER,
        "background_fraction": NON_NEGATIVE,
    },
}

MOLECULE_FIELDS = {
    "name": ("string", None, None),
    "nu_zpl": ANY_NUMBER,
    "kappa_xx": NON_NEGATIVE,
    "kappa_yy": NON_NEGATIVE,
    "kappa_zz": NON_NEGATIVE,
    "d_x": ANY_NUMBER,
    "d_z": ANY_NUMBER,
    "e0_x": ANY_NUMBER,
    "e0_z": ANY_NUMBER,
    "gamma0": POSITIVE,
    "peak_rate": NON_NEGATIVE,
    "dw_qy": ("number", lambda v: 0 < v <= 1, "must be in (0, 1]"),
}

# action name -> (required fields, optional fields)
ACTIONS = {
    "set_voltage": ({"voltage": ANY_NUMBER}, {}),
    "scan": ({}, {"n_sweeps": COUNT, "center": ANY_NUMBER}),
    "sweep": ({"voltages": ("voltages", None, None)}, {"follow": INDEX}),
    "oss": ({"intensity": NON_NEGATIVE, "duration": NON_NEGATIVE}, {}),
    "egoss": ({"intensity": NON_NEGATIVE, "bias": ANY_NUMBER, "duration": NON_NEGATIVE}, {}),
    "wait": ({"duration": NON_NEGATIVE}, {}),
}

TOP_LEVEL = ("seed", "geometry", "molecules", "noise", "dynamics", "scan", "actions")


@dataclass(frozen=True)
class Action:
    name: str
    params: dict


@dataclass(frozen=True)
class Scenario:
    """A validated scenario file turned into domain objects."""

    seed: int
    geometry: ElectrodeGeometry
    molecules: list
    noise: NoiseModel
    dynamics: ChargeDynamics
    scan: ScanConfig
    actions: list = field(default_factory=list)
    path: str = None
    warnings: list = field(default_factory=list)

    def with_seed(self, seed):
        return replace(self, seed=int(seed), scan=replace(self.scan, seed=int(seed)))


def line_index(node, path=(), index=None):
    """
    Map every key path of a composed YAML document to its 1-based line.

    Returns:
        Dict path tuple -> line number
    """
    index = {} if index is None else index
    index.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = path + (key_node.value,)
            index[child] = key_node.start_mark.line + 1
            line_index(value_node, child, index)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            child = path + (i,)
            index[child] = item.start_mark.line + 1
            line_index(item, child, index)
    return index


def _format_path(path):
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


class _Collector:
    """Accumulates errors and warnings with source lines."""

    def __init__(self, source, lines, strict):
        self.source = source
        self.lines = lines or {}
        self.strict = strict
        self.errors = []
        self.warnings = []

    def line(self, path):
        for cut in range(len(path), -1, -1):
            if path[:cut] in self.lines:
                return self.lines[path[:cut]]
        return 0

    def _message(self, path, problem):
        return f"{self.source}:{self.line(path)}: {_format_path(path)}: {problem}"

    def error(self, path, problem):
        self.errors.append(self._message(path, problem))

    def unknown(self, path):
        message = self._message(path, "unknown key")
        if self.strict:
            self.errors.append(message)
        else:
            self.warnings.append(message)

    def check_value(self, path, value, rule):
        kind, predicate, constraint = rule
        if kind == "number|null":
            if value is None:
                return
            kind = "number"
        if kind == "number" and not _is_number(value):
            self.error(path, f"expected a number, got {value!r}")
        elif kind == "integer" and not _is_int(value):
            self.error(path, f"expected an integer, got {value!r}")
        elif kind == "string" and not isinstance(value, str):
            self.error(path, f"expected a string, got {value!r}")
        elif kind == "pair" and not (isinstance(value, list) and len(value) == 2 and all(map(_is_number, value))):
            self.error(path, f"expected [low, high], got {value!r}")
        elif kind == "voltages":
            self.check_voltages(path, value)
        elif predicate is not None and not predicate(value):
            self.error(path, constraint)

    def check_voltages(self, path, value):
        if isinstance(value, list):
            if not value:
                self.error(path, "needs at least one voltage")
            for i, v in enumerate(value):
                if not _is_number(v):
                    self.error(path + (i,), f"expected a number, got {v!r}")
        elif isinstance(value, dict):
            self.check_mapping(path, value, {"start": ANY_NUMBER, "stop": ANY_NUMBER, "num": COUNT}, required=True)
        else:
            self.error(path, "expected a list of voltages or {start, stop, num}")

    def check_mapping(self, path, values, rules, required=False, optional=None):
        if not isinstance(values, dict):
            self.error(path, "expected a mapping")
            return
        optional = optional or {}
        for key, value in values.items():
            if key in rules:
                self.check_value(path + (key,), value, rules[key])
            elif key in optional:
                self.check_value(path + (key,), value, optional[key])
            else:
                self.unknown(path + (key,))
        if required:
            for key in rules:
                if key not in values:
                    self.error(path, f"missing required field '{key}'")


def expand_voltages(voltages):
    """List of voltages from a list or a {start, stop, num} mapping."""
    if isinstance(voltages, dict):
        return [float(v) for v in np.linspace(voltages["start"], voltages["stop"], int(voltages["num"]))]
    return [float(v) for v in voltages]


def _check_document(data, c):
    if not isinstance(data, dict):
        c.error((), "scenario must be a mapping")
        return

    for key in data:
        if key not in TOP_LEVEL:
            c.unknown((key,))

    if "seed" in data and not (_is_int(data["seed"]) and data["seed"] >= 0):
        c.error(("seed",), "must be a non-negative integer")

    for section, rules in SECTIONS.items():
        if section in data:
            c.check_mapping((section,), data[section], rules)

    noise = data.get("noise")
    if isinstance(noise, dict):
        tau_fast = noise.get("tau_fast", config.NOISE_TAU_FAST)
        tau_slow = noise.get("tau_slow", config.NOISE_TAU_SLOW)
        if _is_number(tau_fast) and _is_number(tau_slow) and tau_slow < tau_fast:
            c.error(("noise", "tau_slow"), "must be >= tau_fast")

    molecules = data.get("molecules")
    if molecules is not None:
        if not isinstance(molecules, list) or not molecules:
            c.error(("molecules",), "expected a non-empty list of molecules")
            molecules = []
        for i, mol in enumerate(molecules):
            c.check_mapping(("molecules", i), mol, MOLECULE_FIELDS)
    n_molecules = len(molecules) if molecules else 1

    voltage_range = config.VOLTAGE_RANGE
    geometry = data.get("geometry")
    if isinstance(geometry, dict) and isinstance(geometry.get("voltage_range"), list):
        if len(geometry["voltage_range"]) == 2 and all(map(_is_number, geometry["voltage_range"])):
            voltage_range = tuple(geometry["voltage_range"])

    actions = data.get("actions", [])
    if not isinstance(actions, list):
        c.error(("actions",), "expected a list of actions")
        return
    for i, action in enumerate(actions):
        path = ("actions", i)
        if not (isinstance(action, dict) and len(action) == 1):
            c.error(path, "each action must be a mapping with exactly one key")
            continue
        name, params = next(iter(action.items()))
        if name not in ACTIONS:
            c.error(path, f"unknown action '{name}' (expected one of {', '.join(ACTIONS)})")
            continue
        params = {} if params is None else params
        required, optional = ACTIONS[name]
        c.check_mapping(path + (name,), params, required, required=True, optional=optional)
        if not isinstance(params, dict):
            continue
        _check_action_voltages(c, path + (name,), name, params, voltage_range)
        follow = params.get("follow")
        if _is_int(follow) and follow >= n_molecules:
            c.error(path + (name, "follow"), f"must be < number of molecules ({n_molecules})")


def _check_action_voltages(c, path, name, params, voltage_range):
    v_min, v_max = voltage_range
    if name == "set_voltage" and _is_number(params.get("voltage")):
        values = [params["voltage"]]
        key = "voltage"
    elif name == "egoss" and _is_number(params.get("bias")):
        values = [params["bias"]]
        key = "bias"
    elif name == "sweep" and "voltages" in params:
        try:
            values = expand_voltages(params["voltages"])
        except (TypeError, KeyError, ValueError):
            return
        key = "voltages"
    else:
        return
    if any(not v_min <= v <= v_max for v in values):
        c.error(path + (key,), f"outside voltage_range [{v_min}, {v_max}]")


def _build(data, source, warnings):
    geometry = data.get("geometry", {})
    molecules = data.get("molecules") or [dict(config.dbt_molecule(), name="molecule_0")]
    seed = int(data.get("seed", config.DEFAULT_SEED))
    actions = [
        Action(name, dict(params or {}))
        for action in data.get("actions", [])
        for name, params in action.items()
    ]
    return Scenario(
        seed=seed,
        geometry=ElectrodeGeometry(
            geometry_factor=geometry.get("geometry_factor", config.GEOMETRY_FACTOR),
            voltage_range=tuple(geometry.get("voltage_range", config.VOLTAGE_RANGE)),
        ),
        molecules=[
            MoleculeModel.from_dict(dict(m, name=m.get("name", f"molecule_{i}")))
            for i, m in enumerate(molecules)
        ],
        noise=NoiseModel.from_dict(data.get("noise", {})),
        dynamics=ChargeDynamics.from_dict(data.get("dynamics", {})),
        scan=ScanConfig.from_dict(dict(data.get("scan", {}), seed=seed)),
        actions=actions,
        path=source,
        warnings=list(warnings),
    )


def parse_scenario(data, source="<scenario>", lines=None, strict=False):
    """
    Validate a loaded scenario document and build its domain objects.

    Args:
        data: Parsed YAML (dict)
        source: Name used in diagnostics
        lines: Key-path to line index from line_index (optional)
        strict: Reject unknown keys instead of warning

    Returns:
        Scenario

    Raises:
        ConfigError: With one diagnostic per problem
    """
    c = _Collector(source, lines, strict)
    _check_document(data, c)
    if c.errors:
        raise ConfigError(f"Invalid scenario {source}", c.errors)
    for warning in c.warnings:
        logger.warning(f"  Warning: {warning}")
    return _build(data, source, c.warnings)


def load_scenario(filepath, strict=False):
    """
    Read and validate a scenario file.

    Returns:
        Scenario
    """
    if not os.path.exists(filepath):
        raise ConfigError(f"Scenario file not found: {filepath}")
    try:
        with open(filepath, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"Cannot read {filepath}: {e}") from e

    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 0
        raise ConfigError(f"Invalid YAML in {filepath}", [f"{filepath}:{line}: {getattr(e, 'problem', e)}"]) from e

    if data is None:
        raise ConfigError(f"Scenario {filepath} is empty")
    lines = line_index(node) if node is not None else {}
    return parse_scenario(data, source=filepath, lines=lines, strict=strict)


def validate_config(filepath, strict=False):
    """
    Check a scenario file without running it.

    Returns:
        List of warnings (empty when the file is clean)

    Raises:
        ConfigError: Schema violations (and unknown keys under strict)
    """
    return load_scenario(filepath, strict=strict).warnings
