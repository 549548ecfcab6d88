"""YAML documents: fit reports, plans and calibrations."""

import os

import numpy as np
import yaml

from .. import config
from ..errors import ConfigError, DataError
from ..plan.calibrate import AnisotropyCalibration


def _plain(value):
    """Convert numpy scalars and arrays to YAML-safe Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return None
        return value
    return value


def write_document(document, filepath, kind):
    """
    Write one YAML document with a header naming its kind and tool version.

    Args:
        document: Dict (numpy values are converted)
        filepath: Output path
        kind: Document kind, e.g. "voigt_fit" or "plan"
    """
    directory = os.path.dirname(filepath)
    if directory:
        os.makedirs(directory, exist_ok=True)
    body = {"kind": kind, "version": config.VERSION}
    body.update(_plain(document))
    with open(filepath, "w", encoding="utf-8") as f:
        yaml.safe_dump(body, f, sort_keys=False, default_flow_style=None)
    return filepath


def write_documents(documents, filepath, kind):
    """Several documents of one kind in a multi-document YAML stream."""
    directory = os.path.dirname(filepath)
    if directory:
        os.makedirs(directory, exist_ok=True)
    bodies = [dict({"kind": kind, "version": config.VERSION}, **_plain(d)) for d in documents]
    with open(filepath, "w", encoding="utf-8") as f:
        yaml.safe_dump_all(bodies, f, sort_keys=False, default_flow_style=None)
    return filepath


def read_document(filepath, kind=None):
    """Read a YAML document, optionally checking its kind."""
    if not os.path.exists(filepath):
        raise DataError(f"File not found: {filepath}")
    try:
        with open(filepath, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {filepath}: {e}") from e
    if not isinstance(data, dict):
        raise DataError(f"{filepath}: expected a mapping")
    if kind is not None and data.get("kind", kind) != kind:
        raise DataError(f"{filepath}: expected a '{kind}' document, got '{data.get('kind')}'")
    return data


def load_calibration(filepath):
    """
    Read an anisotropy calibration.

    The file holds either the raw triple (sigma_base, sigma_x, shift_x,
    sigma_z, shift_z), optionally under a 'measurements' key; the derived
    products are always recomputed.

    Returns:
        (AnisotropyCalibration, dict of extra settings such as kappa_zz)
    """
    data = read_document(filepath, kind="calibration")
    measurements = data.get("measurements", data)
    calibration = AnisotropyCalibration.from_dict(measurements)
    extras = {k: v for k, v in data.items() if k in ("kappa_xx", "kappa_zz", "molecule")}
    return calibration, extras


def plan_document(plan, calibration=None):
    document = plan.to_dict()
    if calibration is not None:
        document["calibration"] = calibration.to_dict()
    return document
