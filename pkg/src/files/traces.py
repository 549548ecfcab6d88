"""CSV files for scan traces, sweep maps and result tables."""

import os

import numpy as np
import pandas as pd

from .. import config
from ..errors import DataError
from ..simulate.scan import ScanTrace
from ..simulate.sweep import SweepMap

FLOAT_FORMAT = "%.6f"
TRACE_COLUMNS = ["sweep_index", "time_s", "detuning_MHz", "counts"]
SWEEP_MAP_COLUMNS = ["voltage_V"] + TRACE_COLUMNS
SDLAW_COLUMNS = ["shift_MHz", "sigma_MHz"]


def _ensure_dir(filepath):
    directory = os.path.dirname(filepath)
    if directory:
        os.makedirs(directory, exist_ok=True)


def write_table(df, filepath):
    """Write a DataFrame with the fixed float format used for every output."""
    _ensure_dir(filepath)
    df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT)
    return filepath


def read_table(filepath, required=()):
    """
    Read a CSV and check it has the required columns.

    Raises:
        DataError: Missing file, unparsable content or missing columns
    """
    if not os.path.exists(filepath):
        raise DataError(f"File not found: {filepath}")
    try:
        df = pd.read_csv(filepath, comment="#")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"Cannot parse {filepath}: {e}") from e
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise DataError(f"{filepath}: missing column(s) {', '.join(missing)}")
    return df


def traces_to_frame(traces):
    frames = []
    for trace in traces:
        frames.append(pd.DataFrame({
            "sweep_index": np.full(len(trace.detunings), trace.sweep_index, dtype=int),
            "time_s": trace.times,
            "detuning_MHz": trace.detunings,
            "counts": trace.counts,
        }))
    return pd.concat(frames, ignore_index=True)


def write_traces(traces, filepath):
    """
    Write sweeps as one long table (one row per bin).

    Args:
        traces: ScanTrace or list of them
        filepath: Output CSV path
    """
    if isinstance(traces, ScanTrace):
        traces = [traces]
    return write_table(traces_to_frame(traces), filepath)


def _bin_time(times):
    if len(times) > 1:
        return float(np.median(np.diff(times)))
    return config.SCAN_BIN_TIME


def _frame_to_traces(df):
    traces = []
    for index, group in df.groupby("sweep_index", sort=True):
        times = group["time_s"].to_numpy(dtype=float)
        traces.append(ScanTrace(
            detunings=group["detuning_MHz"].to_numpy(dtype=float),
            counts=group["counts"].to_numpy(),
            start_time=float(times[0]),
            sweep_index=int(index),
            bin_time=_bin_time(times),
        ))
    return traces


def read_traces(filepath):
    """
    Read a trace CSV back into sweeps.

    Returns:
        List of ScanTrace ordered by sweep_index
    """
    df = read_table(filepath, TRACE_COLUMNS)
    if df.empty:
        raise DataError(f"{filepath}: no rows")
    if (df["counts"] < 0).any():
        raise DataError(f"{filepath}: negative counts")
    return _frame_to_traces(df)


def write_sweep_map(sweep_map, filepath):
    """Write a sweep map as trace rows (one per voltage, sweep and bin) with a voltage_V column."""
    frames = []
    for v, sweeps in zip(sweep_map.voltages, sweep_map.sweeps):
        frame = traces_to_frame(sweeps)
        frame.insert(0, "voltage_V", v)
        frames.append(frame)
    return write_table(pd.concat(frames, ignore_index=True), filepath)


def read_sweep_map(filepath):
    """
    Read a sweep-map CSV: trace columns plus voltage_V.

    Rows are grouped by voltage, then by sweep_index; the sweeps at one
    voltage must share a detuning grid and are integrated into its spectrum.

    Returns:
        SweepMap with voltages in file order
    """
    df = read_table(filepath, SWEEP_MAP_COLUMNS)
    if df.empty:
        raise DataError(f"{filepath}: no rows")
    if (df["counts"] < 0).any():
        raise DataError(f"{filepath}: negative counts")

    voltages, sweeps = [], []
    for v, group in df.groupby("voltage_V", sort=False):
        voltages.append(float(v))
        sweeps.append(_frame_to_traces(group))
    return SweepMap(voltages=np.array(voltages), sweeps=sweeps)


def read_sdlaw_points(filepath):
    """
    Read (|shift|, sigma[, sigma_err]) points for a sqrt-law fit.

    Returns:
        (shifts, sigmas, sigma_errs or None)
    """
    df = read_table(filepath, SDLAW_COLUMNS)
    shifts = df["shift_MHz"].to_numpy(dtype=float)
    sigmas = df["sigma_MHz"].to_numpy(dtype=float)
    errs = df["sigma_err_MHz"].to_numpy(dtype=float) if "sigma_err_MHz" in df else None
    return shifts, sigmas, errs
