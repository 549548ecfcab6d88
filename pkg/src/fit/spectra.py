"""Integration of repeated sweeps into one spectrum."""

import numpy as np

from ..errors import DataError
from ..simulate.scan import ScanTrace


def integrate_traces(traces):
    """
    Bin-wise sum of sweeps recorded on the same detuning grid.

    Args:
        traces: List of ScanTrace

    Returns:
        ScanTrace with n_sweeps = total sweeps summed and observation_span
        from the first bin of the earliest sweep to the end of the last one
    """
    if not traces:
        raise DataError("Nothing to integrate")

    grid = traces[0].detunings
    for trace in traces[1:]:
        if trace.detunings.shape != grid.shape or not np.allclose(trace.detunings, grid, rtol=0, atol=1e-6):
            raise DataError("Traces do not share a detuning grid")

    if len(traces) == 1:
        return traces[0]

    counts = np.sum([t.counts for t in traces], axis=0)
    start = min(t.start_time for t in traces)
    end = max(t.start_time + t.observation_span for t in traces)
    return ScanTrace(
        detunings=grid,
        counts=counts,
        start_time=start,
        sweep_index=traces[0].sweep_index,
        bin_time=traces[0].bin_time,
        n_sweeps=sum(t.n_sweeps for t in traces),
        observation_span=end - start,
    )
