import numpy as np
import pytest

from src import config
from src.errors import DataError
from src.fit.parabola import find_line_centers, fit_parabola
from src.fit.spectra import integrate_traces
from src.fit.voigt import fit_voigt
from src.physics.stark import MoleculeModel, NoiseModel
from src.simulate.electrodes import ElectrodeGeometry, FieldState
from src.simulate.scan import ScanConfig, ScanTrace, noise_substeps, simulate_scan, simulate_sweeps
from src.simulate.streams import make_rng
from src.simulate.sweep import simulate_sweep_map

GEOM = ElectrodeGeometry(geometry_factor=1.6)
SILENT = NoiseModel.silent()


def test_scan_grid():
    cfg = ScanConfig(span=1.0, scan_speed=0.5, bin_time=0.01)
    assert cfg.bin_width == pytest.approx(5.0)
    assert cfg.n_bins == 200
    assert cfg.sweep_duration == pytest.approx(2.0)
    detunings = cfg.detunings(center=100.0)
    assert detunings.mean() == pytest.approx(100.0)


def test_scan_config_invariants():
    with pytest.raises(DataError):
        ScanConfig(span=0.0)
    with pytest.raises(DataError):
        ScanConfig(n_sweeps=0)


def test_trace_needs_monotone_grid():
    with pytest.raises(DataError):
        ScanTrace(detunings=[0.0, 2.0, 1.0], counts=[1, 2, 3])
    with pytest.raises(DataError):
        ScanTrace(detunings=[0.0, 1.0], counts=[1, -2])


def test_counts_are_non_negative_integers():
    trace = simulate_scan(MoleculeModel(), FieldState(), NoiseModel(), GEOM, ScanConfig(seed=3))
    assert trace.counts.dtype == np.int64
    assert np.all(trace.counts >= 0)
    assert len(trace.counts) == len(trace.detunings)


def test_same_seed_same_trace():
    cfg = ScanConfig(seed=9)
    a = simulate_scan(MoleculeModel(), FieldState(), NoiseModel(), GEOM, cfg)
    b = simulate_scan(MoleculeModel(), FieldState(), NoiseModel(), GEOM, cfg)
    c = simulate_scan(MoleculeModel(), FieldState(), NoiseModel(), GEOM, ScanConfig(seed=10))
    assert np.array_equal(a.counts, b.counts)
    assert not np.array_equal(a.counts, c.counts)


def test_totals_scale_with_peak_rate():
    cfg = ScanConfig(seed=4, n_sweeps=5, inter_sweep_wait=0.0)
    totals = []
    for rate in (20000.0, 40000.0):
        traces, _ = simulate_sweeps(MoleculeModel(peak_rate=rate), FieldState(), SILENT, GEOM, cfg, make_rng(4, 0))
        totals.append(sum(t.total_counts for t in traces))
    assert totals[1] / totals[0] == pytest.approx(2.0, rel=0.1)


def test_noiseless_line_is_fourier_limited():
    cfg = ScanConfig(seed=2, n_sweeps=5, inter_sweep_wait=0.0)
    traces, _ = simulate_sweeps(MoleculeModel(), FieldState(), SILENT, GEOM, cfg, make_rng(2, 0))
    fit = fit_voigt(integrate_traces(traces), fix_gamma=None)
    assert fit.fwhm == pytest.approx(80.0, rel=0.1)
    assert abs(fit.center) < 5.0


def test_sweeps_carry_times_and_indices():
    cfg = ScanConfig(seed=2, n_sweeps=3, inter_sweep_wait=10.0)
    traces, state = simulate_sweeps(MoleculeModel(), FieldState(), NoiseModel(), GEOM, cfg, make_rng(2, 0))
    assert [t.sweep_index for t in traces] == [0, 1, 2]
    assert traces[1].start_time == pytest.approx(cfg.sweep_duration + 10.0)
    assert state.values.shape == (3, 2)


def test_sweep_map_is_independent_of_thread_count():
    cfg = ScanConfig(seed=21)
    voltages = np.linspace(-20, 20, 5)
    serial = simulate_sweep_map([MoleculeModel()], FieldState(), NoiseModel(), GEOM, voltages, cfg, follow=0)
    pooled = simulate_sweep_map([MoleculeModel()], FieldState(), NoiseModel(), GEOM, voltages, cfg, follow=0, jobs=4)
    for a, b in zip(serial.traces, pooled.traces):
        assert np.array_equal(a.counts, b.counts)


def test_sweep_map_rejects_bad_follow_and_voltages():
    cfg = ScanConfig()
    with pytest.raises(DataError):
        simulate_sweep_map([MoleculeModel()], FieldState(), SILENT, GEOM, [0.0], cfg, follow=1)
    with pytest.raises(DataError):
        simulate_sweep_map([MoleculeModel()], FieldState(), SILENT, GEOM, [0.0, 120.0], cfg)
    with pytest.raises(DataError):
        simulate_sweep_map([], FieldState(), SILENT, GEOM, [0.0], cfg)


def test_followed_sweep_map_recovers_curvature():
    cfg = ScanConfig(seed=17, n_sweeps=2, inter_sweep_wait=0.0)
    voltages = np.linspace(-40, 40, 17)
    sweep_map = simulate_sweep_map([MoleculeModel()], FieldState(), SILENT, GEOM, voltages, cfg, follow=0)
    centers = find_line_centers(sweep_map)
    track = centers[centers["track"] == centers["track"].value_counts().idxmax()]
    assert len(track) == len(voltages)
    fit = fit_parabola(track["voltage_V"], track["center_MHz"], track["center_err_MHz"], geom=GEOM)
    assert fit.kappa_xx == pytest.approx(1.82, rel=0.05)
    assert fit.vertex_voltage == pytest.approx(0.0, abs=1.0)


def test_unshifted_molecule_gives_flat_line():
    cfg = ScanConfig(seed=18, n_sweeps=2, inter_sweep_wait=0.0)
    voltages = np.linspace(-80, 80, 9)
    mol = MoleculeModel(kappa_xx=0.0)
    sweep_map = simulate_sweep_map([mol], FieldState(), SILENT, GEOM, voltages, cfg)
    centers = find_line_centers(sweep_map)
    assert np.all(np.abs(centers["center_MHz"]) < 10.0)


def test_fast_noise_is_sampled_inside_each_bin():
    assert noise_substeps(NoiseModel(tau_fast=0.0005), 0.01) == 20
    assert noise_substeps(NoiseModel(tau_fast=0.2), 0.01) == 1
    assert noise_substeps(NoiseModel(tau_fast=1e-6), 0.01) == config.NOISE_MAX_SUBSTEPS


def test_single_sweep_shows_only_the_fast_width():
    noise = NoiseModel(sigma_ex=0.47)
    state = FieldState(v_applied=23.4)
    line = -1.82 * (1.6 * 23.4) ** 2
    cfg = ScanConfig(span=1.0, scan_speed=0.5, bin_time=0.01, center=line, seed=12)
    widths = []
    for k in range(4):
        trace = simulate_scan(MoleculeModel(), state, noise, GEOM, cfg, rng=make_rng(12, k))
        widths.append(fit_voigt(trace, fix_gamma=80.0).sigma)
    assert np.median(widths) == pytest.approx(np.sqrt(0.4) * 64.0, rel=0.25)
