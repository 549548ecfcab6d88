"""Subcommand implementations.

Every command takes the parsed arguments, the output directory and the run
manifest, writes its files into the output directory and returns their paths.
"""

import os
from dataclasses import replace

import numpy as np

from . import config
from .display.parabola_plot import create_parabola_plot, parabola_table
from .display.sdlaw_plot import create_sdlaw_plot, sdlaw_table
from .display.spectrum_plot import create_spectrum_plot, spectrum_table
from .errors import DataError
from .files.reports import load_calibration, plan_document, write_document, write_documents
from .files.scenario import load_scenario, parse_scenario, validate_config
from .files.traces import (
    read_sdlaw_points,
    read_sweep_map,
    read_table,
    read_traces,
    write_sweep_map,
    write_table,
    write_traces,
)
from .fit.parabola import fit_parabola, find_line_centers
from .fit.spectra import integrate_traces
from .fit.sqrt_law import extract_field_variance, fit_sqrt_law
from .fit.voigt import fit_voigt
from .physics.polarizability import alpha_sum_over_states, alpha_three_level, load_level_data, sanity_check
from .physics.stark import MoleculeModel
from .plan.calibrate import calibrate_anisotropy, noise_from_calibration
from .plan.optimize import TuningConstraints, plan_min_sd
from .plan.schedule import synthesize_schedule
from .simulate.charges import ChargeDynamics
from .simulate.electrodes import ElectrodeGeometry, FieldState
from .simulate.scan import simulate_sweeps
from .simulate.session import ScenarioSession
from .simulate.streams import make_rng
from .simulate.sweep import simulate_sweep_map


def load_setup(args, manifest):
    """Scenario from --config (defaults when absent), with --seed applied."""
    if args.config:
        manifest.add_input(args.config)
        scenario = load_scenario(args.config, strict=args.strict)
        manifest.scenario = args.config
    else:
        scenario = parse_scenario({}, source="<defaults>")
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    manifest.seed = scenario.seed
    return scenario


def _geometry(args, scenario=None):
    if getattr(args, "geometry_factor", None) is not None:
        return ElectrodeGeometry(geometry_factor=args.geometry_factor)
    return scenario.geometry if scenario is not None else ElectrodeGeometry()


def _input(path, manifest):
    if not path:
        raise DataError("Missing input file")
    manifest.add_input(path)
    return path


# simulate

def simulate_scan_command(args, out, manifest):
    sc = load_setup(args, manifest)
    state = FieldState(v_applied=args.voltage)
    sc.geometry.check_voltage(args.voltage)
    rng = make_rng(sc.seed, 0)
    traces, _ = simulate_sweeps(sc.molecules, state, sc.noise, sc.geometry, sc.scan, rng, center=args.center)
    path = write_traces(traces, os.path.join(out, "scan.csv"))
    print(f"  {len(traces)} sweep(s), {sum(t.total_counts for t in traces)} counts at {args.voltage:+.1f} V")
    return [path]


def simulate_sweep_command(args, out, manifest):
    sc = load_setup(args, manifest)
    start, stop, num = args.voltages
    voltages = np.linspace(start, stop, int(num))
    sweep_map = simulate_sweep_map(
        sc.molecules, FieldState(), sc.noise, sc.geometry, voltages, sc.scan,
        follow=args.follow, jobs=args.jobs, show_progress=not args.quiet,
    )
    path = write_sweep_map(sweep_map, os.path.join(out, "sweep_map.csv"))
    print(f"  {len(voltages)} voltages from {start:+.1f} to {stop:+.1f} V")
    return [path]


def simulate_scenario_command(args, out, manifest):
    if not args.config:
        raise DataError("simulate scenario needs --config")
    sc = load_setup(args, manifest)
    session = ScenarioSession(sc, output_dir=out, jobs=args.jobs, show_progress=not args.quiet)
    try:
        results = session.run()
    finally:
        # steps finished before a failure keep their files in the manifest
        for r in session.results:
            if r.output:
                manifest.add_output(r.output)
    outputs = [r.output for r in results if r.output]
    outputs.append(write_table(session.state_table(), os.path.join(out, "session_states.csv")))
    print(f"  {len(results)} steps, {len(outputs) - 1} data file(s)")
    return outputs


# fit

def fit_voigt_command(args, out, manifest):
    traces = read_traces(_input(args.trace, manifest))
    window = tuple(args.window) if args.window else None
    if args.per_sweep:
        fits = [fit_voigt(t, fix_gamma=args.fix_gamma, window=window) for t in traces]
    else:
        fits = [fit_voigt(integrate_traces(traces), fix_gamma=args.fix_gamma, window=window)]
    path = write_documents([f.to_dict() for f in fits], os.path.join(out, "voigt_fit.yaml"), "voigt_fit")
    for fit in fits:
        print(
            f"  center {fit.center:.1f} +/- {fit.center_err:.1f} MHz, sigma {fit.sigma:.1f} +/- "
            f"{fit.sigma_err:.1f} MHz, gamma {fit.gamma:.1f} MHz, chi2_red {fit.chi2_red:.2f}"
        )
    return [path]


def _centers_from_args(args, manifest):
    """Line-centre table from --centers, or by tracking lines in --sweep-map."""
    if args.centers:
        df = read_table(_input(args.centers, manifest), ["voltage_V", "center_MHz"])
        if "track" not in df:
            df["track"] = 0
        if "center_err_MHz" not in df:
            df["center_err_MHz"] = np.nan
        return df, False
    sweep_map = read_sweep_map(_input(args.sweep_map, manifest))
    mask = tuple(args.mask) if args.mask else None
    return find_line_centers(sweep_map, fix_gamma=args.fix_gamma, mask=mask), True


def _select_track(centers, track=None):
    if centers.empty:
        raise DataError("No line centres found")
    if track is None:
        track = int(centers["track"].value_counts().idxmax())
    points = centers[centers["track"] == track]
    if points.empty:
        raise DataError(f"Track {track} not found")
    return points


def _parabola_fit(points, geom):
    errs = points["center_err_MHz"].to_numpy(dtype=float)
    errs = errs if np.all(np.isfinite(errs)) and np.all(errs > 0) else None
    return fit_parabola(points["voltage_V"], points["center_MHz"], errs, geom=geom)


def fit_parabola_command(args, out, manifest):
    centers, tracked = _centers_from_args(args, manifest)
    outputs = []
    if tracked:
        outputs.append(write_table(centers, os.path.join(out, "centers.csv")))
    points = _select_track(centers, args.track)
    fit = _parabola_fit(points, _geometry(args))
    outputs.append(write_document(fit.to_dict(), os.path.join(out, "parabola_fit.yaml"), "parabola_fit"))
    print(
        f"  kappa_xx = {fit.kappa_xx:.3f} +/- {fit.kappa_xx_err:.3f} MHz/(kV/cm)^2, "
        f"vertex {fit.vertex_voltage:+.2f} +/- {fit.vertex_voltage_err:.2f} V"
    )
    return outputs


def fit_sdlaw_command(args, out, manifest):
    shifts, sigmas, errs = read_sdlaw_points(_input(args.points, manifest))
    fit = fit_sqrt_law(shifts, sigmas, errs)
    document = fit.to_dict()
    if fit.a >= 0:
        variance = extract_field_variance(fit.a, args.kappa, fit.a_err, args.kappa_err)
        document["kappa"] = args.kappa
        document["sigma_e"] = variance.sigma_e
        document["sigma_e_err"] = variance.sigma_e_err
    path = write_document(document, os.path.join(out, "sdlaw_fit.yaml"), "sdlaw_fit")
    print(f"  a = {fit.a:.3f} +/- {fit.a_err:.3f} MHz, sigma0 = {fit.sigma0:.1f} +/- {fit.sigma0_err:.1f} MHz")
    if "sigma_e" in document:
        print(f"  sigma_E = {document['sigma_e']:.3f} +/- {document['sigma_e_err']:.3f} kV/cm")
    return [path]


# calibrate / plan

def calibrate_command(args, out, manifest):
    cal = calibrate_anisotropy(args.sigma_base, args.sigma_x, args.shift_x, args.sigma_z, args.shift_z)
    document = {"measurements": {k: getattr(cal, k) for k in ("sigma_base", "sigma_x", "shift_x", "sigma_z", "shift_z")}}
    document["derived"] = {k: getattr(cal, k) for k in ("a_x", "a_z", "post_shift_ratio", "increase_ratio")}
    path = write_document(document, os.path.join(out, "calibration.yaml"), "calibration")
    print(f"  a_x = {cal.a_x:.4f} MHz, a_z = {cal.a_z:.4f} MHz")
    print(f"  sigma_x / sigma_z = {cal.post_shift_ratio:.2f}, increase ratio = {cal.increase_ratio:.1f}")
    return [path]


def plan_command(args, out, manifest):
    cal, extras = load_calibration(_input(args.calibration, manifest))
    if args.config:
        sc = load_setup(args, manifest)
        mol, geom, dyn = sc.molecules[0], sc.geometry, sc.dynamics
    else:
        mol = MoleculeModel(**dict(config.dbt_molecule(), kappa_xx=extras.get("kappa_xx", config.DBT_KAPPA_XX)))
        geom, dyn = _geometry(args), None
    kappa_zz = args.kappa_zz if args.kappa_zz is not None else extras.get("kappa_zz")
    mol, noise = noise_from_calibration(cal, mol, kappa_zz)

    constraints = TuningConstraints(
        e_x_max=args.e_x_max, e_z_max=args.e_z_max, noise=noise,
        operating_voltage=args.operating_voltage, tolerance=args.tolerance,
    )
    plan = plan_min_sd(mol, None, args.target, constraints)
    if plan.operating_voltage is not None:
        schedule = synthesize_schedule(plan, dyn or ChargeDynamics(), geom)
        plan = replace(plan, schedule=schedule)

    path = write_document(plan_document(plan, cal), os.path.join(out, "plan.yaml"), "plan")
    print(f"  Target {plan.target_shift:.0f} MHz -> E = ({plan.e_x:.1f}, {plan.e_z:.1f}) kV/cm")
    print(f"  Predicted sigma = {plan.predicted_sigma:.1f} MHz")
    if plan.schedule is not None:
        for step in plan.schedule.steps:
            print(f"  EGOSS {step.v_bias:+.1f} V x {step.duration:.0f} s at I = {step.pump_intensity:g}")
    return [path]


# report

def report_spectrum(args, out, manifest):
    traces = read_traces(_input(args.trace, manifest))
    spectrum = integrate_traces(traces)
    fit = fit_voigt(spectrum, fix_gamma=args.fix_gamma) if not args.no_fit else None
    table = spectrum_table(spectrum, fit)
    csv_path = write_table(table, os.path.join(out, "spectrum_table.csv"))
    png_path = os.path.join(out, "spectrum.png")
    create_spectrum_plot(table, fit, png_path)
    return [csv_path, png_path]


def report_sdlaw(args, out, manifest):
    shifts, sigmas, errs = read_sdlaw_points(_input(args.points, manifest))
    fit = fit_sqrt_law(shifts, sigmas, errs)
    table = sdlaw_table(shifts, sigmas, errs, fit)
    csv_path = write_table(table, os.path.join(out, "sdlaw_table.csv"))
    png_path = os.path.join(out, "sdlaw.png")
    create_sdlaw_plot(table, fit, png_path)
    return [csv_path, png_path]


def report_parabola(args, out, manifest):
    centers, _ = _centers_from_args(args, manifest)
    points = _select_track(centers, args.track)
    fit = _parabola_fit(points, _geometry(args))
    table = parabola_table(centers, fit)
    csv_path = write_table(table, os.path.join(out, "parabola_table.csv"))
    png_path = os.path.join(out, "parabola.png")
    create_parabola_plot(table, fit, png_path)
    return [csv_path, png_path]


# validate / polarizability

def validate_command(args, out, manifest):
    path = args.path or args.config
    if not path:
        raise DataError("validate needs a scenario path")
    manifest.add_input(path)
    warnings = validate_config(path, strict=args.strict)
    print(f"  {path}: ok" + (f" ({len(warnings)} warning(s))" if warnings else ""))
    return []


def polarizability_command(args, out, manifest):
    if args.three_level:
        d01, d12, e10, e21 = args.three_level
        kappa = alpha_three_level(d01, d12, e10, e21)
        source = "three-level"
    else:
        levels = load_level_data(_input(args.levels, manifest))
        kappa = alpha_sum_over_states(levels, axis=args.axis)
        source = args.levels
    inside = sanity_check(kappa)
    document = {"source": source, "kappa": kappa, "inside_sanity_band": inside,
                "sanity_band": list(config.KAPPA_SANITY_BAND)}
    path = write_document(document, os.path.join(out, "polarizability.yaml"), "polarizability")
    print(f"  kappa = {kappa:.6g} MHz/(kV/cm)^2 ({'inside' if inside else 'outside'} the sanity band)")
    return [path]


COMMANDS = {
    ("simulate", "scan"): simulate_scan_command,
    ("simulate", "sweep"): simulate_sweep_command,
    ("simulate", "scenario"): simulate_scenario_command,
    ("fit", "voigt"): fit_voigt_command,
    ("fit", "parabola"): fit_parabola_command,
    ("fit", "sdlaw"): fit_sdlaw_command,
    ("calibrate", None): calibrate_command,
    ("plan", None): plan_command,
    ("report", "spectrum"): report_spectrum,
    ("report", "sdlaw"): report_sdlaw,
    ("report", "parabola"): report_parabola,
    ("validate", None): validate_command,
    ("polarizability", None): polarizability_command,
}

