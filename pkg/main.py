"""
Stark Tuning Toolkit

Simulates Stark tuning of single DBT molecules, fits the resulting spectra
and plans low spectral-diffusion operating points.
"""

import argparse
import logging
import sys
import traceback

from src import config
from src.commands import COMMANDS
from src.errors import ConfigError, StarkTuneError
from src.files.manifest import RunManifest


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Scenario YAML file")
    common.add_argument("--seed", type=int, default=None, help="Run seed (overrides the scenario)")
    common.add_argument(
        "--out", default=None,
        help=f"Output directory (--out > env:{config.OUTPUT_DIR_ENV} > '{config.OUTPUT_DIR}')",
    )
    common.add_argument("--strict", action="store_true", help="Reject unknown scenario keys")
    common.add_argument("--jobs", type=int, default=1, help="Worker threads for sweeps")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    return common


def _fit_options(parser):
    parser.add_argument("--fix-gamma", type=float, default=config.FIX_GAMMA,
                        help="Lorentzian FWHM held fixed, MHz (<= 0 frees it)")


def _centers_options(parser):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--centers", help="Line-centre CSV (voltage_V, center_MHz[, center_err_MHz, track])")
    source.add_argument("--sweep-map", help="Sweep-map CSV; lines are detected and tracked")
    parser.add_argument("--track", type=int, default=None, help="Track to fit (default: longest)")
    parser.add_argument("--mask", type=float, nargs=2, metavar=("V_LOW", "V_HIGH"), help="Voltage window")
    parser.add_argument("--geometry-factor", type=float, default=None, help="(kV/cm)/V")
    _fit_options(parser)


def build_parser():
    common = _common_options()
    parser = argparse.ArgumentParser(description="Stark tuning simulator, fitting toolkit and planner")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="Monte-Carlo measurements").add_subparsers(
        dest="subcommand", required=True)
    scan = simulate.add_parser("scan", parents=[common], help="Excitation sweeps at one voltage")
    scan.add_argument("--voltage", type=float, default=0.0, help="Electrode voltage, V")
    scan.add_argument("--center", type=float, default=None, help="Laser window centre, MHz")
    sweep = simulate.add_parser("sweep", parents=[common], help="Spectra over a voltage range")
    sweep.add_argument("--voltages", type=float, nargs=3, metavar=("START", "STOP", "NUM"),
                       default=[config.VOLTAGE_RANGE[0], config.VOLTAGE_RANGE[1], 41])
    sweep.add_argument("--follow", type=int, default=None, help="Molecule index the laser window tracks")
    simulate.add_parser("scenario", parents=[common], help="Run every action of a scenario")

    fit = commands.add_parser("fit", help="Fit measured or simulated data").add_subparsers(
        dest="subcommand", required=True)
    voigt = fit.add_parser("voigt", parents=[common], help="Voigt fit of a trace file")
    voigt.add_argument("--trace", required=True, help="Trace CSV")
    voigt.add_argument("--window", type=float, nargs=2, metavar=("LOW", "HIGH"), help="Detuning window, MHz")
    voigt.add_argument("--per-sweep", action="store_true", help="Fit every sweep instead of their sum")
    _fit_options(voigt)
    _centers_options(fit.add_parser("parabola", parents=[common], help="Stark parabola and kappa_xx"))
    sdlaw = fit.add_parser("sdlaw", parents=[common], help="Square-root law and sigma_E")
    sdlaw.add_argument("--points", required=True, help="CSV with shift_MHz, sigma_MHz[, sigma_err_MHz]")
    sdlaw.add_argument("--kappa", type=float, default=config.DBT_KAPPA_XX, help="MHz/(kV/cm)^2")
    sdlaw.add_argument("--kappa-err", type=float, default=config.DBT_KAPPA_XX_ERR)

    calibrate = commands.add_parser("calibrate", parents=[common], help="Anisotropy from an SD triple")
    triple = config.DBT_SD_TRIPLE
    for name in ("sigma_base", "sigma_x", "shift_x", "sigma_z", "shift_z"):
        calibrate.add_argument(f"--{name.replace('_', '-')}", type=float, default=triple[name], help="MHz")

    plan = commands.add_parser("plan", parents=[common], help="Minimum-SD operating point")
    plan.add_argument("--target", type=float, required=True, help="Target shift, MHz (<= 0)")
    plan.add_argument("--calibration", required=True, help="Calibration YAML")
    plan.add_argument("--kappa-zz", type=float, default=None, help="Assumed kappa_zz, MHz/(kV/cm)^2")
    plan.add_argument("--e-x-max", type=float, default=config.E_X_MAX, help="kV/cm")
    plan.add_argument("--e-z-max", type=float, default=config.E_Z_MAX, help="kV/cm")
    plan.add_argument("--tolerance", type=float, default=config.SHIFT_TOLERANCE, help="MHz")
    plan.add_argument("--operating-voltage", type=float, default=None, help="Synthesize an EGOSS schedule, V")
    plan.add_argument("--geometry-factor", type=float, default=None, help="(kV/cm)/V")

    report = commands.add_parser("report", help="Plot-ready tables and figures").add_subparsers(
        dest="subcommand", required=True)
    spectrum = report.add_parser("spectrum", parents=[common])
    spectrum.add_argument("--trace", required=True, help="Trace CSV")
    spectrum.add_argument("--no-fit", action="store_true")
    _fit_options(spectrum)
    sd = report.add_parser("sdlaw", parents=[common])
    sd.add_argument("--points", required=True, help="CSV with shift_MHz, sigma_MHz[, sigma_err_MHz]")
    _centers_options(report.add_parser("parabola", parents=[common]))

    validate = commands.add_parser("validate", parents=[common], help="Check a scenario file")
    validate.add_argument("path", nargs="?", help="Scenario YAML (or --config)")

    polar = commands.add_parser("polarizability", parents=[common], help="Sum-over-states kappa")
    polar.add_argument("--levels", default="data/dbt_levels.csv", help="Level table CSV")
    polar.add_argument("--axis", default="x")
    polar.add_argument("--three-level", type=float, nargs=4, metavar=("D01", "D12", "E10", "E21"),
                       help="Dipoles in Debye, gaps in eV")
    return parser


def configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(format="%(message)s", level=level, force=True)


def run(argv=None):
    """
    Parse the command line, run one subcommand and write its manifest.

    Returns:
        Exit status: 0 ok, 1 unexpected, 2 config, 3 data, 4 fit, 5 infeasible plan
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args)
    if getattr(args, "fix_gamma", None) is not None and args.fix_gamma <= 0:
        args.fix_gamma = None

    name = " ".join(p for p in (args.command, getattr(args, "subcommand", None)) if p)
    out = config.get_output_dir(args.out)
    manifest = RunManifest(command=name)

    if not args.quiet:
        print("=" * 60)
        print(f"STARK TUNING TOOLKIT: {name.upper()}")
        print("=" * 60)

    outputs, status = [], 0
    try:
        command = COMMANDS[(args.command, getattr(args, "subcommand", None))]
        outputs = command(args, out, manifest)
        for path in outputs:
            manifest.add_output(path)
    except ConfigError as e:
        print(f"\nCONFIG ERROR: {e}", file=sys.stderr)
        status = e.exit_status
        manifest.record_error(e, status)
    except StarkTuneError as e:
        print(f"\nERROR ({e.__class__.__name__}): {e}", file=sys.stderr)
        binding = getattr(e, "binding", None)
        if binding:
            print(f"  Binding constraint: {binding}", file=sys.stderr)
        status = e.exit_status
        manifest.record_error(e, status)
    except Exception as e:
        manifest.record_error(e, 1)
        raise
    finally:
        manifest_path = manifest.write(out)

    if status:
        return status
    if not args.quiet:
        print("\nOutputs:")
        for path in outputs:
            print(f"  - {path}")
        print(f"  - {manifest_path}")
        print(f"\n{name.upper()} COMPLETE")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(run())
    except Exception as e:
        print(f"\n\nERROR: {e}")
        traceback.print_exc()
        sys.exit(1)
