#!/usr/bin/env python3
"""
Batch command-line driver.
Usage:
  qdeform [--format json|columns] [--output PATH] [--seed N] [--config FILE.json] <subcommand> [flags]

Global options may also follow the subcommand.

Subcommands: algebra, leptons, classical, hubbard, noise, field, verify-all.

Exit status is 0 when every check passes, 1 on a failed check or a library
error (named in the report), 2 on a usage error.
"""
import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from qdeform import __version__
from qdeform.classical_dynamics import FREQUENCY_GRID_LAMBDAS, FREQUENCY_GRID_U0S
from qdeform.report import execute, render
from qdeform.runners import SUPPORTED_SUBCOMMANDS

logger = logging.getLogger(__name__)

GLOBAL_KEYS = ("format", "output", "seed", "config", "verbose", "quiet", "command")


def float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def int_pair(text: str) -> tuple[int, int]:
    try:
        first, second = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}")
    return first, second


def add_global_options(parser: argparse.ArgumentParser, suppress: bool = False) -> None:
    """
    Options accepted both before and after the subcommand.

    The subcommand copies default to SUPPRESS so a value given before the
    subcommand is not overwritten by the subparser's default.
    """
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--format", choices=["json", "columns"], default=default("json"),
                        help="Report format (default: json)")
    parser.add_argument("--output", default=default(None), help="Write the report to this path instead of stdout")
    parser.add_argument("--seed", type=int, default=default(None), help="Random seed (required by noise)")
    parser.add_argument("--config", default=default(None), help="JSON file of flag values; explicit flags take precedence")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", default=default(False), help="Log at DEBUG level")
    verbosity.add_argument("--quiet", action="store_true", default=default(False), help="Log warnings and errors only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdeform", description="Deformed oscillator algebra toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    add_global_options(parser)
    common = argparse.ArgumentParser(add_help=False)
    add_global_options(common, suppress=True)
    subparsers = parser.add_subparsers(dest="command", required=True)

    algebra = subparsers.add_parser("algebra", parents=[common],
                                    help="Verify deformed commutation relations on a truncated Fock space")
    algebra.add_argument("--which", choices=["qboson", "general", "jordan-schwinger-boson", "jordan-schwinger-fermion"],
                         default="qboson")
    algebra.add_argument("--lambda", dest="lam", type=float, default=0.5, help="Deformation parameter, q = e^lambda")
    algebra.add_argument("--dim", type=int, default=32, help="Levels per boson mode")
    algebra.add_argument("--margin", type=int, default=1, help="Top levels excluded from the checks")
    algebra.add_argument("--gh", choices=["linear", "damped"], default="linear", help="(g, h) preset for --which general")
    algebra.add_argument("--force-f-identity", action="store_true", help="Negative control: use f = 1")

    leptons = subparsers.add_parser("leptons", parents=[common], help="Fit the q-oscillator lepton spectrum")
    leptons.add_argument("--m-e", type=float, default=0.511)
    leptons.add_argument("--m-mu", type=float, default=105.658)
    leptons.add_argument("--m-tau", type=float, default=1776.86)
    leptons.add_argument("--n-max", type=int, default=3)

    classical = subparsers.add_parser("classical", parents=[common], help="Integrate the classical deformed oscillator")
    classical.add_argument("--lambda", dest="lam", type=float, default=0.5)
    classical.add_argument("--q0", type=float, default=2.0)
    classical.add_argument("--p0", type=float, default=0.0)
    classical.add_argument("--dt", type=float, default=1e-3)
    classical.add_argument("--periods", type=float, default=2.5, help="Predicted periods to integrate")
    classical.add_argument("--steps", type=int, help="Fixed step count (overrides --periods)")
    classical.add_argument("--integrator", choices=["rk4", "midpoint"], default="rk4")
    classical.add_argument("--scan", action="store_true", help="Scan a (lambda, u0) grid instead")
    classical.add_argument("--lambdas", type=float_list, default=list(FREQUENCY_GRID_LAMBDAS))
    classical.add_argument("--u0s", type=float_list, default=list(FREQUENCY_GRID_U0S))

    hubbard = subparsers.add_parser("hubbard", parents=[common], help="Exact diagonalization of the deformed Hubbard model")
    hubbard.add_argument("--sites", type=int, default=2)
    hubbard.add_argument("--q", type=float, default=1.0)
    hubbard.add_argument("--t", type=float, default=1.0)
    hubbard.add_argument("--U", type=float, default=4.0)
    hubbard.add_argument("--sector", type=int_pair, help="N_up,N_dn (default: all sectors)")
    hubbard.add_argument("--geometry", choices=["open", "ring"], default="open")
    hubbard.add_argument("--workers", type=int, default=1)

    noise = subparsers.add_parser("noise", parents=[common], help="Monte Carlo statistics of deformed white noise")
    noise.add_argument("--lambda", dest="lam", type=float, default=0.3)
    noise.add_argument("--samples", type=int, default=10_000)
    noise.add_argument("--modes", dest="mode_cutoff", type=int, default=64, help="Mode cutoff M")
    noise.add_argument("--xi", choices=["gaussian", "raised-cosine"], default="gaussian")
    noise.add_argument("--width", type=float, default=1.0, help="Gaussian width s")
    noise.add_argument("--half-width", type=float, default=2.0, help="Raised-cosine half width w")
    noise.add_argument("--convention", choices=["complex", "real"], default="complex")
    noise.add_argument("--time-grid", type=float_list, default=[0.0, 0.5, 1.0, 1.5, 2.0])
    noise.add_argument("--workers", type=int, default=1)
    noise.add_argument("--fit", action="store_true", help="Add the small-lambda structure fit")
    noise.add_argument("--paths", type=int, default=0, help="Sample paths to emit as columns")

    field = subparsers.add_parser("field", parents=[common], help="Charge-dependent deformed boson field")
    field.add_argument("--modes", type=float_list, default=[0.0], help="Mode momenta k")
    field.add_argument("--m0", type=float, default=1.0)
    field.add_argument("--mass", choices=["constant", "quadratic", "abs"], default="quadratic")
    field.add_argument("--mass-coeffs", type=float_list, help="M²(q) polynomial coefficients, lowest power first")
    field.add_argument("--cutoff", type=int, default=5)
    field.add_argument("--margin", type=int, default=2)

    subparsers.add_parser("verify-all", parents=[common], help="Run the full acceptance suite")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    Parse flags, folding in --config values underneath explicit flags.

    Config keys must be flag destinations of the chosen subcommand (or one of
    the global options); anything else is a usage error.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config) as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        parser.error(f"cannot read config {args.config}: {e}")
    if not isinstance(config, dict):
        parser.error(f"config {args.config} must hold a JSON object")
    unknown = sorted(set(config) - set(vars(args)) | set(config) & {"config", "command"})
    if unknown:
        parser.error(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    parser.set_defaults(**{k: v for k, v in config.items() if k in GLOBAL_KEYS})
    subparser.set_defaults(**{k: v for k, v in config.items() if k not in GLOBAL_KEYS})
    return parser.parse_args(argv)


def configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    logging.captureWarnings(True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point.

    Example:
        $ qdeform algebra --which qboson --lambda 0.5 --dim 32
        $ qdeform --seed 7 noise --lambda 0.3 --xi gaussian
    """
    args = parse_args(argv)
    configure_logging(args)
    if args.command == "noise" and args.seed is None:
        build_parser().error("noise requires --seed")
    parameters = {k: v for k, v in vars(args).items() if k not in GLOBAL_KEYS}
    if args.command == "noise":
        parameters["seed"] = args.seed
    logger.info("Running %s with %s", args.command, parameters)

    execution = execute(args.command, SUPPORTED_SUBCOMMANDS[args.command], parameters)
    text = render(execution, args.format)
    if args.output:
        with open(args.output, "w") as f:
            f.write(text)
        logger.info("Report written to %s", args.output)
    else:
        sys.stdout.write(text)
    return 0 if execution.passed else 1


if __name__ == "__main__":
    sys.exit(main())
