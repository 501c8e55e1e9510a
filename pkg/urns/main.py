import argparse
import logging
import sys

from urns import __version__
from urns import commands
from urns import errors

logger = logging.getLogger(__name__)


def add_config_arguments(parser, sweep=False):
    parser.add_argument(
        "--config",
        action="store",
        type=argparse.FileType("r"),
        help="Experiment YAML configuration file, defaults apply when omitted",
    )
    parser.add_argument(
        "--out",
        action="store",
        help="Output directory, overrides the configuration",
    )
    if sweep:
        seeds = parser.add_mutually_exclusive_group()
        seeds.add_argument(
            "--seeds",
            action="store",
            help="Comma separated seeds, e.g. 1,2,3",
        )
        seeds.add_argument(
            "--seed-range",
            action="store",
            help="Inclusive seed range, e.g. 0..15",
        )
        parser.add_argument(
            "--stride",
            action="store",
            type=int,
            help="Record every K-th step, overrides the configuration",
        )


def add_output_argument(parser, help):
    parser.add_argument(
        "-o",
        "--output",
        action="store",
        default="-",
        type=argparse.FileType("w"),
        help=help,
    )


def parse_args(args=None):
    p = argparse.ArgumentParser(
        description="Simulate generalized urn processes and verify convergence to fixed points of simplex maps.",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    verbosity = p.add_mutually_exclusive_group()
    verbosity.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Set logging level to debug",
    )
    verbosity.add_argument(
        "-q",
        "--quiet",
        action="store_true",
        help="Set logging level to warning",
    )
    p.add_argument(
        "-V",
        "--version",
        action="store_true",
        help="Print version information",
    )

    subparsers = p.add_subparsers(dest="command", help="Command help")

    simulate_parser = subparsers.add_parser("simulate", help="Run one trajectory per seed and write CSV files")
    add_config_arguments(simulate_parser, sweep=True)

    fixed_points_parser = subparsers.add_parser("fixed-points", help="Print the fixed points of the configured map")
    add_config_arguments(fixed_points_parser)
    add_output_argument(fixed_points_parser, "Fixed point YAML output file")

    verify_parser = subparsers.add_parser("verify", help="Check the A1, A2 and A3 convergence conditions")
    add_config_arguments(verify_parser)
    add_output_argument(verify_parser, "Condition report YAML output file")

    diagnose_parser = subparsers.add_parser("diagnose", help="Drift and convergence diagnostics of trajectory files")
    diagnose_parser.add_argument(
        "trajectories",
        nargs="+",
        type=argparse.FileType("r"),
        help="Trajectory CSV files written by simulate",
    )
    add_config_arguments(diagnose_parser)
    add_output_argument(diagnose_parser, "Diagnostic report YAML output file")

    subparsers.add_parser("print-defaults", help="Print the default configuration as YAML")

    return p.parse_args(args=args)


def main(args=None):
    args = parse_args(args)

    if args.version:
        print(__version__)
        return 0

    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
        level=level,
    )

    command_dispatch = {
        "simulate": commands.simulate.main,
        "fixed-points": commands.fixed_points.main,
        "verify": commands.verify.main,
        "diagnose": commands.diagnose.main,
        "print-defaults": commands.defaults.main,
    }
    command = command_dispatch.get(args.command)
    if command is None:
        logger.error(f"Command unavailable: {args.command}")
        return 1

    logger.info("Starting command %s", args.command)
    try:
        result = command(args)
    except errors.InputError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 2
    except errors.UrnError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return 1
    finally:
        output = getattr(args, "output", None)
        if output is not None and output is not sys.stdout:
            output.close()
    logger.info("Finished command %s", args.command)

    return result


if __name__ == "__main__":
    sys.exit(main())
