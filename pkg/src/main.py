"""Main module for the application."""
import argparse
import sys
from dataclasses import fields
from typing import List, Optional

from src import __version__
from src.config import SUBCOMMANDS, Config, GeneralConfig, load_config_file
from src.errors import ConfigError, SuperdetError, UsageError
from src.jobs import JobRunner
from src.logger import configure_logger, logger

DESCRIPTION = "Simulate, analyse and plan sequential-measurement tests of superdeterminism."

DESCRIPTIONS = {
    "simulate": "simulate an ensemble of alternating measurements",
    "analyze": "estimate and fit the outcome autocorrelation of an ensemble file",
    "test": "test an ensemble file against the quantum prediction",
    "feasibility": "compare the detector autocorrelation time with the photon bounce time",
    "sweep": "evaluate feasibility over a parameter grid",
}


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, so run_cli controls the exit code."""

    def error(self, message):
        raise UsageError(message)


def _add_section(parser: argparse.ArgumentParser, section):
    for f in fields(section):
        flag = f"--{f.name.replace('_', '-')}"
        cast = f.metadata["cast"]
        if f.type is bool:
            parser.add_argument(flag, dest=f.name, action="store_const", const=True, default=None,
                                help=f.metadata["help"])
        else:
            parser.add_argument(flag, dest=f.name, default=None, choices=getattr(cast, "choices", None),
                                help=f.metadata["help"])


def add_subcommands(parser: argparse.ArgumentParser):
    """
    Adds one subparser per subcommand; every configuration field is a flag of its subcommand.
    """
    common = ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="JSON file of settings or a run manifest to repeat")
    _add_section(common, GeneralConfig)

    subparsers = parser.add_subparsers(dest="subcommand", metavar="subcommand", required=True)
    for name, section in SUBCOMMANDS.items():
        subparser = subparsers.add_parser(name, parents=[common], help=DESCRIPTIONS[name])
        _add_section(subparser, section)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="superdet", description=DESCRIPTION)
    parser.add_argument("-v", "--version", action="version", version=f"%(prog)s {__version__}",
                        help="show the current version and exit")
    add_subcommands(parser)
    return parser


def main(args: argparse.Namespace) -> int:
    """
    Merges the config file with the command-line flags and runs the job.

    Args:
        args: Parsed command line arguments.

    Returns:
        0 on success.
    """
    values = load_config_file(args.config, args.subcommand) if args.config else {}
    values.update({key: value for key, value in vars(args).items()
                   if value is not None and key not in ("config", "subcommand")})

    config = Config.from_values(args.subcommand, values)
    configure_logger(config.general.log_level, config.general.log_file)
    logger.info("[CLI] Starting superdet %s %s", __version__, args.subcommand)

    JobRunner(config).run()
    return 0


def run_cli(argv: Optional[List[str]] = None, parser: Optional[argparse.ArgumentParser] = None) -> int:
    """
    Runs the command line and maps failures to exit codes.

    Returns:
        0 on success, 1 on a usage or configuration error, 2 on a runtime or data error.
    """
    try:
        args = (parser or build_parser()).parse_args(argv)
        return main(args)
    except SystemExit as exit_request:
        # --help and --version
        return exit_request.code or 0
    except (UsageError, ConfigError) as err:
        logger.error("[CLI] %s", err)
        print(f"superdet: error: {err}", file=sys.stderr)
        return 1
    except (SuperdetError, OSError) as err:
        logger.error("[CLI] %s", err)
        print(f"superdet: error: {err}", file=sys.stderr)
        return 2
