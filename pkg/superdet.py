"""superdet.py: Simulate and analyse repeated alternating measurements for a test of superdeterminism."""
import argparse
import sys

from src import __version__
from src.main import DESCRIPTION, ArgumentParser, add_subcommands, run_cli


def add_arguments(arg_parser: argparse.ArgumentParser):
    '''
    Adds arguments to the given ArgumentParser object.

    Args:
        arg_parser (argparse.ArgumentParser): The ArgumentParser object to add arguments to.

    Returns:
      None
    '''
    arg_parser.add_argument(
        "-v", "--version", action="version", version=f"%(prog)s {__version__}", help="show the current version and exit"
    )

    add_subcommands(arg_parser)


if __name__ == "__main__":
    parser = ArgumentParser(prog="superdet", description=DESCRIPTION)
    add_arguments(parser)

    try:
        sys.exit(run_cli(parser=parser))
    except KeyboardInterrupt:
        print("\nCtrl+C pressed. Stopping")
        sys.exit(130)
