"""
Main program entry module.

Parses the command line, configures logging and dispatches to the
subcommand, translating errors into exit codes.
"""

import logging
import sys
import traceback
from typing import List, Optional

from qhd_system.cli.commands import COMMANDS, parse_args
from qhd_system.core.errors import ConfigError, QGameError, ValidationError

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format=LOG_FORMAT, stream=sys.stderr)


def main(args: Optional[List[str]] = None) -> int:
    """Main function, processes command line arguments and calls the selected command.

    Args:
        args: Command line argument list, if None uses sys.argv[1:]

    Returns:
        Exit code: 0 on success, 1 on verification failure or an unexpected
        error, 2 on invalid input, 130 when interrupted
    """
    try:
        parsed_args = parse_args(args)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 after --help
        return e.code if isinstance(e.code, int) else 2

    configure_logging(parsed_args.verbose)
    try:
        return COMMANDS[parsed_args.command](parsed_args)
    except (ConfigError, ValidationError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    except QGameError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\nOperation interrupted by user", file=sys.stderr)
        return 130
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
