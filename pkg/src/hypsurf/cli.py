import sys

from hypsurf.cli_tools.args_parser import parse_args, run  # noqa: F401
from hypsurf.config.logging_config import configure_logging

logger = configure_logging(__name__)


def main() -> None:
    """Entry point for the `hypsurf` CLI.

    Bare invocation prints help; subcommands go through the command
    registry inside ``parse_args``.
    """
    sys.exit(parse_args(sys.argv[1:]))


if __name__ == "__main__":
    logger.info("=" * 80)
    logger.info("Starting hypsurf")
    logger.info("=" * 80 + "\n")

    main()
