import os

from hypsurf.cli_tools.arg_utils import ArgError, ParsedArgs, check_bare_args, suggest_command
from hypsurf.cli_tools.cli_help import display_cli_help
from hypsurf.cli_tools.command_registry import get_registry
from hypsurf.config.logging_config import configure_logging
from hypsurf.config.run_config import RunConfig
from hypsurf.config.settings_service import TOLERANCE_ENV, SettingsService
from hypsurf.errors import ConfigError

logger = configure_logging(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def resolve_run_config(p: ParsedArgs) -> RunConfig:
    """Settings defaults, then ``--config=PATH``, then the global flags."""
    path = p.get_string("config")
    config = RunConfig.from_file(path) if path else RunConfig.from_settings()
    config = config.with_overrides(
        seed=p.get_int("seed"),
        threads=p.get_int("threads"),
        out=p.get_string("out"),
        tolerance=p.get_float("tolerance"),
    )
    if config.tolerance != SettingsService().tolerance:
        # geometric predicates read the tolerance through SettingsService
        os.environ[TOLERANCE_ENV] = repr(config.tolerance)
    return config


def run(command: str, config: RunConfig, args: list[str] | None = None) -> int:
    """Run one subcommand against a resolved ``config`` and return the exit status.

    ``args`` carries per-command ``--key=value`` overrides.
    """
    entry = get_registry().resolve(command)
    if entry is None:
        print(f"Unknown command: '{command}'")
        return EXIT_USAGE
    logger.info(f"hypsurf {entry.name}: seed={config.seed} threads={config.threads} out={config.out}")
    success = entry.handle(list(args or []), config)
    return EXIT_OK if success else EXIT_FAILURE


def parse_args(args: list[str]) -> int:
    """Dispatch ``args`` (without the program name) and return the exit status."""
    if len(args) == 0:
        display_cli_help()
        return EXIT_OK

    p = ParsedArgs(args)
    registry = get_registry()

    for i, arg in enumerate(args):
        if arg.startswith("-"):
            continue
        entry = registry.resolve(arg)
        if entry is None:
            break
        sub_args = args[:i] + args[i + 1:]
        bare = check_bare_args(sub_args, registry.names())
        if bare:
            corrected = " ".join(a if a.startswith("-") or "=" not in a else f"--{a}" for a in sub_args)
            print(f"\033[93mDid you mean?\033[0m hypsurf {arg} {corrected}")
            return EXIT_USAGE
        try:
            config = resolve_run_config(ParsedArgs(sub_args))
        except (ArgError, ConfigError) as e:
            print(f"Error: {e}")
            return EXIT_USAGE
        return run(entry.name, config, sub_args)

    if p.has_help():
        display_cli_help()
        return EXIT_OK

    for i, arg in enumerate(args):
        if arg.startswith("-"):
            continue
        print(f"Unknown command: '{arg}'")
        suggestion = suggest_command(arg, registry.names())
        if suggestion:
            rest = " ".join(args[i + 1:])
            hint = f"hypsurf {suggestion}" + (f" {rest}" if rest else "")
            print(f"\033[93mDid you mean?\033[0m {hint}")
        return EXIT_USAGE

    print("Error: no subcommand given.")
    display_cli_help()
    return EXIT_USAGE
