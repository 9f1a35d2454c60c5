"""The eight ``hypsurf`` subcommands and their dispatch.

Every command is a runner ``RunConfig -> ReportBundle`` from
``hypsurf.processing.runs`` bound to its config section. ``CommandEntry.handle``
applies the ``--key=value`` section overrides, runs, writes the tables and
renders them; it returns ``True`` on success and ``False`` on a failure or a
violated invariant. Nothing here calls ``sys.exit()``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from typing import TYPE_CHECKING, Callable, Iterator

if TYPE_CHECKING:
    from hypsurf.cli_tools.arg_utils import ParsedArgs
    from hypsurf.config.run_config import RunConfig
    from hypsurf.processing.reports import ReportBundle

Runner = Callable[["RunConfig"], "ReportBundle"]

GLOBAL_OPTIONS = frozenset({"help", "config", "seed", "out", "threads", "tolerance"})


@dataclass(frozen=True)
class CommandEntry:
    """A subcommand: its config section, runner and alternative names."""

    name: str
    section: str
    runner: Runner
    aliases: tuple[str, ...] = ()
    description: str = ""

    @property
    def all_names(self) -> set[str]:
        return {self.name, *self.aliases}

    @property
    def sections(self) -> list[str]:
        """Config sections whose keys this command accepts; all but gen-surface also take [surface]."""
        return [self.section] if self.section == "surface" else [self.section, "surface"]

    def handle(self, args: list[str], config: RunConfig) -> bool:
        from hypsurf.cli_tools.arg_utils import ArgError, ParsedArgs
        from hypsurf.cli_tools.cli_help import display_command_help
        from hypsurf.cli_tools.rich_display import display_bundle, display_violations
        from hypsurf.errors import HypSurfError

        p = ParsedArgs(args)
        if p.has_help():
            display_command_help(self.name)
            return True
        try:
            config = apply_section_args(config, p, self.sections)
            bundle = self.runner(config)
            bundle.write()
        except ArgError as e:
            print(f"Error: {e}")
            print(f"Use 'hypsurf {self.name} --help' for usage information.")
            return False
        except (HypSurfError, ValueError) as e:
            print(f"Error: {type(e).__name__}: {e}")
            return False
        display_bundle(bundle)
        if not bundle.ok:
            display_violations(bundle)
        return bundle.ok


class CommandRegistry:
    """Commands in registration order, indexed by name and alias."""

    def __init__(self) -> None:
        self._index: dict[str, CommandEntry] = {}
        self._order: list[CommandEntry] = []

    def add(self, entry: CommandEntry) -> None:
        clash = entry.all_names & self._index.keys()
        if clash:
            raise ValueError(f"command name(s) already registered: {sorted(clash)}")
        self._order.append(entry)
        self._index.update(dict.fromkeys(entry.all_names, entry))

    def resolve(self, token: str) -> CommandEntry | None:
        return self._index.get(token)

    def names(self) -> set[str]:
        return set(self._index)

    def __iter__(self) -> Iterator[CommandEntry]:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._order)


# ── section options ─────────────────────────────────────────────


def apply_section_args(config: RunConfig, p: ParsedArgs, sections: list[str]) -> RunConfig:
    """``--key=value`` options naming keys of ``sections`` override the config."""
    from hypsurf.cli_tools.arg_utils import ArgError
    from hypsurf.config.run_config import SECTION_DEFAULTS

    known = set(GLOBAL_OPTIONS).union(*(SECTION_DEFAULTS[s] for s in sections))
    unknown = p.unknown_options(known)
    if unknown:
        raise ArgError(f"unknown option(s) {', '.join(unknown)}")
    for section in sections:
        values = {}
        for key, default in SECTION_DEFAULTS[section].items():
            value = p.get_like(key, default)
            if value is not None:
                values[key] = value
        if values:
            config = config.with_section(section, **values)
    return config


@cache
def get_registry() -> CommandRegistry:
    """The process-wide registry; runner modules are imported on first use."""
    from hypsurf.processing import runs

    reg = CommandRegistry()
    for entry in (
        CommandEntry("gen-surface", "surface", runs.run_gen_surface, ("surface",), "Build, check and save a surface"),
        CommandEntry("census", "census", runs.run_census, (), "Closed geodesic census with N / N_simp / N_fill bins"),
        CommandEntry(
            "closing-check", "closing", runs.run_closing_check, ("closing",), "Closing census against the word census"
        ),
        CommandEntry("mixing", "mixing", runs.run_mixing, (), "Monte-Carlo mixing curves for two flow boxes"),
        CommandEntry("net", "net", runs.run_net, (), "Delaunay net and its filling-filter soundness"),
        CommandEntry("cover", "cover", runs.run_cover, ("covers",), "Random finite covers: genus and systole checks"),
        CommandEntry("bm", "bm", runs.run_bm, ("ribbon",), "Random ribbon graphs and their L/R geodesics"),
        CommandEntry("mc", "mc", runs.run_mc, (), "Birthday and coupon-collector Monte-Carlo sweeps"),
    ):
        reg.add(entry)
    return reg
