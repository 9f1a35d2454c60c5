from rich.console import Console

console = Console()
"""
CLI help text.
"""

COMMAND_EXAMPLES = {
    "gen-surface": [
        "hypsurf gen-surface --genus=3",
        "hypsurf gen-surface --cover_degree=2 --seed=7",
    ],
    "census": [
        "hypsurf census --L=6",
        "hypsurf census --L=10 --classify=false --pgt_grid=8,9,10",
    ],
    "closing-check": [
        "hypsurf closing-check --L=6,8 --eta=0.05",
        "hypsurf closing-check --L=8 --boxes=16 --box_eta=0.3",
    ],
    "mixing": ["hypsurf mixing --eta=0.3 --t_grid=0,2,4,8,12 --trials=10000000 --threads=8"],
    "net": ["hypsurf net --r=0.5 --census_L=10"],
    "cover": ["hypsurf cover --degrees=2,3 --count=20"],
    "bm": ["hypsurf bm --n_values=1,2,5 --samples=1000 --L=4"],
    "mc": ["hypsurf mc --kind=birthday --n=10000 --ell=300", "hypsurf mc --kind=coupon --coupon_n=10,100"],
}


def _build_command_list() -> str:
    """The command list, generated from the registry."""
    from hypsurf.cli_tools.command_registry import get_registry

    lines = []
    for entry in get_registry():
        aliases = f" ({', '.join(entry.aliases)})" if entry.aliases else ""
        lines.append(f"  {entry.name:<16s}{entry.description}{aliases}")
    lines.sort()
    return "\n".join(lines)


def display_cli_help():
    console.print("\nUsage: hypsurf <command> \\[options]\n")
    console.print(f"Commands:\n{_build_command_list()}")
    console.print("""
Global Options:
  --config=<path>    Run config TOML ([run], [surface], [census], [closing],
                     [mixing], [net], [cover], [bm], [mc] sections)
  --seed=<int>       Master seed; every random stream derives from it
  --out=<dir>        Output directory (tables go to <dir>/<command>/)
  --threads=<n>      Worker threads for Monte-Carlo and classification
  --tolerance=<f>    Geometric tolerance for the predicates
  --help             Show this help message

Any key of a command's config section can be given as --key=value
(lists comma-separated), e.g. census --L=8.

Exit status: 0 success, 1 failure or violated invariant, 2 usage error.

Use 'hypsurf <command> --help' for more information about a command.
""")


def display_command_help(name: str):
    from hypsurf.cli_tools.command_registry import get_registry
    from hypsurf.config.run_config import SECTION_DEFAULTS

    entry = get_registry().resolve(name)
    if entry is None:
        display_cli_help()
        return
    console.print(f"\n[bold cyan]{entry.name}[/bold cyan] - {entry.description}\n")
    console.print("[bold green]USAGE:[/bold green]")
    console.print(f"    hypsurf {entry.name} \\[options]\n")
    console.print("[bold green]OPTIONS:[/bold green]")
    for section in entry.sections:
        for key, default in SECTION_DEFAULTS[section].items():
            console.print(f"    --{key:<16s}\\[{section}] default {default!r}")
    examples = COMMAND_EXAMPLES.get(entry.name, [])
    if examples:
        console.print("\n[bold green]EXAMPLES:[/bold green]")
        for line in examples:
            console.print(f"    {line}")
    console.print()
