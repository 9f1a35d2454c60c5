"""
Rich console output for report bundles.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Optional

import pandas as pd
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

if TYPE_CHECKING:
    from hypsurf.processing.reports import ReportBundle

console = Console()

MAX_ROWS = 20


def format_number(value) -> str:
    """Integers with separators, floats to 6 significant digits."""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return f"{value:,d}"
    if isinstance(value, float):
        if math.isnan(value):
            return "N/A"
        return f"{value:.6g}"
    return str(value)


def create_frame_table(name: str, df: pd.DataFrame, max_rows: int = MAX_ROWS) -> Table:
    table = Table(
        title=f"[bold cyan]{name}[/bold cyan]",
        box=box.ROUNDED,
        show_header=True,
        header_style="bold magenta",
        title_justify="left",
    )
    for col in df.columns:
        table.add_column(str(col), justify="left" if df[col].dtype == object else "right")
    for row in df.head(max_rows).itertuples(index=False):
        table.add_row(*(format_number(v.item() if hasattr(v, "item") else v) for v in row))
    if len(df) > max_rows:
        table.caption = f"{len(df) - max_rows} more rows in the CSV"
    return table


def display_bundle(bundle: ReportBundle, con: Optional[Console] = None) -> None:
    con = con or console
    for name, df in bundle.tables.items():
        con.print(create_frame_table(name, df))
    if bundle.summary:
        status = "[green]ok[/green]" if bundle.ok else f"[red]{len(bundle.violations)} violations[/red]"
        con.print(
            Panel(
                "\n".join(bundle.summary),
                title=f"[bold]{bundle.command}[/bold] {status}",
                border_style="green" if bundle.ok else "red",
            )
        )


def display_violations(bundle: ReportBundle, con: Optional[Console] = None) -> None:
    con = con or console
    for message in bundle.violations:
        con.print(f"[red]violated:[/red] {message}")
