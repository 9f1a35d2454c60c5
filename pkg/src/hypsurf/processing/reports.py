"""
Tables and report bundles.

Each table is a pandas DataFrame written as CSV (a ``# schema=...`` header
line carrying the run config, then an RFC-4180 body with floats at 17
significant digits) and mirrored as JSON.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import pandas as pd
from rich.console import Console

from hypsurf.census.geodesics import CensusResult
from hypsurf.config.logging_config import configure_logging
from hypsurf.config.run_config import RunConfig
from hypsurf.config.settings_service import SettingsService
from hypsurf.topology.classify import ClassTopology, TopologyBin

logger = configure_logging(__name__)


def records_frame(rows: Sequence[Any], row_type: type) -> pd.DataFrame:
    """One column per dataclass field of ``row_type``; empty input keeps the columns."""
    columns = [f.name for f in dataclasses.fields(row_type)]
    return pd.DataFrame([[getattr(r, c) for c in columns] for r in rows], columns=columns)


def census_frame(census: CensusResult) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "class_id": [c.class_id for c in census.classes],
            "length": [c.length for c in census.classes],
            "trace": [c.trace for c in census.classes],
            "primitive": [c.primitive for c in census.classes],
            "power": [c.power for c in census.classes],
            "root_id": [c.root_id for c in census.classes],
            "word": [c.word.encode() for c in census.classes],
        },
        columns=["class_id", "length", "trace", "primitive", "power", "root_id", "word"],
    )


def topology_frame(records: Sequence[ClassTopology]) -> pd.DataFrame:
    return records_frame(records, ClassTopology)


def topology_bins_frame(bins: Sequence[TopologyBin]) -> pd.DataFrame:
    """N / N_simp / N_fill per bin with the fractions derived from those columns."""
    df = records_frame(bins, TopologyBin)
    df["n_nonsimple"] = df["n"] - df["n_simple"]
    df["simple_fraction"] = (df["n_simple"] / df["n"]).where(df["n"] > 0, 0.0)
    df["filling_fraction"] = (df["n_filling"] / df["n"]).where(df["n"] > 0, 0.0)
    return df


def pgt_frame(curve: Sequence[tuple[float, float]]) -> pd.DataFrame:
    df = pd.DataFrame(list(curve), columns=["L", "ratio"])
    df["log_ratio"] = [math.log(r) if r > 0 else -math.inf for r in df["ratio"]]
    return df


def _format_cell(value: Any, digits: int) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return format(value, f".{digits}g")
    return value


def frame_to_csv(df: pd.DataFrame, header: str, digits: int) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(df.columns)
    for row in df.itertuples(index=False):
        writer.writerow([_format_cell(v.item() if hasattr(v, "item") else v, digits) for v in row])
    return buf.getvalue()


def _json_value(value: Any) -> Any:
    value = value.item() if hasattr(value, "item") else value
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


@dataclass
class ReportBundle:
    """
    The tables and summary lines of one command run.

    ``summary`` lines are for people; every number in them is recomputed
    from a table of the bundle.
    """
    command: str
    config: RunConfig
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    summary: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    def add_table(self, name: str, df: pd.DataFrame) -> None:
        self.tables[name] = df

    def note(self, line: str) -> None:
        self.summary.append(line)

    def violation(self, message: str) -> None:
        logger.error(f"{self.command}: invariant violated: {message}")
        self.violations.append(message)

    @property
    def ok(self) -> bool:
        return not self.violations

    def header(self, table: str) -> str:
        schema = SettingsService().schema_version
        return f"# schema={schema} command={self.command} table={table} config={self.config.to_json()}"

    def write(self, out_dir: str | Path | None = None) -> list[Path]:
        """Write ``<out>/<command>/<table>.csv`` and ``.json`` for every table."""
        digits = SettingsService().float_digits
        target = Path(out_dir if out_dir is not None else self.config.out) / self.command
        target.mkdir(parents=True, exist_ok=True)
        written = []
        for name, df in self.tables.items():
            csv_path = target / f"{name}.csv"
            csv_path.write_text(frame_to_csv(df, self.header(name), digits))
            doc = {
                "schema": SettingsService().schema_version,
                "command": self.command,
                "table": name,
                "config": self.config.to_dict(),
                "columns": list(df.columns),
                "rows": [[_json_value(v) for v in row] for row in df.itertuples(index=False)],
            }
            json_path = target / f"{name}.json"
            json_path.write_text(json.dumps(doc, indent=1))
            written.extend([csv_path, json_path])
        logger.info(f"{self.command}: wrote {len(self.tables)} tables to {target}")
        return written

    def render(self, console: Console | None = None) -> None:
        from hypsurf.cli_tools.rich_display import display_bundle

        display_bundle(self, console)
