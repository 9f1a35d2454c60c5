"""Tests for report tables, CSV/JSON output and console rendering."""

import io
import json
import math

import pandas as pd
import pytest
from rich.console import Console

from hypsurf.cli_tools.rich_display import create_frame_table, display_bundle, display_violations, format_number
from hypsurf.processing.reports import (
    ReportBundle,
    census_frame,
    frame_to_csv,
    pgt_frame,
    records_frame,
    topology_bins_frame,
)
from hypsurf.topology.classify import TopologyBin


@pytest.fixture
def bundle(run_config):
    b = ReportBundle("demo", run_config)
    b.add_table("values", pd.DataFrame({"k": [1, 2], "x": [0.1, math.inf], "flag": [True, False]}))
    b.note("two rows")
    return b


class TestFrames:
    def test_empty_records_keep_columns(self):
        df = records_frame([], TopologyBin)
        assert list(df.columns) == ["lo", "hi", "n", "n_simple", "n_filling"]
        assert len(df) == 0

    def test_census_frame(self, census_g2_short):
        df = census_frame(census_g2_short)
        assert list(df.columns) == ["class_id", "length", "trace", "primitive", "power", "root_id", "word"]
        assert len(df) == len(census_g2_short)
        assert df["word"].map(lambda w: isinstance(w, str)).all()

    def test_bin_fractions(self):
        bins = [TopologyBin(0.0, 0.5, 0, 0, 0), TopologyBin(3.0, 3.5, 4, 1, 2)]
        df = topology_bins_frame(bins)
        assert df["simple_fraction"].tolist() == [0.0, 0.25]
        assert df["filling_fraction"].tolist() == [0.0, 0.5]
        assert df["n_nonsimple"].tolist() == [0, 3]

    def test_pgt_log(self):
        df = pgt_frame([(3.0, 0.0), (6.0, math.e)])
        assert df["log_ratio"].tolist() == [-math.inf, pytest.approx(1.0)]


class TestCsv:
    def test_full_precision_floats(self):
        text = frame_to_csv(pd.DataFrame({"x": [0.1], "n": [3], "ok": [True]}), "# head", 17)
        assert text.splitlines() == ["# head", "x,n,ok", "0.10000000000000001,3,True"]

    def test_quoting(self):
        text = frame_to_csv(pd.DataFrame({"word": ["1,-2"]}), "# head", 17)
        assert text.splitlines()[2] == '"1,-2"'


# ── bundles ─────────────────────────────────────────────────────


class TestReportBundle:
    def test_violations(self, bundle):
        assert bundle.ok
        bundle.violation("something broke")
        assert not bundle.ok
        assert bundle.violations == ["something broke"]

    def test_header(self, bundle):
        head = bundle.header("values")
        assert head.startswith("# schema=hypsurf/1 command=demo table=values config=")
        assert json.loads(head.split("config=", 1)[1])["seed"] == 7

    def test_write(self, bundle, tmp_path):
        written = bundle.write(tmp_path)
        assert [p.name for p in written] == ["values.csv", "values.json"]
        csv_lines = written[0].read_text().splitlines()
        assert csv_lines[0] == bundle.header("values")
        assert csv_lines[1] == "k,x,flag"
        doc = json.loads(written[1].read_text())
        assert doc["columns"] == ["k", "x", "flag"]
        assert doc["rows"] == [[1, 0.1, True], [2, "inf", False]]
        assert doc["config"]["seed"] == 7

    def test_write_defaults_to_config_out(self, bundle, run_config):
        written = bundle.write()
        assert all(str(p).startswith(run_config.out) for p in written)

    def test_render(self, bundle):
        buf = io.StringIO()
        con = Console(file=buf, width=120)
        bundle.violation("bad")
        display_bundle(bundle, con)
        display_violations(bundle, con)
        out = buf.getvalue()
        assert "values" in out
        assert "two rows" in out
        assert "violated: bad" in out


class TestRichDisplay:
    @pytest.mark.parametrize(
        "value, text",
        [(True, "yes"), (12345, "12,345"), (math.nan, "N/A"), (1.0 / 3.0, "0.333333"), ("w", "w")],
    )
    def test_format_number(self, value, text):
        assert format_number(value) == text

    def test_row_cap(self):
        table = create_frame_table("t", pd.DataFrame({"n": range(30)}), max_rows=5)
        assert table.row_count == 5
        assert "25 more rows" in table.caption
