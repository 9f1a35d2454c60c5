"""Unit tests for ParsedArgs and the suggestion helpers."""

import pytest

from hypsurf.cli_tools.arg_utils import ArgError, ParsedArgs, check_bare_args, coerce_like, suggest_command


# ── get_string ──────────────────────────────────────────────────


class TestGetString:
    def test_basic(self):
        p = ParsedArgs(["--config=runs/g2.toml"])
        assert p.get_string("config") == "runs/g2.toml"

    def test_missing_returns_default(self):
        p = ParsedArgs(["--other=x"])
        assert p.get_string("out") is None
        assert p.get_string("out", default="results") == "results"

    def test_multi_key_alias(self):
        p = ParsedArgs(["--t_grid=0,1,2"])
        assert p.get_string("t-grid", "t_grid") == "0,1,2"

    def test_first_match_wins(self):
        p = ParsedArgs(["--out=first", "--out=second"])
        assert p.get_string("out") == "first"

    def test_value_with_equals(self):
        p = ParsedArgs(["--file=a=b.json"])
        assert p.get_string("file") == "a=b.json"


# ── numbers ─────────────────────────────────────────────────────


class TestGetInt:
    def test_basic(self):
        assert ParsedArgs(["--seed=42"]).get_int("seed") == 42

    def test_missing_returns_default(self):
        p = ParsedArgs([])
        assert p.get_int("seed") is None
        assert p.get_int("seed", default=0) == 0

    def test_invalid_raises(self):
        with pytest.raises(ArgError, match="must be an integer"):
            ParsedArgs(["--threads=four"]).get_int("threads")

    def test_negative(self):
        assert ParsedArgs(["--seed=-5"]).get_int("seed") == -5


class TestGetFloat:
    def test_basic(self):
        assert ParsedArgs(["--tolerance=1e-6"]).get_float("tolerance") == 1e-6

    def test_integer_string(self):
        assert ParsedArgs(["--L=6"]).get_float("L") == 6.0

    def test_invalid_raises(self):
        with pytest.raises(ArgError, match="must be a number"):
            ParsedArgs(["--eta=wide"]).get_float("eta")


class TestGetLike:
    def test_list_of_floats(self):
        assert ParsedArgs(["--t_grid=0, 2,4"]).get_like("t_grid", [0.0, 1.0]) == [0.0, 2.0, 4.0]

    def test_list_keeps_element_type(self):
        assert ParsedArgs(["--coupon_n=5,10"]).get_like("coupon_n", [10, 100]) == [5, 10]

    def test_absent(self):
        assert ParsedArgs([]).get_like("L", 6.0) is None

    @pytest.mark.parametrize(("raw", "expected"), [("yes", True), ("0", False), ("TRUE", True)])
    def test_bool(self, raw, expected):
        assert coerce_like(raw, False) is expected

    def test_bad_bool(self):
        with pytest.raises(ArgError, match="as bool"):
            coerce_like("maybe", True)

    def test_int_rejects_float_text(self):
        with pytest.raises(ArgError, match="as int"):
            coerce_like("2.5", 3)

    def test_string_passthrough(self):
        assert coerce_like("coupon", "both") == "coupon"


# ── flags and positionals ───────────────────────────────────────


class TestFlags:
    def test_valued_arg_not_matched_as_flag(self):
        assert ParsedArgs(["--classify=true"]).has_flag("classify") is False
        assert ParsedArgs(["--classify"]).has_flag("classify") is True

    def test_help(self):
        assert ParsedArgs(["-h"]).has_help()
        assert ParsedArgs(["--help"]).has_help()
        assert not ParsedArgs(["--seed=1"]).has_help()

    def test_positionals(self):
        assert ParsedArgs(["census", "--L=4", "extra"]).positionals() == ["census", "extra"]

    def test_unknown_options(self):
        p = ParsedArgs(["--L=4", "--seed=1", "--colour=red", "--verbose"])
        assert p.unknown_options({"L", "seed"}) == ["--colour=red", "--verbose"]

    def test_short_help_is_not_unknown(self):
        assert ParsedArgs(["-h", "--L=4"]).unknown_options({"L"}) == []


# ── suggestions ─────────────────────────────────────────────────


class TestSuggestions:
    NAMES = {"census", "closing-check", "gen-surface", "mixing", "net", "mc", "bm", "cover"}

    def test_underscore_to_hyphen(self):
        assert suggest_command("gen_surface", self.NAMES) == "gen-surface"

    def test_typo(self):
        assert suggest_command("cenus", self.NAMES) == "census"

    def test_nothing_close(self):
        assert suggest_command("triangulate", self.NAMES) is None

    def test_bare_key_value(self):
        assert check_bare_args(["L=4", "--seed=1", "census"], {"census"}) == ["--L=4"]

    def test_no_bare_args(self):
        assert check_bare_args(["--L=4", "census"], {"census"}) == []
