"""Tests for RunConfig: defaults, config files, CLI overrides."""

import json

import pytest

from hypsurf.config.run_config import SECTION_DEFAULTS, RunConfig
from hypsurf.errors import ConfigError


class TestDefaults:
    def test_from_settings(self):
        cfg = RunConfig.from_settings()
        assert cfg.seed == 20240521
        assert cfg.threads == 1
        assert cfg.tolerance == 1e-9
        assert cfg.source is None
        assert cfg.get("surface", "genus") == 2
        assert cfg.get("mc", "transverse") == "shift"

    def test_defaults_are_not_shared(self):
        cfg = RunConfig.from_settings()
        assert cfg.get("census", "pgt_grid") is not SECTION_DEFAULTS["census"]["pgt_grid"]

    def test_unknown_parameter(self):
        with pytest.raises(ConfigError, match="no parameter"):
            RunConfig.from_settings().get("census", "nope")


class TestFromFile:
    def test_layers_over_defaults(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('[run]\nseed = 3\nthreads = 2\n\n[census]\nL = 5\n\n[mc]\nkind = "coupon"\n')
        cfg = RunConfig.from_file(path)
        assert (cfg.seed, cfg.threads) == (3, 2)
        assert cfg.get("census", "L") == 5.0
        assert isinstance(cfg.get("census", "L"), float)
        assert cfg.get("census", "classify") is True
        assert cfg.get("mc", "kind") == "coupon"
        assert cfg.source == str(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            RunConfig.from_file(tmp_path / "missing.toml")

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[census\nL = 1\n")
        with pytest.raises(ConfigError, match="malformed"):
            RunConfig.from_file(path)

    @pytest.mark.parametrize(
        "body, message",
        [
            ("[wormholes]\nsize = 1\n", "unknown section"),
            ("[census]\nwidth = 1\n", "unknown key"),
            ("[run]\ncolour = 1\n", "unknown key"),
            ('[census]\nL = "six"\n', "expected float"),
            ("[census]\nclassify = 1\n", "expected bool"),
            ("[surface]\ngenus = 2.5\n", "expected int"),
            ("seed = 4\n", "must be a"),
        ],
    )
    def test_rejected(self, tmp_path, body, message):
        path = tmp_path / "run.toml"
        path.write_text(body)
        with pytest.raises(ConfigError, match=message):
            RunConfig.from_file(path)


class TestOverrides:
    def test_flags_replace_values(self):
        cfg = RunConfig.from_settings().with_overrides(seed=9, threads=4, out="x", tolerance=1e-6)
        assert (cfg.seed, cfg.threads, cfg.out, cfg.tolerance) == (9, 4, "x", 1e-6)

    def test_none_keeps_values(self):
        cfg = RunConfig.from_settings()
        assert cfg.with_overrides() is cfg

    @pytest.mark.parametrize("kwargs", [{"threads": 0}, {"tolerance": 0.0}, {"tolerance": -1e-9}])
    def test_invalid_flags(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig.from_settings().with_overrides(**kwargs)

    def test_with_section(self):
        base = RunConfig.from_settings()
        cfg = base.with_section("bm", L=3, samples=10)
        assert cfg.get("bm", "L") == 3.0
        assert cfg.get("bm", "samples") == 10
        assert base.get("bm", "samples") == 10_000

    def test_with_section_rejects_unknown(self):
        with pytest.raises(ConfigError):
            RunConfig.from_settings().with_section("bm", depth=1)
        with pytest.raises(ConfigError):
            RunConfig.from_settings().with_section("wormholes", size=1)


class TestSerialization:
    def test_out_is_not_serialized(self):
        a = RunConfig.from_settings().with_overrides(out="a")
        b = RunConfig.from_settings().with_overrides(out="b")
        assert a.to_json() == b.to_json()
        assert "out" not in a.to_dict()

    def test_json_round_trips_params(self):
        cfg = RunConfig.from_settings().with_section("net", r=0.4)
        data = json.loads(cfg.to_json())
        assert data["params"]["net"]["r"] == 0.4
        assert data["seed"] == cfg.seed
        assert list(data["params"]) == sorted(SECTION_DEFAULTS)
