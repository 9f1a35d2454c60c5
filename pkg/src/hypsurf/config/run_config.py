"""
Run Config - Bundles every parameter of one experiment run.

A run is fully determined by its RunConfig and seed. The config is built from
the library defaults in ``settings.toml``, then a user TOML file passed with
``--config=PATH``, then the CLI flags (each layer overriding the previous).
The resolved config is serialized into the header of every output table.
"""

from __future__ import annotations

import copy
import json
import tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType
from typing import Any, Optional

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.errors import ConfigError

logger = configure_logging(__name__)

# Known command sections and their defaults. A key absent here is rejected.
SECTION_DEFAULTS: dict[str, dict[str, Any]] = {
    "surface": {"genus": 2, "file": "", "cover_degree": 0},
    "census": {"L": 6.0, "classify": True, "bin_width": 0.5, "pgt_grid": [4.0, 5.0, 6.0]},
    "closing": {"L": [6.0], "eta": 0.05, "boxes": 4, "box_eta": 0.3},
    "mixing": {"eta": 0.3, "t_grid": [0.0, 1.0, 2.0, 4.0, 8.0, 12.0], "trials": 1_000_000, "points": 2},
    "net": {"r": 0.5, "census_L": 8.0},
    "cover": {"degrees": [2, 3], "count": 20, "search_len": 4.0},
    "bm": {"n_values": [1, 2, 5, 10, 20, 50], "samples": 10_000, "L": 4.0, "census_n": 4},
    "mc": {
        "kind": "both",
        "n": 10_000,
        "ell": 300,
        "alpha": 1.0,
        "transverse": "shift",
        "c_values": [0.5, 1.0, 2.0, 4.0],
        "coupon_n": [10, 100],
        "trials": 100_000,
    },
}
RUN_KEYS = ("seed", "threads", "out", "tolerance")


def _check_type(section: str, key: str, value: Any, default: Any) -> Any:
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, float):
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, list):
        ok = isinstance(value, list)
    else:
        ok = isinstance(value, type(default))
    if not ok:
        raise ConfigError(
            f"[{section}] {key} = {value!r}: expected {type(default).__name__}"
        )
    return value


@dataclass(frozen=True)
class RunConfig:
    """
    Resolved parameters of one run.

    ``params`` maps each command section name to a read-only view of its
    keys; use :meth:`get` for lookups.
    """
    seed: int
    threads: int
    out: str
    tolerance: float
    params: MappingProxyType = field(repr=False)
    source: Optional[str] = None  # config file path, if any

    @classmethod
    def from_settings(cls) -> RunConfig:
        """Defaults only: ``settings.toml [run]`` plus the section defaults above."""
        service = SettingsService()
        return cls(
            seed=service.default_seed,
            threads=service.default_threads,
            out=service.default_out,
            tolerance=service.tolerance,
            params=MappingProxyType(
                {name: MappingProxyType(copy.deepcopy(vals)) for name, vals in SECTION_DEFAULTS.items()}
            ),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        """
        Load a user run config on top of the defaults.

        Raises:
            ConfigError: unreadable file, malformed TOML, unknown section or
                key, or a value of the wrong type.
        """
        path = Path(path)
        try:
            with open(path, "rb") as f:
                raw = tomllib.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {path}") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"malformed config {path}: {e}") from e

        base = cls.from_settings()
        run_values = {}
        sections = {name: dict(vals) for name, vals in base.params.items()}

        for name, table in raw.items():
            if not isinstance(table, dict):
                raise ConfigError(f"{path}: top-level key {name!r} must be a [section]")
            if name == "run":
                for key, value in table.items():
                    if key not in RUN_KEYS:
                        raise ConfigError(f"[run] unknown key {key!r}. Known: {list(RUN_KEYS)}")
                    run_values[key] = _check_type("run", key, value, getattr(base, key))
                continue
            if name not in SECTION_DEFAULTS:
                raise ConfigError(f"unknown section [{name}]. Known: {['run', *SECTION_DEFAULTS]}")
            for key, value in table.items():
                if key not in SECTION_DEFAULTS[name]:
                    raise ConfigError(
                        f"[{name}] unknown key {key!r}. Known: {list(SECTION_DEFAULTS[name])}"
                    )
                sections[name][key] = _check_type(name, key, value, SECTION_DEFAULTS[name][key])

        config = replace(
            base,
            params=MappingProxyType({k: MappingProxyType(v) for k, v in sections.items()}),
            source=str(path),
            **run_values,
        )
        logger.info(f"Loaded RunConfig from {path} (seed={config.seed}, threads={config.threads})")
        return config

    def with_overrides(
        self,
        seed: Optional[int] = None,
        threads: Optional[int] = None,
        out: Optional[str] = None,
        tolerance: Optional[float] = None,
    ) -> RunConfig:
        """Apply CLI flags; ``None`` keeps the current value."""
        changes = {
            k: v
            for k, v in {"seed": seed, "threads": threads, "out": out, "tolerance": tolerance}.items()
            if v is not None
        }
        if "threads" in changes and changes["threads"] < 1:
            raise ConfigError(f"--threads must be >= 1, got {changes['threads']}")
        if "tolerance" in changes and not changes["tolerance"] > 0:
            raise ConfigError(f"--tolerance must be > 0, got {changes['tolerance']}")
        return replace(self, **changes) if changes else self

    def with_section(self, section: str, **values: Any) -> RunConfig:
        """Override keys of one command section, type-checked like file values."""
        if section not in SECTION_DEFAULTS:
            raise ConfigError(f"unknown section [{section}]. Known: {list(SECTION_DEFAULTS)}")
        updated = dict(self.params[section])
        for key, value in values.items():
            if key not in SECTION_DEFAULTS[section]:
                raise ConfigError(f"[{section}] unknown key {key!r}. Known: {list(SECTION_DEFAULTS[section])}")
            updated[key] = _check_type(section, key, value, SECTION_DEFAULTS[section][key])
        params = {name: vals for name, vals in self.params.items()}
        params[section] = MappingProxyType(updated)
        return replace(self, params=MappingProxyType(params))

    def get(self, section: str, key: str) -> Any:
        try:
            return self.params[section][key]
        except KeyError:
            raise ConfigError(f"no parameter [{section}] {key}") from None

    def to_dict(self) -> dict:
        """Plain-JSON form written into output headers. ``out`` is left out so
        that runs into different directories produce identical artifacts."""
        return {
            "seed": self.seed,
            "threads": self.threads,
            "tolerance": self.tolerance,
            "params": {name: dict(vals) for name, vals in sorted(self.params.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
