"""Library-wide defaults read from ``settings.toml``.

Geometric tolerances, census caps, cover budgets, Monte-Carlo chunking and
the run defaults all come through :class:`SettingsService`. Two environment
variables take precedence over the file: ``HYPSURF_LOG_LEVEL`` and
``HYPSURF_TOLERANCE`` (the latter is how the CLI ``--tolerance`` flag reaches
every predicate).

This module sits below ``logging_config`` and ``run_config`` in the import
graph, so it logs through stdlib ``logging`` only.
"""

import logging
import os
import sys
import tomllib
from collections.abc import Mapping
from functools import lru_cache, reduce
from pathlib import Path
from types import MappingProxyType

logger = logging.getLogger(__name__)

SETTINGS_PATH = Path(__file__).parent / "settings.toml"
LOG_LEVEL_ENV = "HYPSURF_LOG_LEVEL"
TOLERANCE_ENV = "HYPSURF_TOLERANCE"

_MISSING = object()


def _read(path: Path) -> MappingProxyType:
    try:
        with path.open("rb") as f:
            return MappingProxyType(tomllib.load(f))
    except (OSError, tomllib.TOMLDecodeError) as e:
        # logging is usually not configured this early
        sys.stderr.write(f"FATAL: cannot load settings from {path}: {e}\n")
        logger.error("cannot load settings from %s: %s", path, e)
        raise


@lru_cache(maxsize=1)
def _default_settings() -> MappingProxyType:
    return _read(SETTINGS_PATH)


def clear_cache() -> None:
    """Forget the parsed default file; the next :class:`SettingsService` rereads it."""
    _default_settings.cache_clear()


class SettingsService:
    """Typed, read-only access to ``settings.toml``.

    The default file is parsed once per process; an explicit
    ``settings_path`` is read fresh and never cached.
    """

    def __init__(self, settings_path: str | Path | None = None):
        self._view = _default_settings() if settings_path is None else _read(Path(settings_path))

    @property
    def settings_dict(self) -> MappingProxyType:
        """Top level of the parsed file as a read-only view."""
        return self._view

    def _require(self, *path: str) -> str | int | float | bool | list:
        """Value at ``path``; ``KeyError`` naming the dotted path if absent or null."""

        def step(node, key):
            return node.get(key, _MISSING) if isinstance(node, Mapping) else _MISSING

        value = reduce(step, path, self._view)
        if value is _MISSING or value is None:
            raise KeyError(f"settings.toml: [{'.'.join(path)}] is required but missing.")
        return value

    def _optional(self, section: str, key: str, default):
        return self._view.get(section, {}).get(key, default)

    def section(self, name: str) -> MappingProxyType:
        """A whole ``[name]`` table as a read-only view (empty if absent)."""
        return MappingProxyType(dict(self._view.get(name, {})))

    # ---- [app] ----

    @property
    def app_name(self) -> str:
        return self._require("app", "name")

    @property
    def log_level(self) -> str:
        """``HYPSURF_LOG_LEVEL`` if set, else ``app.log_level``."""
        return os.environ.get(LOG_LEVEL_ENV, self._require("app", "log_level")).upper()

    # ---- [numerics] ----

    @property
    def tolerance(self) -> float:
        """``HYPSURF_TOLERANCE`` if set (the CLI --tolerance flag), else ``numerics.tolerance``."""
        return float(os.environ.get(TOLERANCE_ENV, self._require("numerics", "tolerance")))

    # ---- [census] ----

    @property
    def length_tol(self) -> float:
        return float(self._require("census", "length_tol"))

    @property
    def axis_tol(self) -> float:
        return float(self._require("census", "axis_tol"))

    @property
    def max_elements(self) -> int:
        return int(self._require("census", "max_elements"))

    @property
    def bin_width(self) -> float:
        return float(self._require("census", "bin_width"))

    # ---- [topology] ----

    @property
    def powers_count_as_simple(self) -> bool:
        return bool(self._optional("topology", "powers_count_as_simple", False))

    # ---- [covers] ----

    @property
    def cover_max_degree(self) -> int:
        return int(self._require("covers", "max_degree"))

    @property
    def cover_max_attempts(self) -> int:
        return int(self._require("covers", "max_attempts"))

    # ---- [flowbox] ----

    @property
    def chart_radius(self) -> float:
        return float(self._require("flowbox", "chart_radius"))

    @property
    def net_eta_fraction(self) -> float:
        return float(self._require("flowbox", "net_eta_fraction"))

    @property
    def net_max_seed_rounds(self) -> int:
        return int(self._require("flowbox", "net_max_seed_rounds"))

    @property
    def net_coverage_samples(self) -> int:
        return int(self._require("flowbox", "net_coverage_samples"))

    # ---- [monte_carlo] ----

    @property
    def chunk_size(self) -> int:
        return int(self._require("monte_carlo", "chunk_size"))

    @property
    def default_trials(self) -> int:
        return int(self._require("monte_carlo", "default_trials"))

    # ---- [random_models] ----

    @property
    def allow_diagonal(self) -> bool:
        return bool(self._optional("random_models", "allow_diagonal", True))

    # ---- [run] ----

    @property
    def default_seed(self) -> int:
        return int(self._require("run", "seed"))

    @property
    def default_threads(self) -> int:
        return int(self._require("run", "threads"))

    @property
    def default_out(self) -> str:
        return str(self._require("run", "out"))

    # ---- [output] ----

    @property
    def schema_version(self) -> str:
        return str(self._require("output", "schema_version"))

    @property
    def float_digits(self) -> int:
        return int(self._require("output", "float_digits"))
