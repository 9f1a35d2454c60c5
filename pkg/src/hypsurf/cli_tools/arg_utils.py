"""Argument helpers for the ``hypsurf`` CLI.

Arguments are ``--key=value`` options, bare ``--flag`` switches and
positionals (the command name)::

    p = ParsedArgs(["census", "--L=6", "--seed=7", "--help"])
    p.get_float("L")       # 6.0
    p.has_help()           # True
"""

from __future__ import annotations

import difflib
import re
from typing import Any, Callable, TypeVar

T = TypeVar("T")

_BARE_KV_RE = re.compile(r"^([a-zA-Z][a-zA-Z0-9_-]*)=(.+)$")
_TRUE = ("true", "1", "yes")
_FALSE = ("false", "0", "no")


class ArgError(Exception):
    """Raised when an argument value fails validation."""


class ParsedArgs:
    """One pass over a raw argument list; the first ``--key=value`` for a key wins."""

    def __init__(self, args: list[str]) -> None:
        self.options: dict[str, str] = {}
        self.flags: set[str] = set()
        self._positionals: list[str] = []
        for arg in args:
            if arg.startswith("--") and "=" in arg:
                key, value = arg[2:].split("=", 1)
                self.options.setdefault(key, value)
            elif arg.startswith("-"):
                self.flags.add(arg.lstrip("-"))
            else:
                self._positionals.append(arg)

    def positionals(self) -> list[str]:
        return list(self._positionals)

    def _find_value(self, keys: tuple[str, ...]) -> str | None:
        return next((self.options[k] for k in keys if k in self.options), None)

    def _typed(self, keys: tuple[str, ...], cast: Callable[[str], T], what: str, default: T | None) -> T | None:
        val = self._find_value(keys)
        if val is None:
            return default
        try:
            return cast(val)
        except ValueError:
            raise ArgError(f"--{keys[0]} must be {what}, got '{val}'") from None

    def get_string(self, *keys: str, default: str | None = None) -> str | None:
        val = self._find_value(keys)
        return val if val is not None else default

    def get_int(self, *keys: str, default: int | None = None) -> int | None:
        return self._typed(keys, int, "an integer", default)

    def get_float(self, *keys: str, default: float | None = None) -> float | None:
        return self._typed(keys, float, "a number", default)

    def get_like(self, key: str, default: Any) -> Any:
        """Value of ``--key`` read as the type of ``default``; ``None`` if absent."""
        val = self._find_value((key,))
        return None if val is None else coerce_like(val, default)

    def has_flag(self, *names: str) -> bool:
        """True if any bare ``--name`` switch is present."""
        return any(name in self.flags for name in names)

    def has_help(self) -> bool:
        return self.has_flag("help", "h")

    def unknown_options(self, known: set[str]) -> list[str]:
        """Options and switches whose name is not in ``known``, as typed."""
        out = [f"--{k}={v}" for k, v in self.options.items() if k not in known]
        out += [f"--{f}" for f in sorted(self.flags) if f not in known and f not in ("help", "h")]
        return out


def coerce_like(raw: str, default: Any) -> Any:
    """Read ``raw`` as the type of a config default.

    Lists are comma-separated and take the element type of the default;
    booleans accept true/false, 1/0 and yes/no.
    """
    try:
        if isinstance(default, bool):
            if raw.lower() not in _TRUE + _FALSE:
                raise ValueError(raw)
            return raw.lower() in _TRUE
        if isinstance(default, list):
            kind = type(default[0]) if default else float
            return [kind(x.strip()) for x in raw.split(",") if x.strip()]
        if isinstance(default, (int, float)):
            return type(default)(raw)
    except ValueError:
        raise ArgError(f"cannot read '{raw}' as {type(default).__name__}") from None
    return raw


# ── suggestions ─────────────────────────────────────────────────


def suggest_command(token: str, known_names: set[str]) -> str | None:
    """Closest command name: underscore/hyphen swap first, then fuzzy match."""
    normalized = token.replace("_", "-")
    if normalized in known_names:
        return normalized if normalized != token else None
    matches = difflib.get_close_matches(token, sorted(known_names), n=1, cutoff=0.6)
    return matches[0] if matches else None


def check_bare_args(args: list[str], known_commands: set[str] | None = None) -> list[str]:
    """``--key=value`` suggestions for every ``key=value`` given without the dashes."""
    skip = known_commands or set()
    return [f"--{arg}" for arg in args if not arg.startswith("-") and arg not in skip and _BARE_KV_RE.match(arg)]
