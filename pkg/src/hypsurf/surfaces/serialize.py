"""JSON documents for surfaces.

Floats are written with 17 significant digits, which round-trips binary64
exactly; loading rebuilds the stored matrices without renormalising them.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from hypsurf.config.settings_service import SettingsService
from hypsurf.core.hyp import Mat2
from hypsurf.errors import ConfigError
from hypsurf.surfaces.regular import FundamentalPolygon, SurfaceGroup
from hypsurf.surfaces.words import Word

DOCUMENT_KIND = "hypsurf.surface"


def _f(x: float) -> float:
    return float(format(x, ".17g"))


def _point(z: complex) -> list[float]:
    return [_f(z.real), _f(z.imag)]


def surface_to_dict(surface: SurfaceGroup) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "kind": DOCUMENT_KIND,
        "schema": SettingsService().schema_version,
        "genus": surface.genus,
        "name": surface.name,
        "generators": [[_f(m.a), _f(m.b), _f(m.c), _f(m.d)] for m in surface.generators],
        "relators": [w.encode() for w in surface.relators],
        "basepoint": _point(surface.basepoint),
        "domain": {
            "vertices": [_point(v) for v in surface.domain.vertices],
            "side_pairing": list(surface.domain.side_pairing),
            "side_letters": list(surface.domain.side_letters),
            "center": _point(surface.domain.center),
        },
    }
    if surface.is_cover:
        doc["cover"] = {
            "base": surface_to_dict(surface.base),
            "perms": [list(p) for p in surface.perms],
            "tiles": [w.encode() for w in surface.tiles],
            "generator_words": [w.encode() for w in surface.generator_words],
        }
    return doc


def surface_from_dict(doc: dict[str, Any]) -> SurfaceGroup:
    if doc.get("kind") != DOCUMENT_KIND:
        raise ConfigError(f"not a surface document (kind={doc.get('kind')!r})")
    try:
        dom = doc["domain"]
        polygon = FundamentalPolygon(
            vertices=tuple(complex(x, y) for x, y in dom["vertices"]),
            side_pairing=tuple(int(k) for k in dom["side_pairing"]),
            side_letters=tuple(int(k) for k in dom["side_letters"]),
            center=complex(*dom["center"]),
        )
        extra: dict[str, Any] = {}
        if "cover" in doc:
            cov = doc["cover"]
            extra = {
                "base": surface_from_dict(cov["base"]),
                "perms": tuple(tuple(int(s) for s in p) for p in cov["perms"]),
                "tiles": tuple(Word.decode(w) for w in cov["tiles"]),
                "generator_words": tuple(Word.decode(w) for w in cov["generator_words"]),
            }
        return SurfaceGroup(
            genus=int(doc["genus"]),
            generators=tuple(Mat2(*(float(x) for x in row)) for row in doc["generators"]),
            relators=tuple(Word.decode(w) for w in doc["relators"]),
            domain=polygon,
            basepoint=complex(*doc["basepoint"]),
            name=doc.get("name", ""),
            **extra,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed surface document: {e}") from e


def save_surface(surface: SurfaceGroup, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(surface_to_dict(surface), indent=2))
    return path


def load_surface(path: str | Path) -> SurfaceGroup:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"surface file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"surface file {path} is not valid JSON: {e}") from e
    return surface_from_dict(doc)
