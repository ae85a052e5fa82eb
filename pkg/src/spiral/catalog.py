"""Debris catalogs and scenario configuration files (JSON, schema-checked)."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources

import jsonschema

from .deorbit import Debris
from .elements import EARTH

CATALOG_SCHEMA_VERSION = 1

_ENTRY_SCHEMA = {
    "type": "object",
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "mass": {"type": "number", "exclusiveMinimum": 0},
        "a": {"type": "number"},
        "e": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "i": {"type": "number"},
        "raan": {"type": "number"},
    },
    "required": ["id", "mass", "a", "e", "i", "raan"],
    "additionalProperties": False,
}

_SCENARIO_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": 1},
        "spacecraft": {
            "type": "object",
            "properties": {
                "f_tot": {"type": "number", "exclusiveMinimum": 0},
                "isp": {"type": "number", "exclusiveMinimum": 0},
                "m_dry": {"type": "number", "exclusiveMinimum": 0},
                "m_launch": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "constants": {
            "type": "object",
            "properties": {
                k: {"type": "number", "exclusiveMinimum": 0}
                for k in ("mu", "earth_radius", "rp_threshold", "g0")
            },
            "additionalProperties": False,
        },
        "departure": {
            "type": "object",
            "properties": {
                "a": {"type": "number", "exclusiveMinimum": 0},
                "e": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "coplanar_with_first": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "optimizer": {
            "type": "object",
            "properties": {
                "budget": {"type": "integer", "minimum": 2},
                "population": {"type": "integer", "minimum": 2},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
        "bounds": {
            "type": "object",
            "properties": {
                "t_rv_days": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                "t_do_max_days": {"type": "number", "exclusiveMinimum": 0},
                "t_do_min_days": {"type": "object", "additionalProperties": {"type": "number"}},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


class CatalogError(ValueError):
    """Schema violation; ``index`` and ``field`` locate the offending value."""

    def __init__(self, message, index=None, field=None):
        super().__init__(message)
        self.index = index
        self.field = field


@dataclass(frozen=True)
class DebrisCatalogEntry:
    id: str
    mass: float  # kg
    a: float  # km
    e: float
    i: float  # deg
    raan: float  # deg

    def to_debris(self) -> Debris:
        return Debris(self.mass, self.a, self.id, math.radians(self.i), math.radians(self.raan))


def parse_catalog(doc, earth_radius: float = EARTH.earth_radius) -> list[DebrisCatalogEntry]:
    entries = doc.get("entries") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise CatalogError("catalog must be a JSON array of entries")
    if not entries:
        raise CatalogError("catalog must contain ≥ 1 entry")
    out = []
    seen = set()
    validator = jsonschema.Draft202012Validator(_ENTRY_SCHEMA)
    for k, raw in enumerate(entries):
        for err in validator.iter_errors(raw):
            field = err.path[0] if err.path else None
            if field is None and err.validator == "required":
                field = err.message.split("'")[1]
            raise CatalogError(f"entry {k}: field '{field}': {err.message}", k, field)
        entry = DebrisCatalogEntry(**raw)
        if not entry.a > earth_radius:
            raise CatalogError(f"entry {k}: field 'a': must exceed the Earth radius {earth_radius} km", k, "a")
        if entry.id in seen:
            raise CatalogError(f"entry {k}: field 'id': duplicate id {entry.id!r}", k, "id")
        seen.add(entry.id)
        out.append(entry)
    return out


def load_catalog(path) -> list[DebrisCatalogEntry]:
    """Validated catalog entries in file order."""
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise CatalogError(f"not valid JSON: {exc}") from exc
    return parse_catalog(doc)


def bundled_catalog_path():
    return resources.files("spiral") / "data" / "table3_catalog.json"


def paper_catalog() -> list[DebrisCatalogEntry]:
    with resources.as_file(bundled_catalog_path()) as p:
        return load_catalog(p)


def catalog_to_json(entries) -> dict:
    return {
        "schema_version": CATALOG_SCHEMA_VERSION,
        "kind": "debris_catalog",
        "entries": [asdict(e) for e in entries],
    }


def validate_scenario(doc: dict) -> dict:
    """Raise ``CatalogError`` on unknown keys or bad values."""
    errors = sorted(jsonschema.Draft202012Validator(_SCENARIO_SCHEMA).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.path) or "<root>"
        raise CatalogError(f"scenario {where}: {err.message}", field=where)
    return doc
