"""JSON config ingestion; every object is closed, so unknown keys are errors."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigParse, NRThreatError


def load_json(path: str | Path | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParse(f"cannot read config {p}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text, parse_constant=_parse_constant)
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"{p}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigParse(f"{p}: top level must be a JSON object")
    return doc


def _parse_constant(name: str) -> float:
    # accept Infinity / -Infinity for unbounded decay and disabled jammers
    if name in ("Infinity", "-Infinity"):
        return math.inf if name == "Infinity" else -math.inf
    raise ConfigParse(f"unsupported JSON constant {name}")


def check_keys(section: str, doc: Mapping[str, Any], allowed) -> None:
    if not isinstance(doc, Mapping):
        raise ConfigParse(f"{section}: expected an object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ConfigParse(f"{section}: unknown key(s) {', '.join(unknown)}")


def build(cls, section: str, doc: Mapping[str, Any] | None, **converters):
    """Instantiate dataclass ``cls`` from ``doc``, rejecting unknown keys."""
    doc = dict(doc or {})
    names = [f.name for f in dataclasses.fields(cls)]
    check_keys(section, doc, names)
    for key, conv in converters.items():
        if key in doc:
            doc[key] = conv(doc[key])
    try:
        return cls(**doc)
    except NRThreatError as exc:
        raise ConfigParse(f"{section}: {exc}") from exc
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigParse(f"{section}: {exc}") from exc


def positive_int(section: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigParse(f"{section}: expected a positive integer, got {value!r}")
    return value


def number_list(section: str, value: Any) -> list[float]:
    if not isinstance(value, list) or not value or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigParse(f"{section}: expected a non-empty list of numbers")
    return [float(v) for v in value]


def digest(doc: Any) -> str:
    canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
