"""Deterministic command reports as indented key/value text or JSON."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .tree import format_outcome, format_rational


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def plain(value: Any) -> Any:
    """Convert results to JSON-compatible values with exact rationals as strings."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, tuple) and value and all(isinstance(x, Fraction) for x in value):
        return format_outcome(value)
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [plain(v) for v in value]
        return sorted(items, key=str) if isinstance(value, (set, frozenset)) else items
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


@dataclass
class Report:
    command: list[str]
    input: str
    sha256: str
    results: dict = field(default_factory=dict)
    timing: float | None = None  # seconds; only emitted when requested

    def as_dict(self) -> dict:
        out = {"command": " ".join(self.command), "input": self.input, "sha256": self.sha256,
               "results": plain(self.results)}
        if self.timing is not None:
            out["timing_seconds"] = round(self.timing, 6)
        return out

    def render(self, fmt: str = "text") -> str:
        if fmt == "json":
            return json.dumps(self.as_dict(), indent=2) + "\n"
        return "\n".join(_text_lines(self.as_dict(), 0)) + "\n"


def _scalar(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{}"
    return str(v)


def _nested(v: Any) -> bool:
    """Needs its own indented block (a non-empty mapping, or a list holding containers)."""
    if isinstance(v, dict):
        return bool(v)
    return isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v)


def _text_lines(value: Any, depth: int) -> list[str]:
    pad = "  " * depth
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if _nested(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, depth + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    else:
        for v in value:
            if _nested(v):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(v, depth + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    return lines
