"""Enumeration caps. Each can be overridden through the environment."""

from __future__ import annotations

import os

from .errors import CapacityError

DEFAULT_CAP = 10**6
TDI_CAP = 10**5
SPE_EXPANSION_CAP = 10**4


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def enumeration_cap() -> int:
    return _env_int("EXTGAMES_CAP", DEFAULT_CAP)


def tdi_cap() -> int:
    return _env_int("EXTGAMES_TDI_CAP", TDI_CAP)


def spe_expansion_cap() -> int:
    return _env_int("EXTGAMES_SPE_CAP", SPE_EXPANSION_CAP)


def check(what: str, count: int, cap: int | None = None) -> None:
    limit = enumeration_cap() if cap is None else cap
    if count > limit:
        raise CapacityError(what, count, limit)
