"""Access to the stored reference values and their display anchors."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path


class GoldenError(KeyError):
    pass


_OVERRIDE: list = []


def use_file(path: str | Path | None) -> None:
    """Read reference values from ``path`` instead of the packaged file."""
    _OVERRIDE[:] = [Path(path)] if path else []
    _load.cache_clear()


@lru_cache(maxsize=None)
def _load() -> dict:
    if _OVERRIDE:
        text = _OVERRIDE[0].read_text(encoding="utf-8")
    else:
        text = resources.files("crcartan").joinpath("data/goldens.json").read_text(encoding="utf-8")
    doc = json.loads(text)
    return {e["id"]: e for e in doc["entries"]}


def entry(key: str) -> dict:
    try:
        return _load()[key]
    except KeyError:
        raise GoldenError(f"no reference value {key!r}") from None


def value(key: str, restored: bool = False):
    e = entry(key)
    return e["restored"] if restored and "restored" in e else e["value"]


def anchor(key: str) -> str:
    return entry(key)["display"]


def keys() -> list:
    return list(_load())
