"""Canonical JSON serialization.

All JSON the package writes goes through :func:`canonical_json` so that
equal objects serialize to identical bytes (sorted keys, fixed separators,
no NaN/Infinity) and reports round-trip byte-identically.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

__all__ = ["canonical_json", "load_json", "dump_json"]


def canonical_json(obj: Any) -> str:
    """Serialize deterministically; rejects NaN/Infinity outright."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def load_json(path: str | Path) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj: Any, path: str | Path) -> None:
    Path(path).write_text(canonical_json(obj), encoding="utf-8")
