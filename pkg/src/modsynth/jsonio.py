"""Canonical JSON serialization shared by the CLI, service and exporters.

Every artifact the engine writes goes through :func:`canonical_dumps` so
repeated runs produce byte-identical files.
"""

from __future__ import annotations

import json


def canonical_dumps(obj) -> str:
    """Two-space indented JSON with a trailing newline; keys keep insertion order."""
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


def canonical_bytes(obj) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def compact_dumps(obj) -> str:
    """Single-line JSON used inside container formats (glTF chunks)."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


def load_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
