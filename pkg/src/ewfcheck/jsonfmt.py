"""Deterministic JSON rendering with 17 significant digits for floats.

The stdlib encoder always uses ``repr`` for floats; reports here must be
byte-stable and carry a fixed precision, so a tiny encoder is used instead.
"""
from __future__ import annotations

import json
import math

import numpy as np


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite number {x!r} cannot be serialized")
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def dumps(obj, indent: int | None = 2, sort_keys: bool = False) -> str:
    return "".join(_encode(obj, indent, sort_keys, 0)) + ("\n" if indent is not None else "")


def _encode(obj, indent, sort_keys, level):
    if isinstance(obj, (bool, np.bool_)):
        yield "true" if obj else "false"
    elif obj is None:
        yield "null"
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield format_float(obj)
    elif isinstance(obj, str):
        yield json.dumps(obj)
    elif isinstance(obj, np.ndarray):
        yield from _encode(obj.tolist(), indent, sort_keys, level)
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        items = sorted(obj.items()) if sort_keys else obj.items()
        nl, pad, inner = _layout(indent, level)
        parts = []
        for k, v in items:
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be strings, got {k!r}")
            parts.append(inner + json.dumps(k) + ": " + "".join(_encode(v, indent, sort_keys, level + 1)))
        yield "{" + nl + ("," + nl).join(parts) + nl + pad + "}"
    elif isinstance(obj, (list, tuple)):
        if not obj:
            yield "[]"
            return
        # flat numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            yield "[" + ", ".join("".join(_encode(v, indent, sort_keys, level)) for v in obj) + "]"
            return
        nl, pad, inner = _layout(indent, level)
        parts = [inner + "".join(_encode(v, indent, sort_keys, level + 1)) for v in obj]
        yield "[" + nl + ("," + nl).join(parts) + nl + pad + "]"
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _layout(indent, level):
    if indent is None:
        return "", "", ""
    return "\n", " " * (indent * level), " " * (indent * (level + 1))
