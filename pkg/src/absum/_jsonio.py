"""Deterministic JSON emission for configs and reports.

Floating-point values are written with 17 significant digits so 64-bit
binary floats round-trip bit-faithfully.  Dict keys are emitted sorted;
non-finite floats become the strings "inf", "-inf", "nan" (JSON has no
tokens for them).
"""

from __future__ import annotations

import json

import numpy as np


def _fmt_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    return format(x, ".17g")


def _emit(obj, lines: list[str], indent: int, level: int):
    pad = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            lines.append("{}")
            return
        lines.append("{")
        keys = sorted(obj.keys())
        for i, key in enumerate(keys):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            lines.append("\n" + pad + " " * indent + json.dumps(key) + ": ")
            _emit(obj[key], lines, indent, level + 1)
            if i < len(keys) - 1:
                lines.append(",")
        lines.append("\n" + pad + "}")
    elif isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            lines.append("[]")
            return
        lines.append("[")
        for i, item in enumerate(seq):
            lines.append("\n" + pad + " " * indent)
            _emit(item, lines, indent, level + 1)
            if i < len(seq) - 1:
                lines.append(",")
        lines.append("\n" + pad + "]")
    elif isinstance(obj, (bool, np.bool_)) or obj is None:
        lines.append(json.dumps(bool(obj) if obj is not None else None))
    elif isinstance(obj, (int, np.integer)):
        lines.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        lines.append(_fmt_float(float(obj)))
    elif isinstance(obj, str):
        lines.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), lines, indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def dumps(obj, indent: int = 2) -> str:
    lines: list[str] = []
    _emit(obj, lines, indent, 0)
    return "".join(lines) + "\n"


def dump(obj, path, indent: int = 2) -> None:
    text = dumps(obj, indent=indent)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
