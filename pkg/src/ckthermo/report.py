"""Structured command output with byte-deterministic serialization.

Every real is written with 17 significant digits, so JSON output parses back
to exactly the same numbers.  Wall-clock timing is only included on request,
since it would break byte-for-byte reproducibility.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReportDocument:
    command: dict
    config_hash: str
    payload: dict
    invariants: list = field(default_factory=list)
    timing: dict = None
    csv_rows: list = None  # optional tabular view used by the csv format

    def to_dict(self):
        doc = {
            "command": self.command,
            "config_hash": self.config_hash,
            "payload": self.payload,
            "invariants": self.invariants,
        }
        if self.timing is not None:
            doc["timing"] = self.timing
        return plain(doc)

    @property
    def ok(self):
        return all(item.get("passed", True) for item in self.invariants)


def plain(obj):
    """Convert numpy scalars/arrays, tuples and complex numbers to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def fmt_float(x):
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = f"{x:.17g}"
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s


def _dump(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _dump(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    return json.dumps(obj)


def to_json(doc, indent=2):
    data = doc.to_dict() if isinstance(doc, ReportDocument) else plain(doc)
    return _dump(data, indent, 0) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _scalar(v):
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    return str(v)


def to_csv(doc):
    if doc.csv_rows is not None:
        header, *rows = doc.csv_rows
        lines = [",".join(header)] + [",".join(_scalar(plain(v)) for v in row) for row in rows]
        return "\n".join(lines) + "\n"
    lines = ["key,value"]
    for key, value in _flatten(doc.to_dict()):
        text = _scalar(value)
        if "," in text or '"' in text:
            text = '"' + text.replace('"', '""') + '"'
        lines.append(f"{key},{text}")
    return "\n".join(lines) + "\n"


def to_text(doc):
    return "".join(f"{key}: {_scalar(value)}\n" for key, value in _flatten(doc.to_dict()))


FORMATS = {"json": to_json, "csv": to_csv, "text": to_text}


def emit_report(doc, fmt="json", path=None, stream=None):
    """Write ``doc`` in ``fmt`` to ``path`` (or ``stream``, default stdout)."""
    text = FORMATS[fmt](doc)
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        import sys

        (stream or sys.stdout).write(text)
    return text
