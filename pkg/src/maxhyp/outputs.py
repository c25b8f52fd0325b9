"""Deterministic CSV and JSON emission.

Floats are written with ``repr`` (shortest round-trip decimal), CSV files use
LF line endings, and JSON keys are sorted, so identical runs produce identical
bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def write_csv(path, header, rows) -> bytes:
    data = csv_bytes(header, rows)
    Path(path).write_bytes(data)
    return data


def read_csv(path):
    """``(header, float array)``; the inverse of :func:`write_csv` for numeric tables."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return header, np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def content_hash(files: dict, payload) -> str:
    """sha256 over ``name NUL bytes`` of every file (sorted by name) and the payload JSON."""
    h = hashlib.sha256()
    for name in sorted(files):
        h.update(name.encode("utf-8") + b"\0" + files[name] + b"\0")
    h.update(canonical_json(payload).encode("utf-8"))
    return h.hexdigest()


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(canonical_json(manifest), encoding="utf-8", newline="\n")
