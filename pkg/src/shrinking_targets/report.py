"""CSV and JSON emission with deterministic bytes."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .surd import Root

KGS_COLUMNS = ("h", "sample_index", "N", "Psi", "ratio")


def number(v, bound=None) -> dict:
    """A numeric output with its error bound, or tagged exact."""
    if isinstance(v, Fraction):
        return {"value": float(v), "exact": _fraction_text(v)}
    if isinstance(v, Root):
        return {"value": float(v), "exact": f"({v.radicand})^(1/{v.index})"}
    out = {"value": float(v)}
    if bound is not None:
        out["error_bound"] = float(bound)
    return out


def _fraction_text(v: Fraction) -> str:
    # huge dyadic denominators are written as powers of two
    den = v.denominator
    if den.bit_length() > 256 and den & (den - 1) == 0:
        return f"{v.numerator}/2^{den.bit_length() - 1}" if v.numerator.bit_length() <= 1024 else \
            f"~{float(v)!r} (dyadic, 2^{den.bit_length() - 1})"
    if max(v.numerator.bit_length(), den.bit_length()) > 1024:
        return f"~{float(v)!r} (rational, {den.bit_length()}-bit denominator)"
    return str(v)


def jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return _fraction_text(obj)
    if isinstance(obj, Root):
        return f"({obj.radicand})^(1/{obj.index})"
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (Fraction, Root)):
        return repr(float(v))
    if isinstance(v, np.generic):
        return _cell(v.item())
    return v


def json_text(obj: Any) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit_report(out_dir, name: str, summary: dict, tables: dict[str, tuple] | None = None) -> list[Path]:
    """Write name.json and one CSV per table (suffix -> (columns, rows))."""
    out_dir = Path(out_dir)
    written = []
    for suffix, (columns, rows) in (tables or {}).items():
        p = out_dir / f"{name}{suffix}.csv"
        write_text(p, csv_text(columns, rows))
        written.append(p)
    p = out_dir / f"{name}.json"
    write_text(p, json_text(summary))
    written.append(p)
    return written
