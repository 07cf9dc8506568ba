"""Deterministic JSON and CSV serialization of reports.

Floats are written with 17 significant digits so that reloading gives the
same bits. Non-finite values use the ``Infinity``/``NaN`` tokens that
Python's :mod:`json` reads back.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import fields, is_dataclass

import numpy as np

from .classifier import ClassificationExperiment
from .randomized import MonteCarloReport

MC_HEADER = ["index", "seed", "gamma0", "dist_ac_d0", "drc_holds"]
SRC_HEADER = ["query_id", "true_group", "method", "predicted", "single_group"]


def to_plain(obj):
    """Convert reports (dataclasses, arrays, numpy scalars) to JSON-ready values."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj) if f.repr}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def _write_json(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        out.write(json.dumps(obj))
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format_float(obj))
    elif isinstance(obj, str):
        out.write(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.write(f"{pad}{json.dumps(k)}: ")
            _write_json(v, out, indent, level + 1)
            out.write(",\n" if i < len(obj) - 1 else "\n")
        out.write(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
        elif all(not isinstance(v, (dict, list)) for v in obj):
            out.write("[")
            for i, v in enumerate(obj):
                if i:
                    out.write(", ")
                _write_json(v, out, indent, level + 1)
            out.write("]")
        else:
            out.write("[\n")
            for i, v in enumerate(obj):
                out.write(pad)
                _write_json(v, out, indent, level + 1)
                out.write(",\n" if i < len(obj) - 1 else "\n")
            out.write(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(report, indent: int = 2) -> str:
    buf = io.StringIO()
    _write_json(to_plain(report), buf, indent, 0)
    buf.write("\n")
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if v is None:
        return ""
    return str(to_plain(v))


def csv_table(report) -> tuple[list[str], list[list]]:
    """Header and rows for reports that have a tabular form."""
    if isinstance(report, MonteCarloReport):
        rows = [[r.index, r.seed, r.gamma0, r.dist_ac_d0, r.drc_holds] for r in report.per_trial]
        return MC_HEADER, rows
    if isinstance(report, ClassificationExperiment):
        rows = [[r.query_id, r.true_group, r.method, r.predicted, r.single_group]
                for r in report.records]
        return SRC_HEADER, rows
    if isinstance(report, dict) and "header" in report and "rows" in report:
        return report["header"], report["rows"]
    raise TypeError(f"{type(report).__name__} has no CSV form")


def dumps_csv(report) -> str:
    header, rows = csv_table(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def emit_report(report, fmt: str = "json", path=None) -> str:
    """Serialize ``report`` and write it to ``path`` (stdout when ``None``)."""
    if fmt == "json":
        text = dumps_json(report)
    elif fmt == "csv":
        text = dumps_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def load_json_report(path):
    with open(path) as fh:
        return json.load(fh)


def load_csv_report(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
