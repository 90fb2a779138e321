"""Byte-stable JSON and CSV emitters.

Floats are written with 17 significant digits and always carry a decimal
point, so parsing a report and emitting it again reproduces the same bytes.
Non-finite floats become ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math

from .audit import ClaimVerdict, report_header
from .claims import Witness, get_claim

WITNESS_KEYS = ("a", "b", "p", "q", "omega", "nu")
CURVE_HEADER = ("param", "value", "log_value", "d1", "d2")


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    # adding 0.0 turns -0.0 into 0.0
    s = format(float(x) + 0.0, "#.17g")
    mant, _, exp = s.partition("e")
    if "." not in mant:
        mant += ".0"
    return mant + ("e" + exp if exp else "")


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(pad + json.dumps(str(k)) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(" " * (indent * level) + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(" " * (indent * level) + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out = []
    _emit(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)


def loads(text: str):
    return json.loads(text)


def _point_json(w: Witness | None):
    pt = {} if w is None else w.point
    return {k: (float(pt[k]) if k in pt else None) for k in WITNESS_KEYS}


def _witness_extra(w: Witness | None):
    if w is None:
        return None
    return {
        "point": {k: float(v) for k, v in w.point.items()},
        "lhs": w.lhs_value,
        "rhs": w.rhs_value,
        "margin": w.margin,
        "error_bound": w.error_bound,
        "precision": w.precision,
    }


def verdict_json(v: ClaimVerdict, statement: str | None = None, hypothesis: str | None = None) -> dict:
    w = v.witness
    out = {
        "id": v.id,
        "status": v.status,
        "witness": _point_json(w),
        "lhs": None if w is None else w.lhs_value,
        "rhs": None if w is None else w.rhs_value,
        "margin": None if w is None else w.margin,
        "error_bound": None if w is None else w.error_bound,
        "samples_evaluated": v.samples_evaluated,
        "depends_on_status": dict(v.depends_on_status),
        # fields beyond the base schema
        "precision": None if w is None else w.precision,
        "skipped": v.skipped,
        "worst": _witness_extra(v.worst),
    }
    if w is not None and any(k not in WITNESS_KEYS for k in w.point):
        out["point"] = {k: float(x) for k, x in w.point.items()}
    if statement is None:
        try:
            c = get_claim(v.id)
            statement, hypothesis = c.statement(), c.hypothesis.text
        except KeyError:
            pass
    if statement is not None:
        out["statement"] = statement
        out["hypothesis"] = hypothesis
    return out


def audit_report(verdicts, config) -> dict:
    head = report_header(config)
    return {
        "version": head["version"],
        "generator": head["generator"],
        "seed": head["seed"],
        "config": head["config"],
        "verdicts": [verdict_json(v) for v in verdicts],
        "fingerprint": head["fingerprint"],
    }


def curve_csv(rows) -> str:
    """``rows`` are (param, value, log_value, d1, d2) tuples."""
    lines = [",".join(CURVE_HEADER)]
    for r in rows:
        lines.append(",".join(fmt_float(x) for x in r))
    return "\n".join(lines) + "\n"


def parse_csv(text: str):
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    rows = [tuple(float("nan") if x == "null" else float(x) for x in r) for r in reader if r]
    return header, rows


def table_csv(header, rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(fmt_float(x) if isinstance(x, float) else str(x) for x in r))
    return "\n".join(lines) + "\n"
