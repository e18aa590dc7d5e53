"""JSON report and CSV grid serialization.

Rationals are written as ``"p/q"`` strings, non-finite floats as the
strings ``"inf"``/``"-inf"`` or ``null`` for NaN, and keys are sorted so that
identical inputs give byte-identical files apart from ``generated_at``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from datetime import datetime, timezone
from fractions import Fraction

REPORT_SCHEMA = "wshift.report/1"
TIMESTAMP_FIELD = "generated_at"


def fmt_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, float):
        if math.isnan(obj):
            return None
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.repr}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    now = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return now.isoformat(timespec="seconds")


def build_report(command: str, inputs: dict, result: dict, passed: bool) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "command": command,
        "inputs": jsonable(inputs),
        "result": jsonable(result),
        "passed": bool(passed),
        TIMESTAMP_FIELD: _timestamp(),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def strip_timestamp(text: str) -> dict:
    data = json.loads(text)
    data.pop(TIMESTAMP_FIELD, None)
    return data


def grid_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if isinstance(v, float) and math.isnan(v) else repr(v) if isinstance(v, float) else v
                         for v in row])
    return buf.getvalue()
