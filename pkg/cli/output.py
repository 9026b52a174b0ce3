"""
cli/output.py

Rendering helpers for the command line: CSV files and text/JSON reports.
Floats are written with repr(), the shortest string that round-trips.
"""

import csv
import io
import json
from pathlib import Path

SWEEP_HEADER = ("param", "phase", "abs_error", "classification")
FIELDS_HEADER = ("x", "y", "z", "Ex", "Ey", "Ez", "Bx", "By", "Bz", "Tx", "Ty", "Tz")


def fmt(value):
    if isinstance(value, str):
        return value
    return repr(float(value))


def csv_text(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buffer.getvalue()


def write_csv(target, header, rows):
    text = csv_text(header, rows)
    Path(target).write_text(text, encoding="utf-8")
    return text


def phase_report(path_name, kind, result, tol):
    lines = [
        f"path: {path_name}",
        f"kind: {kind}",
        f"phase: {result.value!r}",
        f"abs_error: {result.abs_error_estimate!r}",
        f"tol: {float(tol)!r}",
        f"subdivisions: {result.subdivisions}",
        f"converged: {'yes' if result.converged else 'no'}",
    ]
    return "\n".join(lines) + "\n"


def report_json(report):
    return json.dumps(report.to_dict(), indent=2) + "\n"
