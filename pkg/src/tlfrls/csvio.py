"""CSV output for experiment runs.

Each method gets a trace file with one row per step; ``summary.csv`` holds
one row per method. Floats are written with 17 significant digits so a
re-read reproduces them bit for bit.
"""

import csv
import math
from pathlib import Path

import numpy as np

from .experiments import SUMMARY_FIELDS

__all__ = ["trace_header", "emit_csv", "read_trace_csv", "format_float", "TRACE_COLUMNS"]

TRACE_COLUMNS = (
    "param_err",
    "ident_err",
    "min_eig_phi",
    "min_eig_omega_sq",
    "min_eig_P",
    "cond_P",
    "lyapunov",
)


def format_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def trace_header(n):
    return ["k", "method", *(f"theta_hat_{i}" for i in range(1, n + 1)), *TRACE_COLUMNS, "diverged"]


def _write_trace(path, trace):
    n = trace.theta_hat.shape[1]
    cols = [getattr(trace, c) for c in TRACE_COLUMNS]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(n))
        for k in range(len(trace)):
            w.writerow(
                [
                    k,
                    trace.method,
                    *(format_float(v) for v in trace.theta_hat[k]),
                    *(format_float(c[k]) for c in cols),
                    "1" if trace.diverged[k] else "0",
                ]
            )


def _write_summary(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        for row in rows:
            out = []
            for key in SUMMARY_FIELDS:
                v = row[key]
                out.append("" if v is None else format_float(v) if isinstance(v, float) else str(v))
            w.writerow(out)


def emit_csv(result, out_dir):
    """Write ``<method name>.csv`` per method plus ``summary.csv``; return the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for trace in result.traces.values():
        path = out / f"{trace.name}.csv"
        _write_trace(path, trace)
        paths.append(path)
    summary = out / "summary.csv"
    _write_summary(summary, result.summary)
    paths.append(summary)
    return paths


def read_trace_csv(path):
    """Read a trace file back into a dict of numpy columns (``method`` is a list)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    data = {}
    for j, name in enumerate(header):
        col = [r[j] for r in rows]
        if name == "method":
            data[name] = col
        elif name in ("k", "diverged"):
            data[name] = np.array([int(v) for v in col])
        else:
            data[name] = np.array([float(v) for v in col])
    return data
