"""Result containers and deterministic file output."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .protocol import TrialRecord

BASE_COLUMNS = ("S", "L", "P", "observed", "graph_id", "trial", "solver", "rmse", "success", "status", "seed")


@dataclass
class ExperimentResult:
    kind: str
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    figures: dict = field(default_factory=dict)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def records_csv(records) -> str:
    """CSV text for a list of ``TrialRecord``; wall times are left out so
    reruns are byte-identical."""
    extra = sorted({k for r in records for k in r.extra})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(BASE_COLUMNS) + extra)
    for r in sorted(records, key=_record_key):
        row = [r.S, r.L, r.P, r.observed, r.graph_id, r.trial, r.solver, r.rmse, r.success, r.status, r.seed]
        row += [r.extra.get(k, "") for k in extra]
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _record_key(r: TrialRecord):
    return (r.solver, r.P, r.S, r.L, r.observed, r.graph_id, r.trial, json.dumps(r.extra, sort_keys=True, default=str))


def read_records(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            extra = {k: v for k, v in row.items() if k not in BASE_COLUMNS}
            out.append(TrialRecord(int(row["S"]), int(row["L"]), int(row["P"]), int(row["observed"]),
                                   int(row["graph_id"]), int(row["trial"]), row["solver"], float(row["rmse"]),
                                   row["status"], int(row["seed"]), 0.0, extra))
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def emit_outputs(result: ExperimentResult, out_dir) -> list:
    """Write ``results.csv``, ``summary.json``, ``timings.csv`` and any SVG figures.

    Returns the written paths.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    written = []

    def put(name, text):
        path = os.path.join(out_dir, name)
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        written.append(path)

    put("results.csv", records_csv(result.records))
    summary = {"kind": result.kind, "n_records": len(result.records), **result.summary}
    put("summary.json", json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    tbuf = io.StringIO()
    tw = csv.writer(tbuf, lineterminator="\n")
    tw.writerow(["solver", "P", "S", "L", "observed", "graph_id", "trial", "wall_time"])
    for r in sorted(result.records, key=_record_key):
        tw.writerow([r.solver, r.P, r.S, r.L, r.observed, r.graph_id, r.trial, f"{r.wall_time:.6f}"])
    put("timings.csv", tbuf.getvalue())
    for name in sorted(result.figures):
        put(name, result.figures[name])
    return written
