"""CSV, JSON and SVG output for lists of records."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import OrderedDict
from pathlib import Path
from typing import Iterable

import numpy as np

from .asymptotics import Record

CSV_COLUMNS = (
    "experiment", "tag", "domain", "N", "h", "p", "q", "route", "value", "value_pow_1_over_p",
    "target", "gap", "slack", "pass", "iterations", "seconds",
)


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.10g}"
    return str(v)


def status(rec: Record) -> str:
    if rec.passed is None:
        return "skip" if rec.note.startswith("skipped") else "info"
    return "pass" if rec.passed else "fail"


def sort_records(records: Iterable[Record]) -> list[Record]:
    return sorted(records, key=lambda r: r.sort_key())


def csv_text(records: Iterable[Record], timings: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sort_records(records):
        row = []
        for col in CSV_COLUMNS:
            if col == "pass":
                row.append(status(r))
            elif col == "seconds":
                row.append(fmt(r.seconds) if timings else "")
            else:
                row.append(fmt(getattr(r, col)))
        w.writerow(row)
    return buf.getvalue()


def write_csv(records, path, timings: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(records, timings))
    return path


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else fmt(v)
    if v is None or isinstance(v, str):
        return v
    return str(v)


def record_dict(r: Record, timings: bool = False) -> dict:
    d = OrderedDict()
    for col in CSV_COLUMNS:
        if col == "pass":
            d["pass"] = status(r)
        elif col == "seconds":
            d["seconds"] = r.seconds if timings else None
        else:
            d[col] = getattr(r, col)
    d["param"] = r.param
    d["criterion"] = r.criterion
    d["note"] = r.note
    d["detail"] = r.detail
    return _jsonable(d)


def write_json(records, path, timings: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [record_dict(r, timings) for r in sort_records(records)]
    path.write_text(json.dumps(rows, indent=1, sort_keys=False) + "\n")
    return path


def summarize(records: Iterable[Record], key: str = "tag") -> list[dict]:
    """One row per tag (or criterion): pass/fail counts and the smallest slack."""
    groups: dict[str, list[Record]] = {}
    for r in records:
        groups.setdefault(getattr(r, key) or "-", []).append(r)
    rows = []
    for name in sorted(groups):
        rs = groups[name]
        n_fail = sum(r.passed is False for r in rs)
        n_pass = sum(r.passed is True for r in rs)
        slacks = [r.slack for r in rs if r.slack is not None and r.passed is not None]
        rows.append({
            key: name,
            "status": "fail" if n_fail else ("pass" if n_pass else "info"),
            "passed": n_pass,
            "failed": n_fail,
            "min_slack": min(slacks) if slacks else None,
        })
    return rows


def summary_text(records) -> str:
    records = list(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "name", "status", "passed", "failed", "min_slack"])
    for key in ("criterion", "tag"):
        for row in summarize(records, key):
            w.writerow([key, row[key], row["status"], row["passed"], row["failed"], fmt(row["min_slack"])])
    return buf.getvalue()


def failing_tags(records) -> list[str]:
    return sorted({r.tag for r in records if r.passed is False})


# ---------------------------------------------------------------------------
# plots
# ---------------------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "pfreq"
    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def write_plots(records, out_dir, stem: str = "report") -> list[Path]:
    """Gap-versus-parameter plots for sweeps and centreline profiles for strips."""
    records = sort_records(records)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    plt = None
    sweeps: dict[tuple, list[Record]] = {}
    for r in records:
        if r.experiment.startswith(("sweep", "C6", "C7")) and r.gap is not None and r.param is not None \
                and r.route != "audit" and math.isfinite(r.param) and r.gap > 0:
            sweeps.setdefault((r.experiment, r.domain, r.tag, r.note), []).append(r)
    for i, ((exp, dom, tag, note), rs) in enumerate(sorted(sweeps.items())):
        if len(rs) < 2:
            continue
        plt = plt or _pyplot()
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.loglog([r.param for r in rs], [r.gap for r in rs], "o-")
        ax.set_xlabel("parameter")
        ax.set_ylabel("gap")
        ax.set_title(f"{dom} {tag} {note}"[:70], fontsize=8)
        written.append(_save(fig, out_dir / f"{stem}_gap_{i:02d}.svg"))
        plt.close(fig)
    for i, r in enumerate(r for r in records if "profile" in r.detail):
        plt = plt or _pyplot()
        prof = r.detail["profile"]
        fig, ax = plt.subplots(figsize=(6, 3))
        ax.plot(prof["x1"], prof["w"], label="w")
        ax.plot(prof["x1"], prof["barrier"], "--", label="barrier")
        ax.set_xlabel("x1")
        ax.set_title(r.domain, fontsize=8)
        ax.legend()
        written.append(_save(fig, out_dir / f"{stem}_profile_{i:02d}.svg"))
        plt.close(fig)
    return written


def write_all(records, out_dir, timings: bool = False, plots: bool = False, stem: str = "report") -> dict:
    records = list(records)
    out_dir = Path(out_dir)
    paths = {
        "csv": write_csv(records, out_dir / f"{stem}.csv", timings),
        "json": write_json(records, out_dir / f"{stem}.json", timings),
    }
    summary = out_dir / f"{stem}_summary.csv"
    summary.write_text(summary_text(records))
    paths["summary"] = summary
    if plots:
        paths["plots"] = write_plots(records, out_dir / "plots", stem)
    return paths
