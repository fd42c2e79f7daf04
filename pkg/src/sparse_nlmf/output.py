"""CSV and manifest serialization.

Floats are written with ``repr`` (shortest round-trip form) so files can be
compared byte for byte across runs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable

from . import __version__
from .experiment import ExperimentConfig, ExperimentResult
from .penalties import PenaltyPoint

MSD_CSV = "msd.csv"
MANIFEST = "manifest.json"
PENALTY_CSV = "penalty.csv"
SUMMARY_CSV = "summary.csv"

ORDERING = ("RL1_NLMF", "RZA_NLMF", "ZA_NLMF")


def fmt(value: float) -> str:
    return repr(float(value))


def _csv_text(header: list[str], rows: Iterable[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def msd_csv_text(result: ExperimentResult) -> str:
    kinds = list(result.traces)
    header = ["iteration"]
    for kind in kinds:
        header += [f"{kind.value}_msd", f"{kind.value}_msd_db"]
    linear = [result.traces[k].average_msd for k in kinds]
    db = [result.traces[k].average_msd_db for k in kinds]
    rows = []
    for n in range(result.config.iterations):
        row = [str(n)]
        for lin, dbv in zip(linear, db):
            row += [fmt(lin[n]), fmt(dbv[n])]
        rows.append(row)
    return _csv_text(header, rows)


def manifest_dict(result: ExperimentResult) -> dict[str, Any]:
    config = result.config
    return {
        "tool": "sparse-nlmf",
        "version": __version__,
        "config": config.to_dict(),
        "noise_variance": config.noise.variance,
        "resolved_lambdas": {k.value: config.lambda_for(k) for k in config.algorithms},
        "mc_counts": {k.value: t.mc_count for k, t in result.traces.items()},
        "divergence_counts": {k.value: n for k, n in result.divergence_counts.items()},
        "final_msd": {k.value: v for k, v in result.final_msd().items()},
        "elapsed_seconds": result.elapsed_seconds,
        "workers": result.workers,
    }


def write_bundle(result: ExperimentResult, out_dir: str | Path) -> tuple[Path, Path]:
    """Write ``msd.csv`` and ``manifest.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    csv_path = _write_text(out_dir / MSD_CSV, msd_csv_text(result))
    manifest = json.dumps(manifest_dict(result), indent=2, sort_keys=True) + "\n"
    manifest_path = _write_text(out_dir / MANIFEST, manifest)
    return csv_path, manifest_path


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a config file; a run manifest is accepted and its ``config`` block used."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        data = data["config"]
    return data


def penalty_csv_text(points: list[PenaltyPoint]) -> str:
    header = ["h", "zeta_za", "zeta_rza", "zeta_rl1"]
    flag = not all(p.in_range for p in points)
    if flag:
        header.append("in_range")
    rows = []
    for p in points:
        row = [fmt(p.coefficient), fmt(p.zeta_za), fmt(p.zeta_rza), fmt(p.zeta_rl1)]
        if flag:
            row.append(str(p.in_range).lower())
        rows.append(row)
    return _csv_text(header, rows)


def write_penalty_csv(points: list[PenaltyPoint], out_dir: str | Path) -> Path:
    return _write_text(Path(out_dir) / PENALTY_CSV, penalty_csv_text(points))


def ordering_holds(final: dict[str, float]) -> bool | None:
    """``RL1 < RZA < ZA`` on final MSD; None if any of the three is missing or NaN."""
    values = [final.get(k) for k in ORDERING]
    if any(v is None or math.isnan(v) for v in values):
        return None
    return values[0] < values[1] < values[2]


SUMMARY_HEADER = ["cell", "sparsity_k", "snr_db", "mu", "status", "algorithm", "final_msd", "final_msd_db", "ordering_holds"]


def summary_csv_text(cells: list[dict[str, Any]]) -> str:
    """One row per (cell, algorithm); failed cells get one row with the error."""
    rows = []
    for cell in cells:
        base = [cell["name"], str(cell["sparsity_k"]), fmt(cell["snr_db"]), fmt(cell["mu"])]
        final = cell.get("final_msd")
        if final is None:
            rows.append(base + [f"error: {cell['error']}", "", "", "", ""])
            continue
        order = ordering_holds(final)
        order_text = "" if order is None else str(order).lower()
        for name, value in final.items():
            db = 10.0 * math.log10(value) if value > 0 else (-math.inf if value == 0 else math.nan)
            rows.append(base + ["ok", name, fmt(value), fmt(db), order_text])
    return _csv_text(SUMMARY_HEADER, rows)


def write_summary(cells: list[dict[str, Any]], out_dir: str | Path) -> Path:
    return _write_text(Path(out_dir) / SUMMARY_CSV, summary_csv_text(cells))


def cell_name(config: ExperimentConfig) -> str:
    return f"k{config.sparsity_k}_snr{fmt(config.snr_db)}_mu{fmt(config.mu)}"
