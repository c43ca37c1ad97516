"""
CSV tables and SVG plots of sweep results.

``sweep.csv`` has one row per cell: the swept axes in sweep order, then
``seeds``, ``failed_seeds``, ``baseline_fuel_mean_l``, ``treated_fuel_mean_l``,
``mean_saving``, ``saving_p5``, ``saving_p95`` and ``failed``.
``sweep-pairs.csv`` has one row per cell and seed. ``sweep.svg`` plots the
mean saving against the first numeric axis with the 5th-95th percentile band,
one line per combination of the remaining axes.
"""
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from merge_advisor.traffic import GuidanceCommand
from merge_advisor.utils import DomainError, get_logger

from .sweep import SweepRow

log = get_logger(__name__)

AXIS_LABELS = {
    "ramp_flow": "Ramp flow (veh/hr/ln)",
    "mainline_flow": "Mainline flow (veh/hr/ln)",
    "r2_length": "R2 length (m)",
    "r3_length": "R3 length (m)",
    "r2_entry_speed": "R2 entry speed (m/s)",
    "cav_penetration": "CAV penetration (fraction)",
    "cooperative": "Cooperative mainline",
}
SAVING_LABEL = "Fuel saving (fraction)"
COMMAND_COLUMNS = ["time_s", "target_id", "leader_id", "accel_mps2", "speed_mps"]
CSV_OPTIONS = dict(index=False, float_format="%.10g", lineterminator="\n")

plt.rcParams["svg.hashsalt"] = "merge-advisor"
plt.rcParams["svg.fonttype"] = "path"


@dataclass(frozen=True)
class SweepOutputs:
    summary: Path
    pairs: Path
    plot: Path


def _mean(values) -> Optional[float]:
    values = [v for v in values if v is not None]
    if not values:
        return None
    return float(np.mean(values))


def summary_frame(rows: List[SweepRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        rec = dict(row.cell)
        rec.update(
            seeds=len(row.seeds),
            failed_seeds=len(row.failures),
            baseline_fuel_mean_l=_mean(row.baseline_fuel),
            treated_fuel_mean_l=_mean(row.treated_fuel),
            mean_saving=row.mean_saving,
            saving_p5=row.saving_p5,
            saving_p95=row.saving_p95,
            failed=row.failed,
        )
        records.append(rec)
    return pd.DataFrame.from_records(records)


def pairs_frame(rows: List[SweepRow]) -> pd.DataFrame:
    records = []
    for row in rows:
        for seed, b, t, s in zip(row.seeds, row.baseline_fuel, row.treated_fuel, row.savings):
            records.append(
                {**row.cell, "seed": seed, "baseline_fuel_l": b, "treated_fuel_l": t, "saving": s}
            )
    return pd.DataFrame.from_records(records)


def _plot_axis(rows: List[SweepRow]) -> Optional[str]:
    axes = list(rows[0].cell)
    for name in axes:
        if name != "cooperative" and len({r.cell[name] for r in rows}) > 1:
            return name
    return axes[0] if axes else None


def plot_savings(rows: List[SweepRow], path: Path, axis: Optional[str] = None) -> Path:
    axis = axis or _plot_axis(rows)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))

    if axis is None:
        groups = {(): list(enumerate(rows))}
        ax.set_xlabel("Cell")
    else:
        groups = {}
        for row in rows:
            key = tuple((k, v) for k, v in row.cell.items() if k != axis)
            groups.setdefault(key, []).append((row.cell[axis], row))
        ax.set_xlabel(AXIS_LABELS.get(axis, axis))

    for key, points in groups.items():
        points = [(float(x), r) for x, r in points if r.mean_saving is not None]
        if not points:
            continue
        points.sort(key=lambda p: p[0])
        x = np.array([p[0] for p in points])
        mean = np.array([p[1].mean_saving for p in points])
        lo = np.array([p[1].saving_p5 for p in points])
        hi = np.array([p[1].saving_p95 for p in points])
        label = ", ".join(f"{k}={v}" for k, v in key) or None
        (line,) = ax.plot(x, mean, marker="o", lw=1.5, label=label)
        ax.fill_between(x, lo, hi, color=line.get_color(), alpha=0.2, lw=0)

    ax.axhline(0.0, color="0.5", lw=0.8, ls="--")
    ax.set_ylabel(SAVING_LABEL)
    if len(groups) > 1:
        ax.legend(frameon=False, fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def emit_outputs(rows: List[SweepRow], out_dir, axis: Optional[str] = None) -> SweepOutputs:
    if not rows:
        raise DomainError("Nothing to write: the sweep table is empty")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = SweepOutputs(
        summary=out_dir / "sweep.csv",
        pairs=out_dir / "sweep-pairs.csv",
        plot=out_dir / "sweep.svg",
    )
    summary_frame(rows).to_csv(outputs.summary, **CSV_OPTIONS)
    pairs_frame(rows).to_csv(outputs.pairs, **CSV_OPTIONS)
    plot_savings(rows, outputs.plot, axis)
    log.info("Wrote %s, %s and %s", outputs.summary, outputs.pairs, outputs.plot)
    return outputs


def write_command_log(commands: List[GuidanceCommand], path) -> Path:
    """One row per issued guidance command, in issue order."""
    rows = [
        (c.issued_at, c.target_id, c.leader_id, c.recommended_accel, c.recommended_speed)
        for c in commands
    ]
    frame = pd.DataFrame.from_records(rows, columns=COMMAND_COLUMNS)
    frame.to_csv(path, **CSV_OPTIONS)
    return Path(path)
