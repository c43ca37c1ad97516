"""
Vehicle trajectory records and their CSV interchange format.

    vehicle_id,time_s,position_m[,speed_mps]

Rows of different vehicles may interleave, but each vehicle's rows must be in
strictly increasing time order and uniformly sampled.
"""
import csv
from dataclasses import dataclass
from typing import IO, Iterable, List, Optional

import numpy as np

from merge_advisor.utils import DomainError, TrajectoryFormatError, get_logger

log = get_logger(__name__)

HEADER = ["vehicle_id", "time_s", "position_m"]
SPEED_COLUMN = "speed_mps"
UNIFORM_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    vehicle_id: str
    times: np.ndarray
    positions: np.ndarray
    speeds: Optional[np.ndarray] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)
        if self.speeds is not None:
            speeds = np.asarray(self.speeds, dtype=float)
            object.__setattr__(self, "speeds", speeds)
            if speeds.shape != times.shape:
                raise DomainError(f"{self.vehicle_id}: speed column length mismatch")
        if positions.shape != times.shape:
            raise DomainError(f"{self.vehicle_id}: position column length mismatch")
        if len(times) > 1:
            steps = np.diff(times)
            if np.any(steps <= 0):
                raise DomainError(f"{self.vehicle_id}: times must be strictly increasing")
            bad = np.flatnonzero(np.abs(steps - steps[0]) > UNIFORM_TOLERANCE)
            if bad.size:
                i = bad[0]
                raise DomainError(
                    f"{self.vehicle_id}: non-uniform sampling between "
                    f"t={times[i]:g} and t={times[i + 1]:g}"
                )

    def __len__(self):
        return len(self.times)

    @property
    def sample_interval(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    @property
    def samples(self):
        speeds = self.speeds if self.speeds is not None else [None] * len(self)
        return [
            (float(t), float(x), None if v is None else float(v))
            for t, x, v in zip(self.times, self.positions, speeds)
        ]

    def with_positions(self, positions, speeds=None) -> "TrajectoryRecord":
        return TrajectoryRecord(self.vehicle_id, self.times, positions, speeds)


def _parse_float(value: str, column: str, line: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise TrajectoryFormatError(f"cannot parse {column} value '{value}'", line)
    if not np.isfinite(x):
        raise TrajectoryFormatError(f"{column} value '{value}' is not finite", line)
    return x


def parse_trajectory_csv(stream: IO[str]) -> List[TrajectoryRecord]:
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise TrajectoryFormatError("missing header", 1)
    has_speed = header == HEADER + [SPEED_COLUMN]
    if header != HEADER and not has_speed:
        raise TrajectoryFormatError(
            f"expected header {','.join(HEADER)}[,{SPEED_COLUMN}], got {','.join(header)}",
            1,
        )
    n_cols = len(header)

    rows = {}
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != n_cols:
            raise TrajectoryFormatError(f"expected {n_cols} columns, got {len(row)}", line)
        vid = row[0].strip()
        if not vid:
            raise TrajectoryFormatError("empty vehicle_id", line)
        t = _parse_float(row[1], "time_s", line)
        x = _parse_float(row[2], "position_m", line)
        v = _parse_float(row[3], SPEED_COLUMN, line) if has_speed else None

        samples = rows.setdefault(vid, [])
        if samples:
            t_prev, line_prev = samples[-1][0], samples[-1][3]
            if t == t_prev:
                raise TrajectoryFormatError(
                    f"duplicate time {t:g} for vehicle {vid} (first seen on line {line_prev})",
                    line,
                )
            if t < t_prev:
                raise TrajectoryFormatError(
                    f"non-monotone time {t:g} after {t_prev:g} for vehicle {vid}", line
                )
            if len(samples) > 1:
                dt0 = samples[1][0] - samples[0][0]
                if abs((t - t_prev) - dt0) > UNIFORM_TOLERANCE:
                    raise TrajectoryFormatError(
                        f"non-uniform sampling for vehicle {vid}: interval "
                        f"[{t_prev:g}, {t:g}] differs from {dt0:g} s",
                        line,
                    )
        samples.append((t, x, v, line))

    records = []
    for vid, samples in rows.items():
        arr = np.array([s[:2] for s in samples], dtype=float)
        speeds = np.array([s[2] for s in samples], dtype=float) if has_speed else None
        records.append(TrajectoryRecord(vid, arr[:, 0], arr[:, 1], speeds))
    log.debug("parsed %d trajectory records", len(records))
    return records


def write_trajectory_csv(records: Iterable[TrajectoryRecord], stream: IO[str]):
    records = list(records)
    with_speed = bool(records) and all(r.speeds is not None for r in records)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(HEADER + ([SPEED_COLUMN] if with_speed else []))
    for rec in records:
        for t, x, v in rec.samples:
            row = [rec.vehicle_id, repr(t), repr(x)]
            if with_speed:
                row.append(repr(v))
            writer.writerow(row)


def read_trajectories(path) -> List[TrajectoryRecord]:
    with open(path, "r", newline="") as f:
        return parse_trajectory_csv(f)


def write_trajectories(records: Iterable[TrajectoryRecord], path):
    with open(path, "w", newline="") as f:
        write_trajectory_csv(records, f)
