"""
Recorded mainline traffic played back in place of generated arrivals.

Each recorded vehicle enters at the first sample that lies on the mainline
and follows its recording until the recording ends, it leaves the mainline,
or its recording becomes more aggressive than the IDM allows behind a
simulated vehicle that merged in front of it. From then on the vehicle is
released and driven by the IDM like any other mainline vehicle.
"""
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from merge_advisor.trajectory import TrajectoryRecord, speed_profile

from ..road import RampGeometry


@dataclass
class ReplayTrack:
    vehicle_id: str
    times: np.ndarray
    positions: np.ndarray
    speeds: np.ndarray
    accels: np.ndarray

    @classmethod
    def from_record(cls, rec: TrajectoryRecord) -> "ReplayTrack":
        if rec.speeds is not None:
            speeds = rec.speeds
        elif len(rec) > 1:
            speeds = speed_profile(rec)
        else:
            speeds = np.zeros(len(rec))
        speeds = np.maximum(speeds, 0.0)
        accels = np.gradient(speeds, rec.times) if len(rec) > 1 else np.zeros(len(rec))
        return cls(rec.vehicle_id, rec.times, rec.positions, speeds, accels)

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    def at(self, t: float) -> Tuple[float, float, float]:
        """(position, speed, acceleration) interpolated at time t."""
        return (
            float(np.interp(t, self.times, self.positions)),
            float(np.interp(t, self.times, self.speeds)),
            float(np.interp(t, self.times, self.accels)),
        )


class MainlineReplay:
    def __init__(self, records: List[TrajectoryRecord], geom: RampGeometry):
        self.geometry = geom
        self.tracks: Dict[str, ReplayTrack] = {}
        pending: List[Tuple[float, str]] = []
        for rec in records:
            on_road = np.flatnonzero(
                (rec.positions >= 0) & (rec.positions <= geom.mainline_length)
            )
            if on_road.size == 0:
                continue
            vid = f"replay-{rec.vehicle_id}"
            self.tracks[vid] = ReplayTrack.from_record(rec)
            pending.append((float(rec.times[on_road[0]]), vid))
        pending.sort()
        self.entry_times = [t for t, _ in pending]
        self.entries = [vid for _, vid in pending]

    def __len__(self):
        return len(self.tracks)

    def due(self, clock: float, start: int = 0) -> int:
        """Index one past the last entry due at ``clock``, scanning from ``start``."""
        end = start
        while end < len(self.entries) and self.entry_times[end] <= clock + 1e-9:
            end += 1
        return end
