"""
Two-vehicle platoon on an open lane: a leader with a prescribed speed
profile and an IDM follower, integrated with the same semi-implicit scheme
as the merging-area simulation. Used for equilibrium checks and to generate
smooth reference trajectories.
"""
from dataclasses import dataclass
from math import ceil, pi, sin
from typing import Callable, Optional, Union

import numpy as np

from merge_advisor.trajectory import TrajectoryRecord
from merge_advisor.utils import CollisionError, DomainError

from ..idm import IdmParams, acceleration, desired_gap

SpeedProfile = Union[float, Callable[[float], float]]


@dataclass
class PlatoonTrace:
    times: np.ndarray
    leader_position: np.ndarray
    leader_speed: np.ndarray
    follower_position: np.ndarray
    follower_speed: np.ndarray
    length: float

    @property
    def gaps(self) -> np.ndarray:
        return self.leader_position - self.length - self.follower_position

    def follower_record(self, vehicle_id: str = "follower", every: int = 1) -> TrajectoryRecord:
        return TrajectoryRecord(
            vehicle_id,
            self.times[::every],
            self.follower_position[::every],
            self.follower_speed[::every],
        )

    def leader_record(self, vehicle_id: str = "leader", every: int = 1) -> TrajectoryRecord:
        return TrajectoryRecord(
            vehicle_id,
            self.times[::every],
            self.leader_position[::every],
            self.leader_speed[::every],
        )


def simulate_platoon(
    leader_speed: SpeedProfile,
    duration: float,
    p: IdmParams = IdmParams(),
    dt: float = 0.1,
    initial_gap: Optional[float] = None,
    follower_speed: Optional[float] = None,
    length: float = 5.0,
) -> PlatoonTrace:
    profile = leader_speed if callable(leader_speed) else (lambda t: leader_speed)
    n = round(duration / dt)
    times = np.arange(n + 1) * dt
    vl = max(float(profile(0.0)), 0.0)
    vf = vl if follower_speed is None else follower_speed
    if vf < 0:
        raise DomainError("Follower speed must be non-negative")
    gap = 2.0 * desired_gap(vf, 0.0, p) if initial_gap is None else initial_gap
    xl = gap + length
    xf = 0.0

    lp, ls, fp, fs = (np.empty(n + 1) for _ in range(4))
    lp[0], ls[0], fp[0], fs[0] = xl, vl, xf, vf
    for k in range(1, n + 1):
        gap = xl - length - xf
        a = acceleration(vf, gap, vf - vl, p)
        vl = max(float(profile(times[k])), 0.0)
        xl += vl * dt
        vf = max(vf + a * dt, 0.0)
        xf += vf * dt
        if xl - length - xf <= 0:
            raise CollisionError(times[k], "follower", "leader", xl - length - xf)
        lp[k], ls[k], fp[k], fs[k] = xl, vl, xf, vf
    return PlatoonTrace(times, lp, ls, fp, fs, length)


def random_platoon_truth(
    seed: int,
    samples: int = 256,
    dt: float = 1.0,
    p: IdmParams = IdmParams(),
    vehicle_id: Optional[str] = None,
) -> TrajectoryRecord:
    """Follower trajectory behind a leader with a random sinusoidal speed profile.

    The platoon is integrated at 0.1 s or finer and sampled every ``dt``.
    """
    rng = np.random.default_rng(seed)
    base = rng.uniform(12.0, 25.0)
    amplitude = rng.uniform(1.0, 4.0)
    period = rng.uniform(40.0, 120.0)
    phase = rng.uniform(0.0, 2 * pi)

    def profile(t: float) -> float:
        return base + amplitude * sin(2 * pi * t / period + phase)

    substeps = max(ceil(dt / 0.1 - 1e-9), 1)
    trace = simulate_platoon(
        profile,
        duration=(samples - 1) * dt,
        p=p,
        dt=dt / substeps,
        initial_gap=desired_gap(profile(0.0), 0.0, p) * 1.2,
    )
    return trace.follower_record(vehicle_id or f"truth-{seed}", every=substeps)
