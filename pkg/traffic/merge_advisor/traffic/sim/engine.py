"""
Fixed-step microsimulation of the merging area.

Every step runs, in order: arrivals, guidance (on guidance-interval
boundaries), accelerations, semi-implicit integration, lane changes from R3,
fuel accrual and removal of vehicles past the end of the mainline. Lanes are
kept ordered leading vehicle first; any overlap aborts the run.

The guided ramp vehicle drives at its latched command. Every ramp vehicle
brakes for the ramp end only once stopping there needs more than the
comfortable deceleration, and one left standing at the end accepts any gap
its mainline follower can still brake for.
"""
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Deque, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from merge_advisor.trajectory import TrajectoryRecord, read_trajectories
from merge_advisor.utils import CollisionError, get_logger

from ..fuel import fuel_rate
from ..guidance import (
    GuidanceCommand,
    MergeCheck,
    MergeCriteria,
    classify_vehicles,
    compute_guidance,
    find_follower,
    merge_eligible,
    select_target,
)
from ..idm import IdmParams, acceleration, free_acceleration
from ..road import RampGeometry, RampSegment, segment_of, virtual_position
from ..vehicles import Road, VehicleState
from .arrivals import equilibrium_speed_for_flow, insertion_speed, spawn_arrivals
from .config import ScenarioConfig
from .replay import MainlineReplay, ReplayTrack

log = get_logger(__name__)

OCCUPANCY_INTERVAL = 60.0
# A vehicle this slow and this close to the ramp end has failed to merge
STOPPED_SPEED = 0.1
STOP_ZONE = 1.0


@dataclass(frozen=True)
class SimEvent:
    time: float
    kind: str
    vehicle_id: str
    detail: str = ""


@dataclass
class RandomStreams:
    """Independent generators so that paired runs draw identical demand."""

    mainline: np.random.Generator
    ramp: np.random.Generator
    fleet: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStreams":
        mainline, ramp, fleet = np.random.SeedSequence(seed).spawn(3)
        return cls(
            np.random.default_rng(mainline),
            np.random.default_rng(ramp),
            np.random.default_rng(fleet),
        )


@dataclass
class SimState:
    rng: RandomStreams
    clock: float = 0.0
    step_index: int = 0
    mainline: List[VehicleState] = field(default_factory=list)
    ramp: List[VehicleState] = field(default_factory=list)
    mainline_queue: int = 0
    # CAV flag of every vehicle waiting at the ramp entry
    ramp_queue: Deque[bool] = field(default_factory=deque)
    # Per-lane id counters, so mainline ids do not depend on ramp demand
    next_id: Dict[str, int] = field(default_factory=lambda: {"m": 0, "r": 0})
    spawned: int = 0
    exited: int = 0
    latched: Optional[GuidanceCommand] = None
    commands: List[GuidanceCommand] = field(default_factory=list)
    events: List[SimEvent] = field(default_factory=list)
    fuel: Dict[str, float] = field(default_factory=dict)
    merge_speeds: List[float] = field(default_factory=list)
    failed: set = field(default_factory=set)
    ramp_occupancy: List[int] = field(default_factory=list)
    trajectories: Optional[Dict[str, List[Tuple[float, float, float]]]] = None
    playback: Dict[str, ReplayTrack] = field(default_factory=dict)
    replay_cursor: int = 0

    @property
    def present(self) -> int:
        return len(self.mainline) + len(self.ramp)

    @property
    def queued(self) -> int:
        return self.mainline_queue + len(self.ramp_queue)

    @property
    def vehicles(self) -> List[VehicleState]:
        return self.mainline + self.ramp

    def log_event(self, kind: str, vehicle_id: str, detail: str = ""):
        self.events.append(SimEvent(self.clock, kind, vehicle_id, detail))


class SimResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    total_fuel: float
    vehicle_fuel: Dict[str, float]
    merge_count: int
    merge_failures: int
    merge_speed_mean: Optional[float] = None
    merge_speed_p5: Optional[float] = None
    merge_speed_p95: Optional[float] = None
    collision_count: int = 0
    spawned: int
    exited: int
    present: int
    queued: int
    ramp_occupancy: List[int] = []
    trajectories: Dict[str, List[Tuple[float, float, float]]] = {}
    commands: List[GuidanceCommand] = []
    events: List[SimEvent] = []

    def trajectory_records(self) -> List[TrajectoryRecord]:
        records = []
        for vid, samples in self.trajectories.items():
            arr = np.array(samples, dtype=float).reshape(-1, 3)
            records.append(TrajectoryRecord(vid, arr[:, 0], arr[:, 1], arr[:, 2]))
        return records


def car_following_accel(
    v: VehicleState, leader: Optional[VehicleState], p: IdmParams
) -> float:
    if leader is None:
        return free_acceleration(v.speed, p)
    gap = leader.rear - v.position
    if gap <= 0:
        return -p.b_hard
    return acceleration(v.speed, gap, v.speed - leader.speed, p)


def ramp_end_accel(v: VehicleState, geom: RampGeometry, p: IdmParams, dt: float) -> float:
    """Acceleration cap that brings a ramp vehicle to rest s_min short of the ramp end.

    The cap stays non-negative while stopping needs no more than the comfortable
    deceleration ``b_n`` and brakes progressively harder once it needs more.
    """
    gap = geom.ramp_length - v.position
    room = gap - p.s_min
    if room <= 0:
        return -p.b_hard
    needed = v.speed**2 / (2.0 * room)
    cap = p.a_m * (1.0 - (needed / p.b_n) ** 2 - (p.s_min / gap) ** 2)
    # the next semi-implicit step must not cross the stop line
    cap = min(cap, (room - v.speed * dt) / dt**2)
    return max(cap, -p.b_hard)


def cooperative_adjust(
    accels: Dict[str, float],
    mainline: List[VehicleState],
    candidate: Optional[VehicleState],
    geom: RampGeometry,
    p: IdmParams,
    cooperative: bool = True,
) -> Dict[str, float]:
    """Let the mainline vehicle behind the candidate's virtual position yield to it.

    The yielding vehicle keeps the lower of its own acceleration and the IDM
    acceleration behind the virtual vehicle. Everything else is unchanged.
    """
    if not cooperative or candidate is None:
        return accels
    x = virtual_position(candidate.position, geom)
    follower = find_follower(mainline, x)
    if follower is None or follower.id not in accels:
        return accels
    gap = x - candidate.length - follower.position
    if gap <= 0:
        return accels
    yielding = acceleration(follower.speed, gap, follower.speed - candidate.speed, p)
    adjusted = dict(accels)
    adjusted[follower.id] = min(accels[follower.id], yielding)
    return adjusted


def _insert_ordered(lane: List[VehicleState], vehicle: VehicleState) -> int:
    i = 0
    while i < len(lane) and lane[i].position >= vehicle.position:
        i += 1
    lane.insert(i, vehicle)
    return i


class Simulation:
    def __init__(self, cfg: ScenarioConfig, replay: Optional[MainlineReplay] = None):
        self.config = cfg
        self.geometry = cfg.geometry
        self.main_params = cfg.main_params
        self.r1_params = cfg.r1_params
        self.criteria = MergeCriteria(
            ego=self.main_params,
            follower=self.main_params,
            require_follower_gap=cfg.require_follower_gap,
        )
        # A vehicle standing at the ramp end takes any gap its follower can brake for comfortably
        self.forced_criteria = self.criteria.model_copy(update={"require_follower_gap": False})
        if replay is None and cfg.mainline_replay is not None:
            replay = MainlineReplay(read_trajectories(cfg.mainline_replay), cfg.geometry)
        self.replay = replay
        self.mainline_entry_speed = equilibrium_speed_for_flow(
            cfg.mainline_flow, self.main_params, cfg.vehicle_length
        )
        self._occupancy_every = max(round(OCCUPANCY_INTERVAL / cfg.dt), 1)

    def initial_state(self, record_trajectories: bool = True) -> SimState:
        return SimState(
            rng=RandomStreams.from_seed(self.config.seed),
            trajectories={} if record_trajectories else None,
        )

    def step(self, state: SimState) -> SimState:
        cfg = self.config
        t0 = state.clock
        self._spawn(state)
        if state.step_index % cfg.steps_per_guidance == 0:
            self._update_guidance(state)
        accels = self._accelerations(state)
        self._integrate(state, accels)
        self._change_lanes(state)
        if t0 >= cfg.warmup - 1e-9:
            self._accrue_fuel(state)
        self._remove_exited(state)
        self._check_overlaps(state)
        self._sample(state)
        return state

    def _spawn(self, state: SimState):
        cfg = self.config
        # Demand is drawn every step, whatever happens downstream
        if self.replay is None:
            n = spawn_arrivals(state.rng.mainline, cfg.mainline_flow, cfg.dt)
            state.mainline_queue += n
            state.spawned += n
            while state.mainline_queue and self._insert(
                state, Road.MAINLINE, self.mainline_entry_speed, self.main_params, False
            ):
                state.mainline_queue -= 1
        else:
            self._admit_recorded(state)

        n = spawn_arrivals(state.rng.ramp, cfg.ramp_flow, cfg.dt)
        for _ in range(n):
            state.ramp_queue.append(bool(state.rng.fleet.random() < cfg.cav_penetration))
        state.spawned += n
        while state.ramp_queue and self._insert(
            state, Road.RAMP, cfg.r1_speed, self.r1_params, state.ramp_queue[0]
        ):
            state.ramp_queue.popleft()

    def _insert(
        self, state: SimState, road: Road, desired: float, p: IdmParams, is_cav: bool
    ) -> bool:
        lane = state.mainline if road == Road.MAINLINE else state.ramp
        last = lane[-1] if lane else None
        gap = None if last is None else last.rear
        if gap is not None and gap < p.s_min:
            return False
        speed = insertion_speed(desired, gap, 0.0 if last is None else last.speed, p)
        prefix = "m" if road == Road.MAINLINE else "r"
        vehicle = VehicleState(
            id=f"{prefix}{state.next_id[prefix]}",
            road=road,
            position=0.0,
            speed=speed,
            length=self.config.vehicle_length,
            is_cav=is_cav,
        )
        state.next_id[prefix] += 1
        lane.append(vehicle)
        return True

    def _admit_recorded(self, state: SimState):
        end = self.replay.due(state.clock, state.replay_cursor)
        for vid in self.replay.entries[state.replay_cursor : end]:
            track = self.replay.tracks[vid]
            position, speed, accel = track.at(state.clock)
            vehicle = VehicleState(
                vid, Road.MAINLINE, position, speed, accel, self.config.vehicle_length, False
            )
            i = _insert_ordered(state.mainline, vehicle)
            ahead = state.mainline[i - 1] if i > 0 else None
            behind = state.mainline[i + 1] if i + 1 < len(state.mainline) else None
            if (ahead is not None and ahead.rear - position <= 0) or (
                behind is not None and vehicle.rear - behind.position <= 0
            ):
                state.mainline.pop(i)
                state.log_event("replay-rejected", vid, "entry position occupied")
                log.warning("recorded vehicle %s overlaps traffic at entry; skipped", vid)
                continue
            state.playback[vid] = track
            state.spawned += 1
        state.replay_cursor = end

    def _update_guidance(self, state: SimState):
        state.latched = None
        if not self.config.guidance_enabled:
            return
        groups = classify_vehicles(state.ramp, self.geometry)
        target_id = select_target(groups)
        if target_id is None:
            return
        target = groups.find(target_id)
        if not target.is_cav:
            return
        cmd = compute_guidance(
            target,
            state.mainline,
            self.geometry,
            self.main_params,
            state.clock,
            self.config.guidance_interval,
        )
        state.commands.append(cmd)
        if cmd.overlap:
            # A passing mainline vehicle covers the virtual position; not a usable command
            state.log_event("guidance-overlap", target.id, f"alongside {cmd.leader_id}")
            return
        state.latched = cmd

    def _accelerations(self, state: SimState) -> Dict[str, float]:
        cfg = self.config
        geom = self.geometry
        accels: Dict[str, float] = {}

        for i, v in enumerate(state.mainline):
            leader = state.mainline[i - 1] if i else None
            if v.id in state.playback:
                self._maybe_release(state, v, leader)
                if v.id in state.playback:
                    continue
            accels[v.id] = car_following_accel(v, leader, self.main_params)

        groups = classify_vehicles(state.ramp, geom)
        if cfg.cooperative:
            target_id = select_target(groups)
            candidate = groups.find(target_id) if target_id is not None else None
            accels = cooperative_adjust(
                accels, state.mainline, candidate, geom, self.main_params
            )

        latched = state.latched
        for i, v in enumerate(state.ramp):
            leader = state.ramp[i - 1] if i else None
            segment = segment_of(v.position, geom)
            p = self.r1_params if segment == RampSegment.R1 else self.main_params
            a = car_following_accel(v, leader, p)
            if latched is not None and latched.target_id == v.id:
                if leader is None:
                    a = latched.recommended_accel
                else:
                    a = min(a, latched.recommended_accel)
            accels[v.id] = min(a, ramp_end_accel(v, geom, self.main_params, cfg.dt))
        return accels

    def _maybe_release(
        self, state: SimState, v: VehicleState, leader: Optional[VehicleState]
    ):
        """Hand a recorded vehicle over to the IDM once a simulated leader constrains it."""
        if leader is None or leader.id in state.playback:
            return
        _, _, recorded = state.playback[v.id].at(state.clock)
        if car_following_accel(v, leader, self.main_params) < recorded:
            del state.playback[v.id]
            state.log_event("replay-released", v.id, f"behind {leader.id}")

    def _integrate(self, state: SimState, accels: Dict[str, float]):
        dt = self.config.dt
        for v in state.vehicles:
            if v.id in state.playback:
                continue
            speed = max(v.speed + accels[v.id] * dt, 0.0)
            v.accel = (speed - v.speed) / dt
            v.speed = speed
            v.position += speed * dt

        state.step_index += 1
        state.clock = round(state.step_index * dt, 9)

        ramp_end = self.geometry.ramp_length
        for v in state.ramp:
            if v.position > ramp_end:
                gap = ramp_end - v.position
                state.log_event("ramp-overrun", v.id, f"{-gap:.3f} m past the ramp end")
                log.error("%s ran %.3f m past the ramp end at t=%.1f", v.id, -gap, state.clock)
                raise CollisionError(state.clock, v.id, "ramp-end", gap, list(state.events))

        for vid, track in list(state.playback.items()):
            v = next(x for x in state.mainline if x.id == vid)
            if state.clock > track.end_time:
                del state.playback[vid]
                state.log_event("replay-released", vid, "recording ended")
                continue
            v.position, v.speed, v.accel = track.at(state.clock)

    def _change_lanes(self, state: SimState):
        geom = self.geometry
        for v in list(state.ramp):
            if segment_of(v.position, geom) != RampSegment.R3:
                continue
            crit = self.forced_criteria if v.id in state.failed else self.criteria
            check = merge_eligible(v, state.mainline, crit, geom)
            v.lane_change_ready = check.eligible
            if check:
                self._merge(state, v, check)
            elif (
                v.id not in state.failed
                and v.speed < STOPPED_SPEED
                and geom.ramp_length - v.position < self.main_params.s_min + STOP_ZONE
            ):
                state.failed.add(v.id)
                state.log_event("merge-failure", v.id, "stopped at the ramp end")
                log.debug("%s stopped at the ramp end at t=%.1f", v.id, state.clock)

    def _merge(self, state: SimState, v: VehicleState, check: MergeCheck):
        state.ramp.remove(v)
        v.road = Road.MAINLINE
        v.position = check.virtual_position
        v.lane_change_ready = False
        _insert_ordered(state.mainline, v)
        state.merge_speeds.append(v.speed)
        state.log_event(
            "merge",
            v.id,
            f"speed={v.speed:.2f} leader={check.leader_id} follower={check.follower_id}",
        )
        log.debug("%s merged at x=%.1f, %.2f m/s", v.id, v.position, v.speed)

    def _accrue_fuel(self, state: SimState):
        dt = self.config.dt
        fm = self.config.fuel
        for v in state.vehicles:
            state.fuel[v.id] = state.fuel.get(v.id, 0.0) + fuel_rate(v.speed, v.accel, fm) * dt

    def _remove_exited(self, state: SimState):
        end = self.geometry.mainline_length
        while state.mainline and state.mainline[0].position > end:
            v = state.mainline.pop(0)
            state.playback.pop(v.id, None)
            state.exited += 1

    def _check_overlaps(self, state: SimState):
        for lane in (state.mainline, state.ramp):
            for leader, follower in zip(lane, lane[1:]):
                # Recorded vehicles keep their recorded spacing
                if leader.id in state.playback and follower.id in state.playback:
                    continue
                gap = leader.rear - follower.position
                if gap <= 0:
                    state.log_event("collision", follower.id, f"with {leader.id}")
                    log.error(
                        "collision at t=%.1f: %s ran into %s (gap %.3f m)",
                        state.clock,
                        follower.id,
                        leader.id,
                        gap,
                    )
                    raise CollisionError(
                        state.clock, follower.id, leader.id, gap, list(state.events)
                    )

    def _sample(self, state: SimState):
        on_cadence = state.step_index % self.config.steps_per_guidance == 0
        if state.trajectories is not None and on_cadence:
            for v in state.vehicles:
                x = v.position
                if v.road == Road.RAMP:
                    x = virtual_position(v.position, self.geometry)
                state.trajectories.setdefault(v.id, []).append((state.clock, x, v.speed))
        if state.step_index % self._occupancy_every == 0:
            state.ramp_occupancy.append(len(state.ramp) + len(state.ramp_queue))

    def result(self, state: SimState) -> SimResult:
        speeds = np.array(state.merge_speeds)
        stats = {}
        if speeds.size:
            p5, p95 = np.percentile(speeds, [5, 95])
            stats = dict(
                merge_speed_mean=float(speeds.mean()),
                merge_speed_p5=float(p5),
                merge_speed_p95=float(p95),
            )
        return SimResult(
            seed=self.config.seed,
            total_fuel=float(sum(state.fuel.values())),
            vehicle_fuel=dict(state.fuel),
            merge_count=len(state.merge_speeds),
            merge_failures=len(state.failed),
            spawned=state.spawned,
            exited=state.exited,
            present=state.present,
            queued=state.queued,
            ramp_occupancy=list(state.ramp_occupancy),
            trajectories=state.trajectories or {},
            commands=list(state.commands),
            events=list(state.events),
            **stats,
        )

    def run(self, record_trajectories: bool = True) -> SimResult:
        cfg = self.config
        log.info(
            "scenario seed=%d mainline=%.0f ramp=%.0f veh/hr guidance=%s cooperative=%s",
            cfg.seed,
            cfg.mainline_flow,
            cfg.ramp_flow,
            cfg.guidance_enabled,
            cfg.cooperative,
        )
        state = self.initial_state(record_trajectories)
        for _ in range(cfg.n_steps):
            self.step(state)
        result = self.result(state)
        log.info(
            "seed=%d finished: fuel=%.3f L merges=%d failures=%d queued=%d",
            cfg.seed,
            result.total_fuel,
            result.merge_count,
            result.merge_failures,
            result.queued,
        )
        return result


@lru_cache(maxsize=8)
def _simulation(cfg: ScenarioConfig) -> Simulation:
    return Simulation(cfg)


def initial_state(cfg: ScenarioConfig, record_trajectories: bool = True) -> SimState:
    return _simulation(cfg).initial_state(record_trajectories)


def step(state: SimState, cfg: ScenarioConfig) -> SimState:
    """Advance ``state`` by one step of ``cfg.dt``; the state is updated in place and returned."""
    return _simulation(cfg).step(state)


def run_scenario(cfg: ScenarioConfig, record_trajectories: bool = True) -> SimResult:
    return Simulation(cfg).run(record_trajectories)
