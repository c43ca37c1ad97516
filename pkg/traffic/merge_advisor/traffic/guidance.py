"""
Per-step merge controller.

Ramp vehicles are grouped by segment, the leading R3 vehicle that cannot yet
change lanes (or else the leading R2 vehicle) becomes the target, and the
target is mapped onto the mainline as a virtual vehicle so that its speed
guidance reduces to car-following behind the nearest mainline vehicle.
Mainline vehicles never receive commands.
"""
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

from pydantic import BaseModel, ConfigDict

from merge_advisor.utils import DomainError, get_logger

from .idm import IdmParams, acceleration, desired_gap, free_acceleration
from .road import RampGeometry, RampSegment, segment_of, virtual_position
from .vehicles import Road, VehicleState

log = get_logger(__name__)

GUIDANCE_INTERVAL = 1.0


@dataclass(frozen=True)
class GuidanceCommand:
    target_id: str
    recommended_accel: float
    recommended_speed: float
    leader_id: Optional[str]
    issued_at: float
    overlap: bool = False


class MergeCriteria(BaseModel):
    """IDM parameters of the merging vehicle and of the mainline vehicle it would cut in front of.

    With ``require_follower_gap`` off only the merging vehicle's own gap is
    judged against the IDM; the follower then just needs its minimum spacing
    plus the distance to shed its closing speed at the comfortable deceleration.
    """

    model_config = ConfigDict(frozen=True)

    ego: IdmParams = IdmParams()
    follower: IdmParams = IdmParams()
    require_follower_gap: bool = True


@dataclass(frozen=True)
class MergeCheck:
    eligible: bool
    virtual_position: float
    leader_id: Optional[str] = None
    leader_gap: Optional[float] = None
    required_leader_gap: Optional[float] = None
    follower_id: Optional[str] = None
    follower_gap: Optional[float] = None
    required_follower_gap: Optional[float] = None

    def __bool__(self):
        return self.eligible


@dataclass
class VehicleGroups:
    """Vehicles by location, each list leading vehicle first."""

    r1: List[VehicleState] = field(default_factory=list)
    r2: List[VehicleState] = field(default_factory=list)
    r3: List[VehicleState] = field(default_factory=list)
    mainline: List[VehicleState] = field(default_factory=list)

    def group(self, segment: RampSegment) -> List[VehicleState]:
        return {
            RampSegment.R1: self.r1,
            RampSegment.R2: self.r2,
            RampSegment.R3: self.r3,
        }[segment]

    def find(self, vehicle_id: str) -> Optional[VehicleState]:
        for vehicles in (self.r3, self.r2, self.r1, self.mainline):
            for v in vehicles:
                if v.id == vehicle_id:
                    return v
        return None


def _leading_first(v: VehicleState):
    return (-v.position, v.id)


def classify_vehicles(snapshot: Iterable[VehicleState], geom: RampGeometry) -> VehicleGroups:
    groups = VehicleGroups()
    for v in snapshot:
        if v.road == Road.MAINLINE:
            groups.mainline.append(v)
        else:
            groups.group(segment_of(v.position, geom)).append(v)
    for vehicles in (groups.r1, groups.r2, groups.r3, groups.mainline):
        vehicles.sort(key=_leading_first)
    return groups


def find_leader(mainline: Iterable[VehicleState], x: float) -> Optional[VehicleState]:
    """Nearest mainline vehicle whose front is strictly ahead of x."""
    best = None
    for v in mainline:
        d = v.position - x
        if d > 0 and (best is None or d < best.position - x):
            best = v
    return best


def find_follower(mainline: Iterable[VehicleState], x: float) -> Optional[VehicleState]:
    """Nearest mainline vehicle whose front is at or behind x."""
    best = None
    for v in mainline:
        d = x - v.position
        if d >= 0 and (best is None or d < x - best.position):
            best = v
    return best


def merge_eligible(
    ego: VehicleState,
    mainline: List[VehicleState],
    crit: MergeCriteria,
    geom: RampGeometry,
) -> MergeCheck:
    if ego.road != Road.RAMP or segment_of(ego.position, geom) != RampSegment.R3:
        raise DomainError(f"Vehicle {ego.id} is not in the lane-change zone")
    x = virtual_position(ego.position, geom)
    eligible = True
    info = {}

    leader = find_leader(mainline, x)
    if leader is not None:
        gap = leader.rear - x
        required = desired_gap(ego.speed, ego.speed - leader.speed, crit.ego)
        eligible &= gap > 0 and gap >= required
        info.update(leader_id=leader.id, leader_gap=gap, required_leader_gap=required)

    follower = find_follower(mainline, x)
    if follower is not None:
        gap = x - ego.length - follower.position
        if crit.require_follower_gap:
            required = desired_gap(
                follower.speed, follower.speed - ego.speed, crit.follower
            )
        else:
            closing = max(follower.speed - ego.speed, 0.0)
            required = crit.follower.s_min + closing**2 / (2 * crit.follower.b_n)
        eligible &= gap > 0 and gap >= required
        info.update(
            follower_id=follower.id, follower_gap=gap, required_follower_gap=required
        )

    return MergeCheck(eligible=bool(eligible), virtual_position=x, **info)


def select_target(groups: VehicleGroups) -> Optional[str]:
    for v in groups.r3:
        if not v.lane_change_ready:
            return v.id
    if groups.r2:
        return groups.r2[0].id
    return None


def compute_guidance(
    target: VehicleState,
    mainline: List[VehicleState],
    geom: RampGeometry,
    p: IdmParams,
    now: float,
    interval: float = GUIDANCE_INTERVAL,
) -> GuidanceCommand:
    if target.road != Road.RAMP:
        raise DomainError(f"Mainline vehicle {target.id} cannot be a guidance target")
    if segment_of(target.position, geom) == RampSegment.R1:
        raise DomainError(f"Vehicle {target.id} is still in R1")

    x = virtual_position(target.position, geom)
    leader = find_leader(mainline, x)
    overlap = False
    if leader is None:
        accel = free_acceleration(target.speed, p)
    else:
        gap = leader.rear - x
        if gap <= 0:
            log.debug("virtual vehicle %s overlaps %s (gap %.2f m)", target.id, leader.id, gap)
            accel = -p.b_hard
            overlap = True
        else:
            accel = acceleration(target.speed, gap, target.speed - leader.speed, p)

    speed = min(max(target.speed + accel * interval, 0.0), p.v_max)
    return GuidanceCommand(
        target_id=target.id,
        recommended_accel=accel,
        recommended_speed=speed,
        leader_id=None if leader is None else leader.id,
        issued_at=now,
        overlap=overlap,
    )
