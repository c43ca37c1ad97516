"""
Road geometry, car-following, merge guidance and fuel accounting for a
single-lane highway with one on-ramp.
"""
from .fuel import FuelModel, fuel_rate, tractive_power
from .guidance import (
    GUIDANCE_INTERVAL,
    GuidanceCommand,
    MergeCheck,
    MergeCriteria,
    VehicleGroups,
    classify_vehicles,
    compute_guidance,
    find_follower,
    find_leader,
    merge_eligible,
    select_target,
)
from .idm import (
    IdmParams,
    acceleration,
    desired_gap,
    equilibrium_gap,
    free_acceleration,
)
from .road import RampGeometry, RampSegment, segment_of, virtual_position
from .vehicles import Road, VehicleState
