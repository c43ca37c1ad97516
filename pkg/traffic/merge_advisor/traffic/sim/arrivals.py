"""
Vehicle arrivals at the upstream ends of the mainline and the ramp.
"""
from functools import lru_cache
from math import sqrt
from typing import Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from merge_advisor.utils import DomainError, get_logger

from ..idm import IdmParams, equilibrium_gap

log = get_logger(__name__)


def spawn_arrivals(
    rng: np.random.Generator, flow: float, dt: float, size: Optional[int] = None
):
    """Poisson number of arrivals in one step of ``dt`` seconds at ``flow`` veh/hr.

    With ``size`` an array of that many independent step counts is drawn.
    """
    if flow < 0:
        raise DomainError(f"Negative flow {flow:g} veh/hr")
    if flow == 0:
        return 0 if size is None else np.zeros(size, dtype=int)
    counts = rng.poisson(flow * dt / 3600.0, size)
    return int(counts) if size is None else counts


def steady_flow(v: float, p: IdmParams, length: float) -> float:
    """Flow in veh/hr of a homogeneous stream at equilibrium speed v."""
    return 3600.0 * v / (equilibrium_gap(v, p) + length)


def _upper_speed(p: IdmParams) -> float:
    return p.v_max * (1 - 1e-9)


@lru_cache(maxsize=None)
def lane_capacity(p: IdmParams, length: float):
    """(capacity veh/hr, speed at capacity m/s) of a homogeneous IDM stream."""
    res = minimize_scalar(
        lambda v: -steady_flow(v, p, length),
        bounds=(0.0, _upper_speed(p)),
        method="bounded",
        options={"xatol": 1e-8},
    )
    return -float(res.fun), float(res.x)


@lru_cache(maxsize=None)
def equilibrium_speed_for_flow(flow: float, p: IdmParams, length: float) -> float:
    """Free-flow equilibrium speed carrying ``flow`` veh/hr, found by bisection.

    Flows at or above capacity get the speed at capacity.
    """
    if flow < 0:
        raise DomainError(f"Negative flow {flow:g} veh/hr")
    if flow == 0:
        return p.v_max
    capacity, v_cap = lane_capacity(p, length)
    v_top = _upper_speed(p)
    if flow <= steady_flow(v_top, p, length):
        return v_top
    if flow >= capacity:
        log.warning(
            "flow of %.0f veh/hr exceeds lane capacity %.0f veh/hr; inserting at %.2f m/s",
            flow,
            capacity,
            v_cap,
        )
        return v_cap
    return float(
        bisect(
            lambda v: steady_flow(v, p, length) - flow,
            v_cap,
            v_top,
            xtol=1e-10,
        )
    )


def insertion_speed(
    desired: float, gap: Optional[float], leader_speed: float, p: IdmParams
) -> float:
    """Speed for a vehicle entering with bumper gap ``gap`` behind a vehicle at ``leader_speed``.

    ``gap`` is None on an empty road.
    """
    if gap is None:
        return desired
    room = max(gap - p.s_min, 0.0)
    return min(desired, sqrt(leader_speed**2 + 2.0 * p.b_n * room))
