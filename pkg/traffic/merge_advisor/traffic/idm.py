"""
Intelligent driver model.

    a  = a_m * [1 - (v / v_max)**delta - (s* / s)**2]
    s* = s_min + t_s * v + v * dv / (2 * sqrt(a_m * b_n))

where dv is the closing speed (ego minus leader). s* is clamped at zero and
the acceleration at [-b_hard, a_m].
"""
from math import sqrt

from pydantic import BaseModel, ConfigDict, Field, model_validator

from merge_advisor.utils import DomainError


class IdmParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a_m: float = Field(1.5, gt=0, description="maximum acceleration, m/s2")
    b_n: float = Field(2.0, gt=0, description="desired deceleration, m/s2")
    v_max: float = Field(33.33, gt=0, description="desired speed, m/s")
    s_min: float = Field(2.0, gt=0, description="minimum spacing, m")
    t_s: float = Field(1.5, ge=0, description="desired time headway, s")
    delta: float = Field(4.0, gt=0, description="free-drive exponent")
    b_hard: float = Field(6.0, gt=0, description="physical braking limit, m/s2")

    @model_validator(mode="after")
    def braking_limit(self):
        if self.b_hard < self.b_n:
            raise ValueError("b_hard must be at least the desired deceleration b_n")
        return self

    def with_speed_limit(self, v_max: float) -> "IdmParams":
        if v_max == self.v_max:
            return self
        return self.model_copy(update={"v_max": v_max})


def _clamp(a: float, p: IdmParams) -> float:
    return min(max(a, -p.b_hard), p.a_m)


def desired_gap(v: float, dv: float, p: IdmParams) -> float:
    if v < 0:
        raise DomainError(f"Negative speed {v:g} m/s")
    s_star = p.s_min + p.t_s * v + v * dv / (2.0 * sqrt(p.a_m * p.b_n))
    return max(s_star, 0.0)


def free_acceleration(v: float, p: IdmParams) -> float:
    if v < 0:
        raise DomainError(f"Negative speed {v:g} m/s")
    return _clamp(p.a_m * (1.0 - (v / p.v_max) ** p.delta), p)


def acceleration(v: float, s: float, dv: float, p: IdmParams) -> float:
    if s <= 0:
        raise DomainError(f"Bumper gap {s:g} m is not positive")
    interaction = (desired_gap(v, dv, p) / s) ** 2
    return _clamp(p.a_m * (1.0 - (v / p.v_max) ** p.delta - interaction), p)


def equilibrium_gap(v: float, p: IdmParams) -> float:
    """Gap at which a follower at the leader's speed v neither accelerates nor brakes."""
    if not 0 <= v < p.v_max:
        raise DomainError(f"No finite equilibrium gap at {v:g} m/s (v_max {p.v_max:g})")
    return desired_gap(v, 0.0, p) / sqrt(1.0 - (v / p.v_max) ** p.delta)
