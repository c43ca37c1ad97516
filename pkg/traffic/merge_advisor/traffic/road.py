"""
Merging-area geometry: a single-lane mainline and an on-ramp made of a
low-speed curve (R1), an acceleration stretch (R2) and the lane-change zone
(R3). Ramp positions are arc lengths from the ramp origin; the downstream
end of R3 (the nose) coincides with ``merge_point_x`` on the mainline.
"""
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from merge_advisor.utils import DomainError


class RampSegment(str, Enum):
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"


class RampGeometry(BaseModel):
    model_config = ConfigDict(frozen=True)

    len_r1: float = Field(60.0, gt=0)
    len_r2: float = Field(100.0, gt=0)
    len_r3: float = Field(150.0, gt=0)
    merge_point_x: float = Field(600.0, gt=0)
    mainline_length: float = Field(1000.0, gt=0)
    speed_limit_r1: float = Field(11.11, gt=0)
    speed_limit_main: float = Field(33.33, gt=0)

    @model_validator(mode="after")
    def consistent_layout(self):
        if self.merge_point_x > self.mainline_length:
            raise ValueError("merge point lies beyond the end of the mainline")
        if self.ramp_length > self.merge_point_x:
            raise ValueError("the ramp is longer than the mainline upstream of the merge point")
        if self.speed_limit_r1 >= self.speed_limit_main:
            raise ValueError("the R1 speed limit must be lower than the mainline limit")
        return self

    @property
    def ramp_length(self) -> float:
        return self.len_r1 + self.len_r2 + self.len_r3

    @property
    def r2_start(self) -> float:
        return self.len_r1

    @property
    def r3_start(self) -> float:
        return self.len_r1 + self.len_r2


def _check_ramp_position(ramp_pos: float, geom: RampGeometry):
    if not 0 <= ramp_pos <= geom.ramp_length:
        raise DomainError(
            f"Ramp position {ramp_pos:g} m outside [0, {geom.ramp_length:g}] m"
        )


def segment_of(ramp_pos: float, geom: RampGeometry) -> RampSegment:
    """Half-open segments [start, end); R3 is closed at the ramp end."""
    _check_ramp_position(ramp_pos, geom)
    if ramp_pos < geom.r2_start:
        return RampSegment.R1
    if ramp_pos < geom.r3_start:
        return RampSegment.R2
    return RampSegment.R3


def virtual_position(ramp_pos: float, geom: RampGeometry) -> float:
    """Mainline coordinate of a ramp position, aligned by arc length at the nose."""
    _check_ramp_position(ramp_pos, geom)
    return geom.merge_point_x - (geom.ramp_length - ramp_pos)
