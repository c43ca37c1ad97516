from dataclasses import dataclass
from enum import Enum

from merge_advisor.utils import DomainError

DEFAULT_LENGTH = 5.0


class Road(str, Enum):
    MAINLINE = "mainline"
    RAMP = "ramp"


@dataclass(slots=True)
class VehicleState:
    """Kinematic state of one vehicle.

    ``position`` is the front bumper, in mainline coordinates on the mainline and
    in ramp arc length on the ramp; the body occupies [position - length, position].
    Only the simulation engine mutates vehicles; the controller reads them.
    """

    id: str
    road: Road
    position: float
    speed: float
    accel: float = 0.0
    length: float = DEFAULT_LENGTH
    is_cav: bool = True
    lane_change_ready: bool = False

    def __post_init__(self):
        if self.speed < 0:
            raise DomainError(f"Vehicle {self.id} has negative speed {self.speed:g} m/s")
        if self.length <= 0:
            raise DomainError(f"Vehicle {self.id} has non-positive length")

    @property
    def rear(self) -> float:
        return self.position - self.length

    @property
    def on_ramp(self) -> bool:
        return self.road == Road.RAMP

