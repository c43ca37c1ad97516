"""
Power-demand fuel model.

Tractive power P = m*a*v + (c_r*m*g + 0.5*rho*CdA*v**2) * v; the engine burns
an idle rate plus the positive part of P converted at drivetrain efficiency.
"""
from pydantic import BaseModel, ConfigDict, Field

from merge_advisor.utils import DomainError

GRAVITY = 9.81


class FuelModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    idle_rate: float = Field(0.00015, gt=0, description="L/s")
    efficiency: float = Field(0.30, gt=0, le=1)
    mass: float = Field(1500.0, gt=0, description="kg")
    rolling_resistance: float = Field(0.012, gt=0)
    drag_area: float = Field(0.7, gt=0, description="Cd*A, m2")
    air_density: float = Field(1.2, gt=0, description="kg/m3")
    energy_density: float = Field(34.2e6, gt=0, description="J/L")


def tractive_power(v: float, a: float, fm: FuelModel) -> float:
    resistance = (
        fm.rolling_resistance * fm.mass * GRAVITY
        + 0.5 * fm.air_density * fm.drag_area * v * v
    )
    return fm.mass * a * v + resistance * v


def fuel_rate(v: float, a: float, fm: FuelModel = FuelModel()) -> float:
    """Fuel rate in L/s; never below the idle rate."""
    if v < 0:
        raise DomainError(f"Negative speed {v:g} m/s")
    power = tractive_power(v, a, fm)
    return fm.idle_rate + max(power, 0.0) / (fm.efficiency * fm.energy_density)
