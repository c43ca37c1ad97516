"""
Scenario description.

Scenario files are JSON with ``geometry``, ``idm``, ``fuel``, ``flows``,
``flags`` and ``timing`` sections plus ``seed`` and the optional
``r2_entry_speed``, ``cav_penetration`` and ``mainline_replay`` keys. The flat
field names below are accepted as well.
"""
import json
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..fuel import FuelModel
from ..idm import IdmParams
from ..road import RampGeometry

# One-second headway: a lane carries about 2500 veh/hr, so 2000 veh/hr runs free
SCENARIO_IDM = IdmParams(t_s=1.0)

_SECTIONS = {
    "flows": {"mainline": "mainline_flow", "ramp": "ramp_flow"},
    "flags": {
        "cooperative": "cooperative",
        "guidance": "guidance_enabled",
        "require_follower_gap": "require_follower_gap",
    },
    "timing": {
        "duration": "duration",
        "warmup": "warmup",
        "dt": "dt",
        "guidance_interval": "guidance_interval",
    },
}


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    geometry: RampGeometry = RampGeometry()
    idm: IdmParams = SCENARIO_IDM
    fuel: FuelModel = FuelModel()
    # veh/hr/ln
    mainline_flow: float = Field(2000.0, ge=0)
    ramp_flow: float = Field(300.0, ge=0)
    cooperative: bool = False
    guidance_enabled: bool = True
    require_follower_gap: bool = True
    # seconds
    duration: float = Field(4200.0, gt=0)
    warmup: float = Field(600.0, ge=0)
    dt: float = Field(0.1, gt=0)
    guidance_interval: float = Field(1.0, gt=0)
    seed: int = Field(0, ge=0)
    r2_entry_speed: Optional[float] = Field(None, gt=0)
    cav_penetration: float = Field(1.0, ge=0, le=1)
    vehicle_length: float = Field(5.0, gt=0)
    mainline_replay: Optional[Path] = None

    @model_validator(mode="before")
    @classmethod
    def flatten_sections(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for section, names in _SECTIONS.items():
            values = data.pop(section, None)
            if values is None:
                continue
            unknown = set(values) - set(names)
            if unknown:
                raise ValueError(f"unknown keys in '{section}': {', '.join(sorted(unknown))}")
            for key, value in values.items():
                data[names[key]] = value
        return data

    @model_validator(mode="after")
    def consistent_timing(self):
        steps = round(self.guidance_interval / self.dt)
        if steps < 1 or abs(steps * self.dt - self.guidance_interval) > 1e-9:
            raise ValueError("dt must divide the guidance interval")
        if self.duration < self.warmup:
            raise ValueError("duration must not be shorter than the warmup")
        if self.r2_entry_speed is not None and self.r2_entry_speed > self.geometry.speed_limit_r1:
            raise ValueError("r2_entry_speed exceeds the R1 speed limit")
        return self

    @property
    def steps_per_guidance(self) -> int:
        return round(self.guidance_interval / self.dt)

    @property
    def n_steps(self) -> int:
        return round(self.duration / self.dt)

    @property
    def r1_speed(self) -> float:
        """Desired speed in R1, which is also the speed at which vehicles reach R2."""
        if self.r2_entry_speed is not None:
            return self.r2_entry_speed
        return self.geometry.speed_limit_r1

    @property
    def main_params(self) -> IdmParams:
        return self.idm.with_speed_limit(self.geometry.speed_limit_main)

    @property
    def r1_params(self) -> IdmParams:
        return self.idm.with_speed_limit(self.r1_speed)

    def with_updates(self, **changes) -> "ScenarioConfig":
        """Copy with some fields replaced.

        ``r2_length`` and ``r3_length`` reach into the geometry.
        """
        geometry = {}
        for axis, name in (("r2_length", "len_r2"), ("r3_length", "len_r3")):
            if axis in changes:
                geometry[name] = changes.pop(axis)
        data = self.model_dump()
        data.update(changes)
        if geometry:
            data["geometry"] = {**data["geometry"], **geometry}
        return ScenarioConfig.model_validate(data)


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    data = json.loads(path.read_text())
    cfg = ScenarioConfig.model_validate(data)
    if cfg.mainline_replay is not None and not cfg.mainline_replay.is_absolute():
        cfg = cfg.model_copy(update={"mainline_replay": path.parent / cfg.mainline_replay})
    return cfg
