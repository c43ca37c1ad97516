from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .filters import WaveletBasis, get_basis
from .threshold import RuleAssignment


class WaveletPipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    basis: str = "db3"
    levels: int = Field(3, ge=1)
    alpha: float = Field(0.5, ge=0.0, le=1.0)
    rule: RuleAssignment = RuleAssignment.SQRT_FINEST
    # Samples per batch window; None denoises the whole series at once.
    window: Optional[int] = Field(None, ge=2)

    @field_validator("basis")
    @classmethod
    def known_basis(cls, value: str) -> str:
        get_basis(value)
        return value.lower()

    @model_validator(mode="after")
    def window_fits_levels(self):
        if self.window is not None and self.window < 2**self.levels:
            raise ValueError(
                f"window of {self.window} samples is too short for {self.levels} levels"
            )
        return self

    @property
    def wavelet(self) -> WaveletBasis:
        return get_basis(self.basis)
