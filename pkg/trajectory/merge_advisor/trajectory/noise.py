"""
Synthetic measurement noise for trajectory records: Gaussian jitter from
box vibration plus occasional impulses from misplaced detections.
"""
from typing import Iterable, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .records import TrajectoryRecord


class NoiseSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(1.0, ge=0.0)
    impulse_probability: float = Field(0.0, ge=0.0, le=1.0)
    impulse_magnitude: float = Field(0.0, ge=0.0)
    seed: int = 0


def inject_noise(rec: TrajectoryRecord, spec: NoiseSpec) -> TrajectoryRecord:
    rng = np.random.default_rng(spec.seed)
    n = len(rec)
    jitter = rng.normal(0.0, spec.sigma, n) if spec.sigma > 0 else np.zeros(n)
    hits = rng.random(n) < spec.impulse_probability
    signs = rng.choice([-1.0, 1.0], size=n)
    impulses = np.where(hits, signs * spec.impulse_magnitude, 0.0)
    return rec.with_positions(rec.positions + jitter + impulses, rec.speeds)


def inject_noise_all(
    records: Iterable[TrajectoryRecord], spec: NoiseSpec
) -> List[TrajectoryRecord]:
    """Noise every record with its own stream (seed offset by the record index)."""
    return [
        inject_noise(rec, spec.model_copy(update={"seed": spec.seed + i}))
        for i, rec in enumerate(records)
    ]
