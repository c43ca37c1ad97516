"""
Denoising evaluation on synthetic ground truth.

Each trial takes a smooth IDM follower trajectory as the truth, adds
measurement noise and compares the wavelet pipeline against the linear
smoothers on positional and speed-profile RMSE.
"""
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict

from merge_advisor.traffic.sim import random_platoon_truth
from merge_advisor.trajectory import (
    NoiseSpec,
    Smoother,
    WaveletPipelineConfig,
    inject_noise,
    rmse,
    smooth_record,
    speed_rmse,
)
from merge_advisor.utils import DomainError, get_logger

log = get_logger(__name__)


class DenoisingTrial(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    noisy_rmse: float
    wavelet_rmse: float
    moving_average_rmse: float
    exponential_rmse: float
    noisy_speed_rmse: float
    wavelet_speed_rmse: float

    @property
    def reduction(self) -> float:
        if self.noisy_rmse == 0:
            return 0.0 if self.wavelet_rmse == 0 else float("-inf")
        return 1.0 - self.wavelet_rmse / self.noisy_rmse


class DenoisingReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: List[DenoisingTrial]

    @property
    def improved(self) -> int:
        return sum(t.wavelet_rmse < t.noisy_rmse for t in self.trials)

    @property
    def mean_reduction(self) -> float:
        return float(np.mean([t.reduction for t in self.trials]))

    def mean(self, field: str) -> float:
        return float(np.mean([getattr(t, field) for t in self.trials]))


def evaluate_denoising(
    trials: int = 100,
    noise: NoiseSpec = NoiseSpec(),
    cfg: WaveletPipelineConfig = WaveletPipelineConfig(),
    length: int = 256,
    dt: float = 1.0,
    *,
    seed: int = 0,
    window: int = 5,
    alpha: float = 0.3,
) -> DenoisingReport:
    if trials < 1:
        raise DomainError("At least one trial is required")
    log.debug("Denoising evaluation: %d trials, %s, %s", trials, noise, cfg)
    results = []
    for i in range(trials):
        truth = random_platoon_truth(seed + i, samples=length, dt=dt)
        noisy = inject_noise(truth, noise.model_copy(update={"seed": noise.seed + i}))
        wavelet = smooth_record(noisy, Smoother.WAVELET, cfg)
        results.append(
            DenoisingTrial(
                seed=seed + i,
                noisy_rmse=rmse(truth, noisy),
                wavelet_rmse=rmse(truth, wavelet),
                moving_average_rmse=rmse(
                    truth, smooth_record(noisy, Smoother.MOVING_AVERAGE, window=window)
                ),
                exponential_rmse=rmse(
                    truth, smooth_record(noisy, Smoother.EXPONENTIAL, alpha=alpha)
                ),
                noisy_speed_rmse=speed_rmse(truth, noisy),
                wavelet_speed_rmse=speed_rmse(truth, wavelet),
            )
        )
    report = DenoisingReport(trials=results)
    log.info(
        "Wavelet pipeline improved %d/%d trials, mean reduction %.3f",
        report.improved,
        trials,
        report.mean_reduction,
    )
    return report
