"""
Restore trajectories and speed profiles from noisy position records.
"""
from enum import Enum

from .metrics import speed_profile
from .records import TrajectoryRecord
from .smoothing import exponential_smoothing, moving_average
from .wavelet import WaveletPipelineConfig, denoise


class Smoother(str, Enum):
    WAVELET = "wavelet"
    MOVING_AVERAGE = "moving-average"
    EXPONENTIAL = "exponential"


def _with_speed_profile(rec: TrajectoryRecord, positions) -> TrajectoryRecord:
    smoothed = rec.with_positions(positions)
    if len(smoothed) < 2:
        return smoothed
    return smoothed.with_positions(positions, speed_profile(smoothed))


def denoise_record(
    rec: TrajectoryRecord, cfg: WaveletPipelineConfig = WaveletPipelineConfig()
) -> TrajectoryRecord:
    """Denoised positions plus the finite-difference speed profile they imply."""
    return _with_speed_profile(rec, denoise(rec.positions, cfg))


def smooth_record(
    rec: TrajectoryRecord,
    method: Smoother,
    cfg: WaveletPipelineConfig = WaveletPipelineConfig(),
    window: int = 5,
    alpha: float = 0.3,
) -> TrajectoryRecord:
    method = Smoother(method)
    if method == Smoother.WAVELET:
        return denoise_record(rec, cfg)
    if method == Smoother.MOVING_AVERAGE:
        return _with_speed_profile(rec, moving_average(rec.positions, window))
    return _with_speed_profile(rec, exponential_smoothing(rec.positions, alpha))
