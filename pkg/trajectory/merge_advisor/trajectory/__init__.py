"""
Trajectory ingestion, synthetic noise, wavelet denoising and quality metrics.
"""
from .metrics import rmse, rmse_values, speed_profile, speed_rmse
from .noise import NoiseSpec, inject_noise, inject_noise_all
from .records import (
    TrajectoryRecord,
    parse_trajectory_csv,
    read_trajectories,
    write_trajectories,
    write_trajectory_csv,
)
from .restore import Smoother, denoise_record, smooth_record
from .smoothing import exponential_smoothing, moving_average
from .wavelet import WaveletPipelineConfig, denoise
