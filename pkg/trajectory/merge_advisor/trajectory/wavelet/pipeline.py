"""
Decompose, quantify, reconstruct: wavelet denoising of a sampled trajectory.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from merge_advisor.utils import get_logger

from .config import WaveletPipelineConfig
from .threshold import noise_sigma, shrink, threshold_level
from .transform import WaveletCoeffs, dwt, idwt

log = get_logger(__name__)


@dataclass
class ThresholdReport:
    sigma: float
    thresholds: List[float]
    n: int


def quantify(coeffs: WaveletCoeffs, cfg: WaveletPipelineConfig):
    """Shrink every detail band with its level threshold; the approximation band is left alone."""
    sigma = noise_sigma(coeffs.details[0])
    n = coeffs.n_original
    J = coeffs.levels
    out = coeffs.copy()
    thresholds = []
    for j in range(1, J + 1):
        t = threshold_level(j, J, sigma, n, cfg.rule)
        thresholds.append(t)
        out.details[j - 1] = shrink(coeffs.details[j - 1], t, cfg.alpha)
    return out, ThresholdReport(sigma=sigma, thresholds=thresholds, n=n)


def _denoise_block(x: np.ndarray, cfg: WaveletPipelineConfig) -> np.ndarray:
    coeffs = dwt(x, cfg)
    quantified, report = quantify(coeffs, cfg)
    log.debug(
        "denoised %d samples: sigma=%.4g thresholds=%s",
        report.n,
        report.sigma,
        ", ".join(f"{t:.4g}" for t in report.thresholds),
    )
    return idwt(quantified, cfg)


def _windows(n: int, window: int, minimum: int):
    bounds = list(range(0, n, window)) + [n]
    # A short trailing block is merged into the one before it
    if len(bounds) > 2 and bounds[-1] - bounds[-2] < minimum:
        bounds.pop(-2)
    return list(zip(bounds[:-1], bounds[1:]))


def denoise(noisy, cfg: WaveletPipelineConfig = WaveletPipelineConfig()) -> np.ndarray:
    x = np.asarray(noisy, dtype=float)
    if cfg.window is None or cfg.window >= len(x):
        return _denoise_block(x, cfg)
    out = np.empty_like(x)
    for start, stop in _windows(len(x), cfg.window, 2**cfg.levels):
        out[start:stop] = _denoise_block(x[start:stop], cfg)
    return out
