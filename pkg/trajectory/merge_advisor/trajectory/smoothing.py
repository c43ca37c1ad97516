"""
Linear smoothers used as baselines for the wavelet pipeline.
"""
import numpy as np
from scipy.signal import lfilter

from merge_advisor.utils import DomainError


def moving_average(x, window: int = 5) -> np.ndarray:
    """Centred moving average; the window shrinks at the edges so the length is kept."""
    if window < 1 or window % 2 == 0:
        raise DomainError("Moving-average window must be a positive odd number")
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    if window > x.size:
        window = x.size if x.size % 2 else x.size - 1
    kernel = np.ones(window)
    sums = np.convolve(x, kernel, mode="same")
    counts = np.convolve(np.ones_like(x), kernel, mode="same")
    return sums / counts


def exponential_smoothing(x, alpha: float = 0.3) -> np.ndarray:
    """s_0 = x_0, s_i = alpha * x_i + (1 - alpha) * s_(i-1)."""
    if not 0 < alpha <= 1:
        raise DomainError("Smoothing factor must lie in (0, 1]")
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    y, _ = lfilter([alpha], [1.0, alpha - 1.0], x, zi=[(1.0 - alpha) * x[0]])
    return y
