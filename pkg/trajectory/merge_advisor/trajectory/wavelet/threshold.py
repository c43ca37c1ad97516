"""
Level-dependent threshold quantification of detail coefficients.
"""
from enum import Enum
from math import log, sqrt

import numpy as np

from merge_advisor.utils import DomainError

MAD_NORMALIZER = 0.6745


class RuleAssignment(str, Enum):
    """Which levels use the sqrt(j) threshold; the others use ln(j + 1).

    SQRT_FINEST: sqrt(j) rule on d_1, ln(j + 1) rule on d_2 .. d_J.
    SQRT_COARSEST: sqrt(j) rule on d_J, ln(j + 1) rule on d_1 .. d_(J-1).
    """

    SQRT_FINEST = "sqrt-finest"
    SQRT_COARSEST = "sqrt-coarsest"


def noise_sigma(finest_detail) -> float:
    """Robust noise scale median(|w|) / 0.6745."""
    w = np.abs(np.asarray(finest_detail, dtype=float))
    if w.size == 0:
        raise DomainError("Cannot estimate noise from an empty coefficient band")
    return float(np.median(w)) / MAD_NORMALIZER


def universal_threshold(sigma: float, n: int) -> float:
    return sigma * sqrt(2.0 * log(n))


def threshold_level(
    j: int,
    levels: int,
    sigma: float,
    n: int,
    rule: RuleAssignment = RuleAssignment.SQRT_FINEST,
) -> float:
    if not 1 <= j <= levels:
        raise DomainError(f"Level {j} outside 1..{levels}")
    if sigma < 0:
        raise DomainError("Noise scale must be non-negative")
    if n < 2:
        raise DomainError("At least two samples are required")
    base = universal_threshold(sigma, n)
    sqrt_level = 1 if RuleAssignment(rule) == RuleAssignment.SQRT_FINEST else levels
    if j == sqrt_level:
        return base / sqrt(j)
    return base / log(j + 1)


def shrink(w, t: float, alpha: float):
    """Threshold function interpolating hard (alpha=0) and soft (alpha=1) shrinkage.

    Accepts a scalar or an array of coefficients.
    """
    if t < 0:
        raise DomainError("Threshold must be non-negative")
    arr = np.asarray(w, dtype=float)
    out = np.where(
        arr >= t, arr - alpha * t, np.where(arr <= -t, arr + alpha * t, 0.0)
    )
    if np.ndim(w) == 0:
        return float(out)
    return out
