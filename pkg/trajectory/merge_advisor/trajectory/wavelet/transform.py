"""
Pyramidal discrete wavelet transform with half-sample symmetric extension.

For a signal of length n and a filter of length L, one analysis level
produces floor((n + L - 1) / 2) approximation and detail coefficients. The
extra coefficients carry the boundary extension and make the transform
exactly invertible for any n, power of two or not.
"""
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.signal import upfirdn

from merge_advisor.utils import DomainError, get_logger

from .config import WaveletPipelineConfig
from .filters import WaveletBasis

log = get_logger(__name__)


@dataclass
class WaveletCoeffs:
    """Approximation band a_J and detail bands d_1 (finest) ... d_J."""

    approx: np.ndarray
    details: List[np.ndarray]
    n_original: int
    basis: str = "db3"
    lengths: List[int] = field(default_factory=list)

    @property
    def levels(self) -> int:
        return len(self.details)

    def copy(self) -> "WaveletCoeffs":
        return WaveletCoeffs(
            approx=self.approx.copy(),
            details=[d.copy() for d in self.details],
            n_original=self.n_original,
            basis=self.basis,
            lengths=list(self.lengths),
        )


def level_lengths(n: int, filter_length: int, levels: int) -> List[int]:
    """Signal length entering each level, followed by the coarsest band length."""
    lengths = [n]
    for _ in range(levels):
        lengths.append((lengths[-1] + filter_length - 1) // 2)
    return lengths


def max_levels(n: int) -> int:
    """Largest J with 2**J <= n."""
    return max(int(np.floor(np.log2(n))), 0) if n > 0 else 0


def analysis_step(x: np.ndarray, basis: WaveletBasis):
    """One level of the analysis filter bank: (approx, detail)."""
    L = basis.length
    n_out = (len(x) + L - 1) // 2
    ext = np.pad(x, L - 1, mode="symmetric")
    start = L // 2
    approx = upfirdn(basis.lowpass, ext, down=2)[start : start + n_out]
    detail = upfirdn(basis.highpass, ext, down=2)[start : start + n_out]
    return approx, detail


def synthesis_step(
    approx: np.ndarray, detail: np.ndarray, n: int, basis: WaveletBasis
) -> np.ndarray:
    """Invert one analysis level, returning the n samples that entered it."""
    L = basis.length
    y = upfirdn(basis.rec_lowpass, approx, up=2) + upfirdn(
        basis.rec_highpass, detail, up=2
    )
    return y[L - 2 : L - 2 + n]


def dwt(signal, cfg: WaveletPipelineConfig = WaveletPipelineConfig()) -> WaveletCoeffs:
    basis = cfg.wavelet
    levels = cfg.levels
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise DomainError("Wavelet decomposition expects a one-dimensional signal")
    if levels < 1:
        raise DomainError("At least one decomposition level is required")
    n = len(x)
    if n < 2**levels:
        raise DomainError(
            f"Signal of length {n} is too short for {levels} levels (need {2**levels})"
        )
    details = []
    approx = x
    for _ in range(levels):
        approx, detail = analysis_step(approx, basis)
        details.append(detail)
    return WaveletCoeffs(
        approx=approx,
        details=details,
        n_original=n,
        basis=basis.name,
        lengths=level_lengths(n, basis.length, levels),
    )


def idwt(
    coeffs: WaveletCoeffs, cfg: WaveletPipelineConfig = WaveletPipelineConfig()
) -> np.ndarray:
    basis = cfg.wavelet
    if coeffs.basis != basis.name:
        raise DomainError(
            f"Coefficients were computed with {coeffs.basis}, not {basis.name}"
        )
    J = coeffs.levels
    if J < 1:
        raise DomainError("Coefficients have no detail bands")
    lengths = level_lengths(coeffs.n_original, basis.length, J)
    if coeffs.lengths and list(coeffs.lengths) != lengths:
        raise DomainError("Stored band lengths do not match the decimation scheme")
    if len(coeffs.approx) != lengths[J]:
        raise DomainError(
            f"Approximation band has {len(coeffs.approx)} coefficients, expected {lengths[J]}"
        )
    for j, d in enumerate(coeffs.details, start=1):
        if len(d) != lengths[j]:
            raise DomainError(
                f"Detail band d_{j} has {len(d)} coefficients, expected {lengths[j]}"
            )

    x = np.asarray(coeffs.approx, dtype=float)
    for j in range(J, 0, -1):
        detail = np.asarray(coeffs.details[j - 1], dtype=float)
        x = synthesis_step(x, detail, lengths[j - 1], basis)
    return x
