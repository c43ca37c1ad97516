"""
Orthogonal Daubechies filter banks.

The scaling filter is built by spectral factorization of the Daubechies
half-band polynomial rather than typed in, so any member of the family is
available and the coefficients can be checked against their defining
identities.
"""
import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb, sqrt

import numpy as np

from merge_advisor.utils import DomainError


@dataclass(frozen=True)
class WaveletBasis:
    """Decomposition and reconstruction filters of an orthogonal wavelet.

    `lowpass` and `highpass` are the decomposition filters (scaling and
    wavelet); the reconstruction filters are their time reverses.
    """

    name: str
    lowpass: np.ndarray
    highpass: np.ndarray

    @property
    def rec_lowpass(self) -> np.ndarray:
        return self.lowpass[::-1]

    @property
    def rec_highpass(self) -> np.ndarray:
        return self.highpass[::-1]

    @property
    def length(self) -> int:
        return len(self.lowpass)


def daubechies_scaling_filter(order: int) -> np.ndarray:
    """Minimum-phase scaling filter with `order` vanishing moments (length 2*order)."""
    if order < 1:
        raise DomainError("Daubechies order must be at least 1")
    # Half-band polynomial in y = sin^2(w/2)
    q = [comb(order - 1 + k, k) for k in range(order)]
    y_roots = np.roots(q[::-1]) if order > 1 else np.array([])

    # Each root y maps to a reciprocal pair z, 1/z through y = (2 - z - 1/z) / 4;
    # keep the one inside the unit circle.
    z_roots = []
    for y in y_roots:
        pair = np.roots([1.0, -(2.0 - 4.0 * y), 1.0])
        z_roots.append(pair[np.argmin(np.abs(pair))])

    h = np.poly(np.concatenate([-np.ones(order), np.array(z_roots, dtype=complex)]))
    h = np.real(h)
    h = h * (sqrt(2.0) / h.sum())
    # Decomposition convention: the largest taps come last
    return h[::-1].copy()


def quadrature_mirror(lowpass: np.ndarray) -> np.ndarray:
    n = len(lowpass)
    signs = np.array([(-1) ** (k + 1) for k in range(n)], dtype=float)
    return signs * lowpass[::-1]


@lru_cache(maxsize=None)
def get_basis(name: str = "db3") -> WaveletBasis:
    """Look up a basis by name. Supported names are `haar` and `db1` ... `db10`."""
    key = name.lower()
    if key == "haar":
        key = "db1"
    match = re.fullmatch(r"db(\d+)", key)
    if match is None or not 1 <= int(match.group(1)) <= 10:
        raise DomainError(f"Unsupported wavelet basis '{name}'")
    lowpass = daubechies_scaling_filter(int(match.group(1)))
    lowpass.setflags(write=False)
    highpass = quadrature_mirror(lowpass)
    highpass.setflags(write=False)
    return WaveletBasis(name=name.lower(), lowpass=lowpass, highpass=highpass)
