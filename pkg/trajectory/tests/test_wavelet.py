"""
Wavelet filter bank, thresholds and denoising pipeline.
"""
from math import log, sqrt

import numpy as np
from pytest import approx, mark, raises

from merge_advisor.trajectory.wavelet import (
    RuleAssignment,
    WaveletCoeffs,
    WaveletPipelineConfig,
    daubechies_scaling_filter,
    denoise,
    dwt,
    get_basis,
    idwt,
    noise_sigma,
    shrink,
    threshold_level,
)
from merge_advisor.utils import DomainError


def symmetric_index(i: int, n: int) -> int:
    while i < 0 or i >= n:
        if i < 0:
            i = -i - 1
        if i >= n:
            i = 2 * n - 1 - i
    return i


def analysis_oracle(x, h):
    """Brute-force convolve-and-downsample with half-sample symmetric extension."""
    n, L = len(x), len(h)
    out = []
    for k in range((n + L - 1) // 2):
        out.append(
            sum(h[j] * x[symmetric_index(2 * k + 1 - j, n)] for j in range(L))
        )
    return np.array(out)


def synthesis_oracle(a, d, n, h, g):
    out = np.zeros(n)
    for m in range(n):
        for k in range(len(a)):
            i = 2 * k + 1 - m
            if 0 <= i < len(h):
                out[m] += a[k] * h[i] + d[k] * g[i]
    return out


def test_db3_filter_identities():
    basis = get_basis("db3")
    assert basis.length == 6
    assert basis.lowpass.sum() == approx(sqrt(2), abs=1e-12)
    assert basis.highpass.sum() == approx(0, abs=1e-12)
    h = basis.lowpass
    for m in range(3):
        shifted = np.dot(h[2 * m :], h[: len(h) - 2 * m])
        assert shifted == approx(1.0 if m == 0 else 0.0, abs=1e-12)
    assert np.dot(basis.lowpass, basis.highpass) == approx(0, abs=1e-12)


def test_db3_matches_published_taps():
    taps = sorted(get_basis("db3").lowpass)
    published = sorted(
        [
            0.3326705529500826,
            0.8068915093110925,
            0.4598775021184915,
            -0.1350110200102546,
            -0.0854412738820267,
            0.0352262918857095,
        ]
    )
    assert np.allclose(taps, published, atol=1e-10)


def test_db2_closed_form():
    h = daubechies_scaling_filter(2)[::-1]
    s3 = sqrt(3)
    expected = np.array([1 + s3, 3 + s3, 3 - s3, 1 - s3]) / (4 * sqrt(2))
    assert np.allclose(h, expected, atol=1e-12)


def test_unknown_basis():
    with raises(DomainError):
        get_basis("sym4")
    with raises(ValueError):
        WaveletPipelineConfig(basis="coif2")


def test_constant_signal_has_no_details():
    cfg = WaveletPipelineConfig(levels=3)
    coeffs = dwt(np.full(64, 7.5), cfg)
    for d in coeffs.details:
        assert np.max(np.abs(d)) < 1e-10
    assert np.allclose(coeffs.approx, 7.5 * 2 ** (3 / 2), atol=1e-9)


@mark.parametrize("n", [64, 100, 256, 1023])
def test_perfect_reconstruction(rng, n):
    cfg = WaveletPipelineConfig()
    for _ in range(250):
        x = rng.normal(0, 10, n)
        assert np.max(np.abs(idwt(dwt(x, cfg), cfg) - x)) < 1e-9


@mark.parametrize("n", [8, 9, 13])
def test_reconstruction_other_levels(rng, n):
    for levels in (1, 2, 3):
        cfg = WaveletPipelineConfig(levels=levels, basis="db2")
        x = rng.uniform(-1, 1, n)
        assert np.max(np.abs(idwt(dwt(x, cfg), cfg) - x)) < 1e-9


def test_impulse_matches_convolution_oracle():
    cfg = WaveletPipelineConfig(levels=1)
    basis = cfg.wavelet
    x = np.zeros(8)
    x[0] = 1.0
    coeffs = dwt(x, cfg)
    assert np.allclose(coeffs.approx, analysis_oracle(x, basis.lowpass), atol=1e-14)
    assert np.allclose(coeffs.details[0], analysis_oracle(x, basis.highpass), atol=1e-14)


def test_random_signal_matches_convolution_oracle(rng):
    cfg = WaveletPipelineConfig(levels=1)
    basis = cfg.wavelet
    x = rng.normal(size=11)
    coeffs = dwt(x, cfg)
    assert np.allclose(coeffs.approx, analysis_oracle(x, basis.lowpass), atol=1e-12)


def test_single_approx_coefficient_matches_upsampling_oracle():
    cfg = WaveletPipelineConfig(levels=1)
    basis = cfg.wavelet
    coeffs = dwt(np.zeros(16), cfg)
    coeffs.approx[3] = 1.0
    expected = synthesis_oracle(
        coeffs.approx, coeffs.details[0], 16, basis.lowpass, basis.highpass
    )
    assert np.allclose(idwt(coeffs, cfg), expected, atol=1e-14)


def test_reconstruction_is_linear_in_bands(rng):
    cfg = WaveletPipelineConfig()
    x = np.cumsum(rng.normal(size=128))
    coeffs = dwt(x, cfg)
    smooth = coeffs.copy()
    smooth.details = [np.zeros_like(d) for d in smooth.details]
    rough = coeffs.copy()
    rough.approx = np.zeros_like(rough.approx)
    assert np.allclose(idwt(smooth, cfg) + idwt(rough, cfg), x, atol=1e-9)
    # The approximation part alone is much smoother than the signal
    assert np.std(np.diff(idwt(smooth, cfg), 2)) < np.std(np.diff(x, 2))


def test_signal_too_short():
    with raises(DomainError):
        dwt(np.zeros(7), WaveletPipelineConfig(levels=3))


def test_inconsistent_coefficients():
    cfg = WaveletPipelineConfig()
    coeffs = dwt(np.arange(64.0), cfg)
    broken = WaveletCoeffs(
        approx=coeffs.approx[:-1], details=coeffs.details, n_original=64
    )
    with raises(DomainError):
        idwt(broken, cfg)
    with raises(DomainError):
        idwt(coeffs, WaveletPipelineConfig(basis="db2"))


def test_noise_sigma():
    assert noise_sigma([1, -1, 2, -2, 3]) == approx(2 / 0.6745, abs=1e-12)
    assert noise_sigma([1, -1, 2, -2, 3]) == approx(2.9652, abs=1e-4)
    assert noise_sigma(np.zeros(10)) == 0
    assert noise_sigma([1, 2, 3, 4]) == approx(2.5 / 0.6745)
    with raises(DomainError):
        noise_sigma([])


def test_noise_sigma_homogeneous(rng):
    d = rng.normal(size=51)
    for k in (-3.0, 0.5, 12.0):
        assert noise_sigma(k * d) == approx(abs(k) * noise_sigma(d), rel=1e-12)


def test_threshold_values():
    base = sqrt(2 * log(1024))
    assert threshold_level(1, 3, 1.0, 1024) == approx(base, abs=1e-9)
    assert threshold_level(1, 3, 1.0, 1024) == approx(3.7233, abs=1e-4)
    assert threshold_level(2, 3, 1.0, 1024) == approx(base / log(3), abs=1e-9)
    assert threshold_level(2, 3, 1.0, 1024) == approx(3.3891, abs=1e-4)
    assert threshold_level(3, 3, 1.0, 1024) == approx(base / log(4), abs=1e-9)
    for j in (1, 2, 3):
        assert threshold_level(j, 3, 0.0, 1024) == 0


def test_threshold_rule_switch():
    base = sqrt(2 * log(256))
    rule = RuleAssignment.SQRT_COARSEST
    assert threshold_level(3, 3, 1.0, 256, rule) == approx(base / sqrt(3), abs=1e-12)
    assert threshold_level(1, 3, 1.0, 256, rule) == approx(base / log(2), abs=1e-12)


def test_threshold_monotone():
    for j in (1, 2, 3):
        values = [threshold_level(j, 3, s, 512) for s in (0.1, 0.5, 1.0, 4.0)]
        assert values == sorted(values)
        values = [threshold_level(j, 3, 1.0, n) for n in (8, 64, 512, 4096)]
        assert values == sorted(values)


def test_threshold_domain():
    with raises(DomainError):
        threshold_level(4, 3, 1.0, 64)
    with raises(DomainError):
        threshold_level(1, 3, -1.0, 64)


def test_shrink_piecewise():
    assert shrink(2.0, 1.0, 0.5) == approx(1.5, abs=1e-12)
    assert shrink(0.5, 1.0, 0.5) == 0
    assert shrink(-2.0, 1.0, 0.5) == approx(-1.5, abs=1e-12)
    for w in (-3.0, -0.2, 0.0, 0.7, 5.0):
        assert shrink(w, 0.0, 0.5) == w
    # Soft and hard thresholding as the two extremes
    assert shrink(3.0, 1.0, 1.0) == 2.0
    assert shrink(3.0, 1.0, 0.0) == 3.0
    assert shrink(0.9, 1.0, 0.0) == 0


def test_shrink_odd_and_non_expansive(rng):
    w = rng.normal(0, 3, 1000)
    for alpha in (0.0, 0.3, 1.0):
        for t in (0.0, 0.5, 2.0):
            out = shrink(w, t, alpha)
            assert np.allclose(shrink(-w, t, alpha), -out)
            assert np.all(np.abs(out) <= np.abs(w) + 1e-15)


def test_denoise_constant_is_exact():
    x = np.full(100, -4.25)
    assert np.max(np.abs(denoise(x) - x)) < 1e-9


def test_denoise_keeps_noise_free_smooth_signal():
    t = np.arange(256.0)
    x = 0.01 * t**2 + 3.0 * t + 12.0
    assert np.max(np.abs(denoise(x) - x)) < 1e-6


@mark.parametrize("n", [64, 100, 1023])
def test_denoise_preserves_length(rng, n):
    assert denoise(rng.normal(size=n)).shape == (n,)


def test_denoise_reduces_error(rng):
    t = np.arange(256.0)
    truth = 10 * np.sin(2 * np.pi * t / 128) + 0.05 * t
    raw, clean = [], []
    for _ in range(100):
        noisy = truth + rng.normal(0, 1.0, t.size)
        raw.append(np.sqrt(np.mean((noisy - truth) ** 2)))
        clean.append(np.sqrt(np.mean((denoise(noisy) - truth) ** 2)))
    assert np.mean(clean) < np.mean(raw)


def test_denoise_shift_equivariant(rng):
    x = np.cumsum(rng.normal(size=200))
    assert np.allclose(denoise(x + 100.0), denoise(x) + 100.0, atol=1e-8)


def test_denoise_windows(rng):
    x = np.cumsum(rng.normal(size=100))
    cfg = WaveletPipelineConfig(window=32)
    out = denoise(x, cfg)
    assert out.shape == x.shape
    assert np.allclose(out[:32], denoise(x[:32]))
    # The 4-sample tail is folded into the last full window
    assert np.allclose(out[64:], denoise(x[64:]))
    with raises(ValueError):
        WaveletPipelineConfig(window=4, levels=3)


def test_rule_assignments_differ(rng):
    x = np.cumsum(rng.normal(size=256)) + rng.normal(size=256)
    a = denoise(x, WaveletPipelineConfig(rule="sqrt-finest"))
    b = denoise(x, WaveletPipelineConfig(rule="sqrt-coarsest"))
    assert not np.allclose(a, b)
