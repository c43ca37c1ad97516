"""
Denoising evaluation on synthetic IDM trajectories.
"""
from pytest import approx, raises

from merge_advisor.experiments import evaluate_denoising
from merge_advisor.trajectory import NoiseSpec
from merge_advisor.utils import DomainError


def test_small_evaluation():
    report = evaluate_denoising(trials=4, length=128)
    assert len(report.trials) == 4
    assert [t.seed for t in report.trials] == [0, 1, 2, 3]
    for trial in report.trials:
        assert trial.noisy_rmse == approx(1.0, rel=0.3)
        assert trial.reduction == 1 - trial.wavelet_rmse / trial.noisy_rmse
    assert report.mean("noisy_rmse") > report.mean("wavelet_rmse")


def test_evaluation_is_seeded():
    a = evaluate_denoising(trials=2, length=64, seed=9)
    b = evaluate_denoising(trials=2, length=64, seed=9)
    assert a == b
    assert evaluate_denoising(trials=2, length=64, seed=10) != a


def test_no_noise_no_error():
    report = evaluate_denoising(trials=1, noise=NoiseSpec(sigma=0.0), length=64)
    assert report.trials[0].noisy_rmse == 0.0


def test_needs_a_trial():
    with raises(DomainError):
        evaluate_denoising(trials=0)


def test_denoising_acceptance():
    report = evaluate_denoising(trials=100, noise=NoiseSpec(sigma=1.0), length=256, dt=1.0)
    assert report.improved >= 95
    assert report.mean_reduction >= 0.30
    assert report.mean("wavelet_speed_rmse") < report.mean("noisy_speed_rmse")
