import numpy as np

from merge_advisor.utils import DomainError

from .records import TrajectoryRecord


def _check_aligned(a: TrajectoryRecord, b: TrajectoryRecord):
    if len(a) != len(b):
        raise DomainError(
            f"Cannot compare {a.vehicle_id} ({len(a)} samples) "
            f"with {b.vehicle_id} ({len(b)} samples)"
        )
    if not np.allclose(a.times, b.times, rtol=0.0, atol=1e-9):
        raise DomainError(f"Sample times of {a.vehicle_id} and {b.vehicle_id} differ")


def rmse_values(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DomainError("Series lengths differ")
    if x.size == 0:
        raise DomainError("Cannot compute the RMSE of empty series")
    return float(np.sqrt(np.mean((x - y) ** 2)))


def rmse(a: TrajectoryRecord, b: TrajectoryRecord) -> float:
    """Root mean squared positional difference of two aligned records."""
    _check_aligned(a, b)
    return rmse_values(a.positions, b.positions)


def speed_profile(rec: TrajectoryRecord) -> np.ndarray:
    """Central differences of position, one-sided at both ends, in m/s."""
    if len(rec) < 2:
        raise DomainError(f"{rec.vehicle_id}: a speed profile needs at least two samples")
    return np.gradient(rec.positions, rec.sample_interval)


def speed_rmse(a: TrajectoryRecord, b: TrajectoryRecord) -> float:
    _check_aligned(a, b)
    return rmse_values(speed_profile(a), speed_profile(b))
