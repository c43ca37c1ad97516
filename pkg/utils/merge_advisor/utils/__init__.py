"""
This module houses utility functions that are shared between the
simulation, trajectory and experiment libraries.
"""
import os
from pathlib import Path

from .exc import CollisionError, DomainError, MergeAdvisorError, TrajectoryFormatError
from .logs import get_logger, setup_stderr_logs
from .timer import Timer


def relative_path(base, *parts) -> Path:
    if not os.path.isdir(str(base)):
        base = os.path.dirname(base)
    return Path(os.path.join(base, *parts))
