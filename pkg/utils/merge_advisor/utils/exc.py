class MergeAdvisorError(Exception):
    """Base class for all errors that should be caught and handled by the application."""

    pass


class DomainError(MergeAdvisorError, ValueError):
    """An argument lies outside the domain of a model or numerical operation."""

    pass


class TrajectoryFormatError(MergeAdvisorError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CollisionError(MergeAdvisorError):
    """Two vehicles on the same lane overlap, or a ramp vehicle runs past the ramp end."""

    def __init__(self, clock: float, follower: str, leader: str, gap: float, events=None):
        self.clock = clock
        self.follower = follower
        self.leader = leader
        self.gap = gap
        self.events = list(events or [])
        super().__init__(
            f"Collision at t={clock:.2f} s: {follower} overlaps {leader} (gap {gap:.3f} m)"
        )
