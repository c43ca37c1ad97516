"""
A timer for measuring the phases of long-running experiment commands.
"""

from contextlib import contextmanager
from contextvars import ContextVar
from time import perf_counter
from typing import List, Optional

from pydantic import BaseModel

code_timer = ContextVar("code_timer", default=None)


class Timing(BaseModel):
    name: str
    delta: float
    total: float
    time: float


class Timer:
    timings: List[Timing]

    @classmethod
    def add_step(cls, name: str) -> Optional[Timing]:
        """Record a step on the timer active in the current context, if any."""
        timer = code_timer.get()
        if timer is None:
            return None
        return timer._add_step(name)

    def __init__(self):
        self.timings = [Timing(name="start", delta=0, total=0, time=perf_counter())]

    def _add_step(self, name: str) -> Timing:
        last_step = self.timings[-1]
        t = perf_counter()
        rec = Timing(
            name=name, delta=t - last_step.time, total=t - self.timings[0].time, time=t
        )
        self.timings.append(rec)
        return rec

    @property
    def elapsed(self) -> float:
        return perf_counter() - self.timings[0].time

    def summary(self) -> str:
        steps = [f"{t.name}={t.delta:.2f}s" for t in self.timings[1:]]
        steps.append(f"total={self.elapsed:.2f}s")
        return ", ".join(steps)

    @contextmanager
    def context(self):
        token = code_timer.set(self)
        try:
            yield self
        finally:
            code_timer.reset(token)
