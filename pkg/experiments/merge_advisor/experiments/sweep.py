"""
Paired baseline/treatment scenario sweeps.

Every cell of a sweep is the Cartesian product of one value from each axis.
For every cell and seed the scenario runs twice, once with guidance off
(baseline) and once with guidance on (treatment), on the same seed so that
both runs see the same arrivals. The saving of a cell is aggregated over its
seed pairs.
"""
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from os import environ
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from merge_advisor.traffic.sim import ScenarioConfig, run_scenario
from merge_advisor.utils import CollisionError, DomainError, Timer, get_logger

log = get_logger(__name__)

SEEDS_ENVVAR = "MERGE_ADVISOR_SEEDS"
DEFAULT_SEEDS = 100

AXES = (
    "ramp_flow",
    "mainline_flow",
    "r2_length",
    "r3_length",
    "cooperative",
    "r2_entry_speed",
    "cav_penetration",
)


def fuel_saving(baseline: float, treated: float) -> float:
    """Relative fuel saving of the treated run over the baseline run."""
    if baseline <= 0:
        raise DomainError(f"Baseline fuel must be positive (got {baseline})")
    return 1.0 - treated / baseline


def default_seed_count() -> int:
    value = environ.get(SEEDS_ENVVAR)
    if value is None or value.strip() == "":
        return DEFAULT_SEEDS
    try:
        count = int(value)
    except ValueError:
        raise DomainError(f"{SEEDS_ENVVAR} must be an integer (got {value!r})")
    if count < 1:
        raise DomainError(f"{SEEDS_ENVVAR} must be at least 1")
    return count


class SweepSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    base: ScenarioConfig = ScenarioConfig()
    axes: Dict[str, List[Any]] = {}
    # None falls back to MERGE_ADVISOR_SEEDS, then to 100
    seeds: Optional[int] = Field(None, ge=1)

    @field_validator("axes")
    @classmethod
    def known_axes(cls, axes):
        unknown = set(axes) - set(AXES)
        if unknown:
            raise ValueError(f"unknown sweep axes: {', '.join(sorted(unknown))}")
        for name, values in axes.items():
            if len(values) == 0:
                raise ValueError(f"axis '{name}' has no values")
        return axes

    @model_validator(mode="after")
    def cells_are_valid(self):
        # Surface invalid axis values when the sweep is loaded, not mid-run.
        self.cells()
        return self

    @property
    def axis_names(self) -> List[str]:
        return list(self.axes)

    @property
    def seed_count(self) -> int:
        if self.seeds is not None:
            return self.seeds
        return default_seed_count()

    def seed_list(self, count: Optional[int] = None) -> List[int]:
        count = count or self.seed_count
        return [self.base.seed + i for i in range(count)]

    def cells(self) -> List[Tuple[Dict[str, Any], ScenarioConfig]]:
        cells = []
        for values in product(*self.axes.values()):
            coords = dict(zip(self.axes, values))
            cells.append((coords, self.base.with_updates(**coords)))
        return cells


def load_sweep(path) -> SweepSpec:
    path = Path(path)
    data = json.loads(path.read_text())
    spec = SweepSpec.model_validate(data)
    replay = spec.base.mainline_replay
    if replay is not None and not replay.is_absolute():
        base = spec.base.model_copy(update={"mainline_replay": path.parent / replay})
        spec = spec.model_copy(update={"base": base})
    return spec


class SweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    cell: Dict[str, Any]
    seeds: List[int]
    baseline_fuel: List[Optional[float]]
    treated_fuel: List[Optional[float]]
    savings: List[Optional[float]]
    mean_saving: Optional[float] = None
    saving_p5: Optional[float] = None
    saving_p95: Optional[float] = None
    failed: bool = False
    failures: List[str] = []

    @property
    def completed(self) -> int:
        return sum(s is not None for s in self.savings)


@dataclass(frozen=True)
class PairTask:
    cell_index: int
    seed: int
    config: ScenarioConfig


@dataclass(frozen=True)
class PairOutcome:
    cell_index: int
    seed: int
    baseline_fuel: Optional[float] = None
    treated_fuel: Optional[float] = None
    saving: Optional[float] = None
    failure: Optional[str] = None


def run_pair(task: PairTask) -> PairOutcome:
    """Baseline and treatment runs of one cell on one seed.

    Errors are returned rather than raised; they have to cross the process
    boundary and a failed pair must not cancel the rest of the sweep.
    """
    cfg = task.config.with_updates(seed=task.seed)
    fuels = {}
    try:
        for guidance in (False, True):
            run_cfg = cfg.with_updates(guidance_enabled=guidance)
            fuels[guidance] = run_scenario(run_cfg, record_trajectories=False).total_fuel
        saving = fuel_saving(fuels[False], fuels[True])
    except (CollisionError, DomainError) as err:
        return PairOutcome(
            task.cell_index,
            task.seed,
            fuels.get(False),
            fuels.get(True),
            failure=f"seed {task.seed}: {err}",
        )
    return PairOutcome(task.cell_index, task.seed, fuels[False], fuels[True], saving)


def aggregate(coords: Dict[str, Any], outcomes: List[PairOutcome]) -> SweepRow:
    outcomes = sorted(outcomes, key=lambda o: o.seed)
    savings = np.array([o.saving for o in outcomes if o.saving is not None])
    stats = {}
    if savings.size:
        p5, p95 = np.percentile(savings, [5, 95])
        stats = dict(mean_saving=float(savings.mean()), saving_p5=float(p5), saving_p95=float(p95))
    failures = [o.failure for o in outcomes if o.failure is not None]
    return SweepRow(
        cell=coords,
        seeds=[o.seed for o in outcomes],
        baseline_fuel=[o.baseline_fuel for o in outcomes],
        treated_fuel=[o.treated_fuel for o in outcomes],
        savings=[o.saving for o in outcomes],
        failed=bool(failures),
        failures=failures,
        **stats,
    )


def run_sweep(
    spec: SweepSpec,
    *,
    jobs: int = 1,
    seeds: Optional[int] = None,
    progress: Optional[Callable[[int, int], None]] = None,
) -> List[SweepRow]:
    """Run every cell of ``spec`` on every seed; rows come back in cell order."""
    if jobs < 1:
        raise DomainError("At least one worker is required")
    cells = spec.cells()
    seed_list = spec.seed_list(seeds)
    tasks = [PairTask(i, seed, cfg) for i, (_, cfg) in enumerate(cells) for seed in seed_list]
    log.info("Sweep of %d cells x %d seeds on %d worker(s)", len(cells), len(seed_list), jobs)

    outcomes: Dict[int, List[PairOutcome]] = {i: [] for i in range(len(cells))}
    with Timer().context() as timer:
        if jobs == 1:
            results = map(run_pair, tasks)
            _collect(results, outcomes, len(tasks), progress)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = pool.map(run_pair, tasks, chunksize=max(len(tasks) // (4 * jobs), 1))
                _collect(results, outcomes, len(tasks), progress)
        Timer.add_step("simulate")

        rows = []
        for i, (coords, _) in enumerate(cells):
            row = aggregate(coords, outcomes[i])
            if row.failed:
                log.error("Cell %s: %d failed pair(s)", coords, len(row.failures))
            log.info("Cell %s: mean saving %s", coords, row.mean_saving)
            rows.append(row)
        Timer.add_step("aggregate")
    log.info("Sweep timing: %s", timer.summary())
    return rows


def _collect(results, outcomes, total, progress):
    for done, outcome in enumerate(results, start=1):
        outcomes[outcome.cell_index].append(outcome)
        if progress is not None:
            progress(done, total)
