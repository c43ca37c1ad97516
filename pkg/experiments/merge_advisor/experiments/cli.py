from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import typer
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn
from rich.table import Table
from typer import Context, Option

from merge_advisor.traffic.sim import load_scenario, run_scenario
from merge_advisor.trajectory import (
    NoiseSpec,
    WaveletPipelineConfig,
    denoise_record,
    inject_noise_all,
    read_trajectories,
    rmse,
    speed_rmse,
    write_trajectories,
)
from merge_advisor.trajectory.wavelet import RuleAssignment
from merge_advisor.utils import DomainError, relative_path

from .control_command import FAILURE, handle_errors
from .core import Application
from .evaluation import evaluate_denoising as run_denoising_evaluation
from .outputs import CSV_OPTIONS, emit_outputs, write_command_log
from .sweep import load_sweep, run_sweep

CONFIG_DIR = relative_path(__file__, "configs")
DEFAULT_SCENARIO = CONFIG_DIR / "scenario.json"

app = Application(
    "Merge Advisor",
    command_name="merge-advisor",
    log_modules=["merge_advisor"],
    load_dotenv=True,
)


def _app(ctx: Context) -> Application:
    found = ctx.find_object(Application)
    if found is None:
        raise ValueError("Could not find application config")
    return found


def _fmt(value, spec=".4f") -> str:
    return "-" if value is None else format(value, spec)


def simulate(
    ctx: Context,
    config: Path = Option(DEFAULT_SCENARIO, "--config", exists=True, dir_okay=False),
    seed: Optional[int] = Option(None, "--seed"),
    replay: Optional[Path] = Option(
        None, "--replay", exists=True, dir_okay=False, help="Mainline trajectories to replay"
    ),
    baseline: bool = Option(False, "--baseline", help="Run without speed guidance"),
    trajectories: Optional[Path] = Option(None, "--trajectories", dir_okay=False),
    commands: Optional[Path] = Option(None, "--commands", dir_okay=False),
    result: Optional[Path] = Option(None, "--result", dir_okay=False),
):
    """Run one scenario and report fuel and merge statistics."""
    app = _app(ctx)
    with handle_errors(app):
        cfg = load_scenario(config)
        updates = {}
        if seed is not None:
            updates["seed"] = seed
        if replay is not None:
            updates["mainline_replay"] = replay.resolve()
        if baseline:
            updates["guidance_enabled"] = False
        if updates:
            cfg = cfg.with_updates(**updates)

        res = run_scenario(cfg, record_trajectories=trajectories is not None)

        if trajectories is not None:
            write_trajectories(res.trajectory_records(), trajectories)
        if commands is not None:
            write_command_log(res.commands, commands)
        if result is not None:
            result.write_text(res.model_dump_json(indent=2))

    table = Table(title=f"Scenario {config.name}, seed {cfg.seed}")
    table.add_column("Quantity")
    table.add_column("Value", justify="right")
    table.add_row("Total fuel (L)", _fmt(res.total_fuel))
    table.add_row("Merges", str(res.merge_count))
    table.add_row("Merge failures", str(res.merge_failures))
    table.add_row("Merge speed mean (m/s)", _fmt(res.merge_speed_mean, ".2f"))
    band = f"{_fmt(res.merge_speed_p5, '.2f')} - {_fmt(res.merge_speed_p95, '.2f')}"
    table.add_row("Merge speed 5th-95th (m/s)", band)
    table.add_row("Spawned / exited", f"{res.spawned} / {res.exited}")
    table.add_row("Present / queued", f"{res.present} / {res.queued}")
    table.add_row("Guidance commands", str(len(res.commands)))
    app.console.print(table)


def sweep(
    ctx: Context,
    spec: Path = Option(..., "--spec", exists=True, dir_okay=False),
    out: Path = Option(..., "--out", file_okay=False),
    jobs: int = Option(1, "--jobs", min=1),
    seeds: Optional[int] = Option(None, "--seeds", min=1, help="Overrides the sweep's seed count"),
):
    """Run a paired baseline/treatment sweep and write CSV and SVG results."""
    app = _app(ctx)
    with handle_errors(app):
        sweep_spec = load_sweep(spec)
        columns = [TextColumn("Simulating"), BarColumn(), MofNCompleteColumn()]
        with Progress(*columns, console=app.console, transient=True) as bar:
            task = bar.add_task("pairs", total=None)
            rows = run_sweep(
                sweep_spec,
                jobs=jobs,
                seeds=seeds,
                progress=lambda done, total: bar.update(task, completed=done, total=total),
            )
        outputs = emit_outputs(rows, out)

    table = Table(title=f"Sweep {spec.name}")
    for name in sweep_spec.axis_names:
        table.add_column(name)
    for name in ("pairs", "mean saving", "p5", "p95"):
        table.add_column(name, justify="right")
    for row in rows:
        cells = [str(row.cell[name]) for name in sweep_spec.axis_names]
        style = "red" if row.failed else None
        table.add_row(
            *cells,
            f"{row.completed}/{len(row.seeds)}",
            _fmt(row.mean_saving),
            _fmt(row.saving_p5),
            _fmt(row.saving_p95),
            style=style,
        )
    app.console.print(table)
    app.info(f"Results written to {outputs.summary.parent}", style="green")

    failed = [row for row in rows if row.failed]
    if failed:
        app.error(f"{len(failed)} cell(s) had failed runs")
        for row in failed:
            for failure in row.failures:
                app.info(f"  {row.cell}: {failure}", style="red")
        raise typer.Exit(FAILURE)


def denoise(
    ctx: Context,
    source: Path = Option(..., "--in", exists=True, dir_okay=False),
    out: Path = Option(..., "--out", dir_okay=False),
    levels: int = Option(3, "--levels"),
    alpha: float = Option(0.5, "--alpha"),
    rule: RuleAssignment = Option(RuleAssignment.SQRT_FINEST, "--rule"),
    basis: str = Option("db3", "--basis"),
    window: Optional[int] = Option(None, "--window", help="Samples per batch window"),
):
    """Denoise every trajectory of a CSV file with the wavelet pipeline."""
    app = _app(ctx)
    with handle_errors(app):
        cfg = WaveletPipelineConfig(
            basis=basis, levels=levels, alpha=alpha, rule=rule, window=window
        )
        records = read_trajectories(source)
        cleaned, short = [], []
        for rec in records:
            if len(rec) < 2**cfg.levels:
                short.append(rec.vehicle_id)
                cleaned.append(rec)
            else:
                cleaned.append(denoise_record(rec, cfg))
        write_trajectories(cleaned, out)

    if short:
        app.info(
            f"{len(short)} trajectories shorter than {2**cfg.levels} samples were copied unchanged",
            style="yellow",
        )
    app.info(f"Denoised {len(records) - len(short)} trajectories into {out}", style="green")


def noise(
    ctx: Context,
    source: Path = Option(..., "--in", exists=True, dir_okay=False),
    out: Path = Option(..., "--out", dir_okay=False),
    sigma: float = Option(1.0, "--sigma", help="Gaussian noise scale (m)"),
    impulse_prob: float = Option(0.0, "--impulse-prob"),
    impulse_magnitude: float = Option(0.0, "--impulse-magnitude", help="Impulse size (m)"),
    seed: int = Option(0, "--seed"),
):
    """Add synthetic measurement noise to every trajectory of a CSV file."""
    app = _app(ctx)
    with handle_errors(app):
        spec = NoiseSpec(
            sigma=sigma,
            impulse_probability=impulse_prob,
            impulse_magnitude=impulse_magnitude,
            seed=seed,
        )
        records = inject_noise_all(read_trajectories(source), spec)
        write_trajectories(records, out)
    app.info(f"Wrote {len(records)} noisy trajectories to {out}", style="green")


def metrics(
    ctx: Context,
    truth: Path = Option(..., "--truth", exists=True, dir_okay=False),
    test: Path = Option(..., "--test", exists=True, dir_okay=False),
):
    """Compare trajectories against ground truth: positional and speed-profile RMSE."""
    app = _app(ctx)
    with handle_errors(app):
        reference = {r.vehicle_id: r for r in read_trajectories(truth)}
        candidates = {r.vehicle_id: r for r in read_trajectories(test)}
        if set(reference) != set(candidates):
            missing = sorted(set(reference) ^ set(candidates))
            raise DomainError(f"Vehicle ids differ between the files: {', '.join(missing)}")

        table = Table(title=f"{test.name} against {truth.name}")
        table.add_column("Vehicle")
        table.add_column("Samples", justify="right")
        table.add_column("RMSE (m)", justify="right")
        table.add_column("Speed RMSE (m/s)", justify="right")
        squared, count = 0.0, 0
        for vid, ref in reference.items():
            error = rmse(ref, candidates[vid])
            speed_error = speed_rmse(ref, candidates[vid]) if len(ref) > 1 else None
            squared += error**2 * len(ref)
            count += len(ref)
            table.add_row(vid, str(len(ref)), _fmt(error), _fmt(speed_error))
    overall = float(np.sqrt(squared / count)) if count else None
    table.add_row("overall", str(count), _fmt(overall), "", style="bold")
    app.console.print(table)


def evaluate_denoising(
    ctx: Context,
    trials: int = Option(100, "--trials", min=1),
    sigma: float = Option(1.0, "--sigma", help="Gaussian noise scale (m)"),
    length: int = Option(256, "--length", min=2),
    dt: float = Option(1.0, "--dt", help="Sample interval (s)"),
    seed: int = Option(0, "--seed"),
    levels: int = Option(3, "--levels"),
    alpha: float = Option(0.5, "--alpha"),
    out: Optional[Path] = Option(None, "--out", dir_okay=False, help="Per-trial CSV"),
):
    """Score the wavelet pipeline and the linear smoothers on synthetic trajectories."""
    app = _app(ctx)
    with handle_errors(app):
        report = run_denoising_evaluation(
            trials,
            NoiseSpec(sigma=sigma, seed=seed),
            WaveletPipelineConfig(levels=levels, alpha=alpha),
            length,
            dt,
            seed=seed,
        )
        if out is not None:
            frame = pd.DataFrame([t.model_dump() for t in report.trials])
            frame.to_csv(out, **CSV_OPTIONS)

    table = Table(title=f"Denoising over {trials} trials")
    table.add_column("Series")
    table.add_column("Mean RMSE (m)", justify="right")
    for label, field in (
        ("noisy", "noisy_rmse"),
        ("wavelet", "wavelet_rmse"),
        ("moving average", "moving_average_rmse"),
        ("exponential", "exponential_rmse"),
    ):
        table.add_row(label, _fmt(report.mean(field)))
    app.console.print(table)
    app.info(
        f"Wavelet improved {report.improved}/{trials} trials, "
        f"mean reduction {report.mean_reduction:.1%}; speed RMSE "
        f"{report.mean('noisy_speed_rmse'):.3f} -> {report.mean('wavelet_speed_rmse'):.3f} m/s"
    )

cli = app.control_command()
cli.add_commands(simulate, sweep, rich_help_panel="Experiments")
cli.add_commands(denoise, noise, metrics, evaluate_denoising, rich_help_panel="Trajectories")


def main():
    cli()
