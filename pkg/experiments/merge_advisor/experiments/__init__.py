"""
Paired fuel-saving sweeps, denoising evaluation and the ``merge-advisor``
command-line tool.
"""
from .core import Application
from .evaluation import DenoisingReport, DenoisingTrial, evaluate_denoising
from .outputs import SweepOutputs, emit_outputs, write_command_log
from .sweep import (
    AXES,
    SweepRow,
    SweepSpec,
    aggregate,
    default_seed_count,
    fuel_saving,
    load_sweep,
    run_pair,
    run_sweep,
)
