"""Experiment runner and command line."""
from .runner import (
    SweepConfig,
    TimingRow,
    cmd_cluster,
    cmd_generate,
    cmd_sweep,
    cmd_timing,
    default_c_cuts,
    desk_preset,
    load_manifest,
    paper_preset,
)

__all__ = [
    "SweepConfig",
    "TimingRow",
    "cmd_cluster",
    "cmd_generate",
    "cmd_sweep",
    "cmd_timing",
    "default_c_cuts",
    "desk_preset",
    "load_manifest",
    "paper_preset",
]
