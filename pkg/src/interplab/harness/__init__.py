"""Sweep orchestration: configs, seeds, execution, CSV/SVG output."""

from .config import DEFAULT_N_VALUES, MODES, SweepConfig, load_config, parse_config
from .report import CSV_HEADER, emit_csv, emit_svg, format_csv, read_csv, render_svg
from .runner import MAX_RESAMPLES, SummaryRow, SweepResult, TrialFailure, run_sweep, run_trial, summarize
from .seeds import derive_seed

__all__ = [
    "CSV_HEADER",
    "DEFAULT_N_VALUES",
    "MAX_RESAMPLES",
    "MODES",
    "SummaryRow",
    "SweepConfig",
    "SweepResult",
    "TrialFailure",
    "derive_seed",
    "emit_csv",
    "emit_svg",
    "format_csv",
    "load_config",
    "parse_config",
    "read_csv",
    "render_svg",
    "run_sweep",
    "run_trial",
    "summarize",
]
