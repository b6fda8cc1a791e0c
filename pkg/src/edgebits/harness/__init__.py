"""Experiment layer: configs, sweeps, profiles, oracle cross-checks and the CLI."""

from .config import ConfigError, SweepConfig, load_config, parse_config
from .runs import CrosscheckReport, compute_profile, fixed_point_report, run_crosscheck, run_profile
from .sweep import SCHEMA_VERSION, SweepRecord, compute_sweep, read_csv, run_sweep, write_csv

__all__ = [
    "ConfigError", "SweepConfig", "load_config", "parse_config",
    "CrosscheckReport", "compute_profile", "fixed_point_report", "run_crosscheck", "run_profile",
    "SCHEMA_VERSION", "SweepRecord", "compute_sweep", "read_csv", "run_sweep", "write_csv",
]
