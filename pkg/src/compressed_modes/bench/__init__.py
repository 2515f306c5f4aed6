"""Experiment harness: configs, stock figure presets and the command line."""

from .config import ExperimentConfig, dump_config, load_config, parse_config
from .experiments import EXPERIMENTS, RunReport, run_experiment
from .stock import STOCK, stock_config

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "RunReport",
    "STOCK",
    "dump_config",
    "load_config",
    "parse_config",
    "run_experiment",
    "stock_config",
]
