"""Experiment orchestration: config, runners, reports, figures, CLI."""

from .config import ConfigError, ExperimentConfig, build_initial_field, load_config, resolve_config
from .experiments import bootstrap_params, dispatch, run_experiment
from .figures import render_figures

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "bootstrap_params",
    "build_initial_field",
    "dispatch",
    "load_config",
    "render_figures",
    "resolve_config",
    "run_experiment",
]
