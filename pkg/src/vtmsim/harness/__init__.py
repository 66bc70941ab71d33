"""Scenario ingestion, seeded experiments, the end-to-end pipeline, and the CLI."""

from .config import ScenarioConfig, load_config, parse_config_text
from .experiments import EXPERIMENT_NAMES, ExperimentResult, run_experiment
from .pipeline import PipelineResult, run_pipeline

__all__ = [
    "ScenarioConfig",
    "load_config",
    "parse_config_text",
    "EXPERIMENT_NAMES",
    "ExperimentResult",
    "run_experiment",
    "PipelineResult",
    "run_pipeline",
]
