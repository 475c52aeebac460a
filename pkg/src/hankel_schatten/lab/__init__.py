"""Config-driven experiment runner and command-line interface."""

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import (ExperimentResult, run_block_sweep, run_check_suite, run_lacunary_growth,
                          run_projection_norm, run_ratio_sweep, write_result)

__all__ = ["ConfigError", "ExperimentConfig", "ExperimentResult", "load_config", "run_block_sweep",
           "run_check_suite", "run_lacunary_growth", "run_projection_norm", "run_ratio_sweep",
           "write_result"]
