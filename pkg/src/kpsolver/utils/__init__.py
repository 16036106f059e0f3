"""
Infrastructure of the kpsolve command:

- cli: argument parsing with the solve, converge and evolve subcommands
- config: ExperimentConfig from defaults, INI file and flags
- logger: package logger setup
- loading_indicator: terminal spinner for long sweeps
- output: CSV field files, metadata sidecars and tables

The output module is imported directly (kpsolver.utils.output) and is not
re-exported here.
"""

from .cli import CommandLineArgs, UsageError, parse_arguments
from .config import Config, ConfigError, ExperimentConfig
from .loading_indicator import LoadingIndicator
from .logger import setup_logger

__all__ = [
    "parse_arguments",
    "CommandLineArgs",
    "UsageError",
    "Config",
    "ConfigError",
    "ExperimentConfig",
    "setup_logger",
    "LoadingIndicator",
]
