"""
Logging configuration for kpsolver.

All library modules log through logging.getLogger(__name__), so configuring
the "kpsolver" package logger here routes grid-sweep progress, flagged cells
and integrator diagnostics to the console and the optional log file.
"""

import logging
import os
import sys
from typing import Any

PACKAGE_LOGGER = "kpsolver"
CONSOLE_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class LoggerAdapter(logging.LoggerAdapter):
    """
    Prefix log messages with "[key=value]" context.

    Used by the convergence harness to tag each record with method and M.
    """

    def process(self, msg, kwargs):
        context = " ".join(f"[{key}={value}]" for key, value in self.extra.items())
        return f"{context} {msg}", kwargs


def _console_level(args: Any, default_level: str) -> int:
    if getattr(args, "debug", False):
        return logging.DEBUG
    if getattr(args, "verbose", False):
        return logging.INFO
    return getattr(logging, default_level)


def setup_logger(
    app_name: str, args: Any, default_level: str = "WARNING"
) -> logging.Logger:
    """
    Configure the named logger from the logging flags.

    Args:
        app_name: Logger name, normally the package name so module loggers
            propagate to it
        args: Object with optional debug, verbose, quiet and log_file attributes
        default_level: Console level when neither debug nor verbose is set

    Returns:
        The configured logger
    """
    logger = logging.getLogger(app_name)
    for handler in logger.handlers[:]:
        logger.removeHandler(handler)
    logger.setLevel(logging.DEBUG)

    if not getattr(args, "quiet", False):
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setLevel(_console_level(args, default_level))
        console_handler.setFormatter(
            logging.Formatter(CONSOLE_FORMAT, datefmt=DATE_FORMAT)
        )
        logger.addHandler(console_handler)

    log_file = getattr(args, "log_file", None)
    if log_file:
        try:
            log_path = str(log_file)
            log_dir = os.path.dirname(log_path)
            if log_dir:
                os.makedirs(log_dir, exist_ok=True)
            file_handler = logging.FileHandler(log_path)
            file_handler.setLevel(logging.DEBUG)
            file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
            logger.addHandler(file_handler)
        except (IOError, OSError) as e:
            # the run continues without a log file
            stderr_handler = logging.StreamHandler(sys.stderr)
            stderr_handler.setLevel(logging.ERROR)
            logger.addHandler(stderr_handler)
            logger.error(f"Failed to set up log file {log_file}: {e}")
    return logger

