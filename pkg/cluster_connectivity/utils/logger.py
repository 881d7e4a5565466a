"""
Logger Setup Utility
====================
Configures toolkit-wide logging.

Console output goes to stderr; stdout carries command summaries only.
"""

import logging
import sys
from pathlib import Path

from cluster_connectivity.core.errors import ConfigError

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def setup_logging(config):
    """
    Setup logging configuration.

    Args:
        config: Logging configuration dict with:
            - level: DEBUG, INFO, WARNING, ERROR or CRITICAL
            - log_file: Optional path for a DEBUG-level file log
            - console_output: Log to stderr
    """
    log_level = str(config.get("level", "INFO")).upper()
    log_file = config.get("log_file")
    console_output = config.get("console_output", True)
    if log_level not in LEVELS:
        raise ConfigError(f"Unknown log level '{log_level}'")

    detailed_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, log_level))
    root_logger.handlers = []

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(detailed_formatter)
        root_logger.addHandler(file_handler)
        root_logger.setLevel(logging.DEBUG)

    if console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(getattr(logging, log_level))
        console_handler.setFormatter(detailed_formatter)
        root_logger.addHandler(console_handler)

    logging.debug(f"Logging initialized - Level: {log_level}, log file: {log_file}")
