"""
Configuration Loader Utility
============================
Loads the toolkit configuration and fills in defaults.
"""

import logging
from pathlib import Path

import yaml

from cluster_connectivity.core.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[1] / "config" / "config.yaml"


def load_config(config_path=None):
    """
    Load configuration from a YAML file merged over the defaults.

    Args:
        config_path: Path to config file (default: the packaged config.yaml)

    Returns:
        dict: Configuration dictionary

    Raises:
        ConfigError: If the file is not valid YAML or not a mapping
    """
    config_file = Path(config_path) if config_path else DEFAULT_CONFIG_PATH

    if not config_file.exists():
        logger.warning(f"Config file not found: {config_file}, using defaults")
        return get_default_config()

    try:
        with open(config_file, "r") as f:
            config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse config file {config_file}: {e}") from e
    if not isinstance(config, dict):
        raise ConfigError(f"Config file {config_file} must hold a mapping")

    return merge_configs(get_default_config(), config)


def merge_configs(default, custom):
    """
    Recursively merge custom config into default.

    Args:
        default: Default configuration
        custom: Custom configuration

    Returns:
        Merged configuration
    """
    if isinstance(default, dict) and isinstance(custom, dict):
        merged = default.copy()
        for key, value in custom.items():
            merged[key] = merge_configs(merged[key], value) if key in merged else value
        return merged
    return custom


def get_default_config():
    """
    Get default toolkit configuration.

    Returns:
        dict: Default config
    """
    return {
        "logging": {
            "level": "INFO",
            "log_file": None,
            "console_output": True,
        },
        "treatment": {
            "criterion": "wcc",
            "threshold_rule": "log10",
            "num_processors": 1,
        },
        "dl": {
            "model": "dc",
            "beta": 1.0,
            "edges_dl": True,
        },
        "inference": {
            "model": "chosen",
            "beta": 1.0,
            "edges_dl": True,
            "seed": 0,
            "restarts": 5,
            "num_processors": 1,
            "move_sweep_limit": 10,
            "sweeps_per_merge": 1,
            "merge_batch_fraction": 0.1,
            "merge_candidates_per_block": 8,
            "all_pairs_max_blocks": 64,
            "random_top_k": 3,
        },
        "metrics": {
            "thresholds": [0.0, 0.1, 0.25, 0.5],
            "min_size": 1,
            "average_method": "arithmetic",
            "density_bin_edges": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        },
        "synthgen": {
            "seed": 0,
        },
    }
