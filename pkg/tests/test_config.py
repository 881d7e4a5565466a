import logging

import pytest

from cluster_connectivity.core.errors import ConfigError
from cluster_connectivity.core.inference import InferenceConfig
from cluster_connectivity.core.metrics import DEFAULT_BIN_EDGES
from cluster_connectivity.core.treatments import ConnectivityTreatment
from cluster_connectivity.utils.config_loader import (
    DEFAULT_CONFIG_PATH,
    get_default_config,
    load_config,
    merge_configs,
)
from cluster_connectivity.utils.logger import setup_logging


class TestConfigLoader:
    def test_packaged_config_matches_defaults(self):
        assert DEFAULT_CONFIG_PATH.exists()
        assert load_config() == get_default_config()

    def test_missing_file_falls_back_to_defaults(self, tmp_path):
        assert load_config(tmp_path / "absent.yaml") == get_default_config()

    def test_partial_override(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("inference:\n  restarts: 2\nlogging:\n  level: DEBUG\n")
        config = load_config(path)
        assert config["inference"]["restarts"] == 2
        assert config["inference"]["model"] == "chosen"
        assert config["logging"]["level"] == "DEBUG"

    @pytest.mark.parametrize("text", ["a: [1, 2", "- just\n- a list\n"])
    def test_invalid_files(self, tmp_path, text):
        path = tmp_path / "c.yaml"
        path.write_text(text)
        with pytest.raises(ConfigError):
            load_config(path)

    def test_merge_is_recursive(self):
        merged = merge_configs({"a": {"x": 1, "y": 2}, "b": 3}, {"a": {"y": 5}, "c": 4})
        assert merged == {"a": {"x": 1, "y": 5}, "b": 3, "c": 4}

    def test_defaults_build_valid_objects(self):
        config = get_default_config()
        InferenceConfig.from_dict(config["inference"])
        assert config["inference"]["num_processors"] == 1
        assert ConnectivityTreatment(config["treatment"]).criterion == "wcc"
        assert tuple(config["metrics"]["density_bin_edges"]) == pytest.approx(DEFAULT_BIN_EDGES)


class TestLogging:
    @pytest.fixture(autouse=True)
    def restore_root_logger(self):
        root = logging.getLogger()
        handlers, level = root.handlers[:], root.level
        yield
        root.handlers, root.level = handlers, level

    def test_file_log_captures_debug(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        setup_logging({"level": "WARNING", "log_file": str(log_file), "console_output": False})
        logging.getLogger("cluster_connectivity.test").debug("detail line")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "detail line" in log_file.read_text()

    def test_unknown_level(self):
        with pytest.raises(ConfigError):
            setup_logging({"level": "LOUD"})
