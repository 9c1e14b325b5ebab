"""
Unit tests for configuration management.

Tests Config class and related functionality in src.bcelab.core.config module.
"""

import tempfile
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.bcelab.core.config import (
    Config,
    EnvOverrides,
    LabConfig,
    LimitsConfig,
    LoggingConfig,
    SolverConfig,
)
from src.bcelab.core.errors import ConfigurationError
from src.bcelab.core.types import DEFAULT_CAP_RULES, DEFAULT_DIRECTIONS


@pytest.fixture
def lab_config():
    """The singleton, restored to its default sources afterwards."""
    instance = Config()
    original = instance.config_path
    yield instance
    instance.config_path = original
    instance.reload()


class TestConfigModels:
    """Test Pydantic configuration models."""

    def test_limits_defaults(self):
        """Test LimitsConfig default values."""
        limits = LimitsConfig()

        assert limits.rules == DEFAULT_CAP_RULES
        assert limits.histories >= 1
        assert limits.deviations >= 1

    def test_limits_must_be_positive(self):
        """Test caps below one are rejected."""
        with pytest.raises(ValidationError):
            LimitsConfig(rules=0)

    def test_solver_defaults(self):
        """Test SolverConfig default values."""
        solver = SolverConfig()

        assert solver.directions == DEFAULT_DIRECTIONS
        assert solver.lp_dump_dir is None

    def test_logging_config_validation(self):
        """Test LoggingConfig level validation."""
        with pytest.raises(ValidationError):
            LoggingConfig(level="INVALID")

    def test_logging_level_is_uppercased(self):
        """Test lower-case levels are normalised."""
        assert LoggingConfig(level="debug").level == "DEBUG"

    def test_config_extra_fields_allowed(self):
        """Test that extra fields are allowed in config."""
        config = LabConfig(extra_field="value")

        assert "extra_field" in config.model_dump()


class TestConfigSingleton:
    """Test Config singleton pattern."""

    def test_singleton_pattern(self):
        """Test that Config is a singleton."""
        assert Config() is Config()

    def test_singleton_thread_safety(self):
        """Test singleton pattern is thread-safe."""
        import threading

        instances = []

        def create_instance():
            instances.append(Config())

        threads = [threading.Thread(target=create_instance) for _ in range(10)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert all(inst is instances[0] for inst in instances)


class TestConfigLoading:
    """Test configuration loading from files."""

    def test_load_valid_yaml_config(self, lab_config):
        """Test loading valid YAML configuration."""
        with tempfile.TemporaryDirectory() as tmpdir:
            config_file = Path(tmpdir) / "bcelab.yaml"
            config_file.write_text(
                """
limits:
  rules: 500
  histories: 2000

solver:
  directions: 12

output:
  show_labels: false
"""
            )
            lab_config.load(config_file)

            assert lab_config.limits.rules == 500
            assert lab_config.limits.histories == 2000
            assert lab_config.solver.directions == 12
            assert lab_config.output.show_labels is False

    def test_missing_config_file_means_defaults(self, lab_config):
        """Test a missing YAML file falls back to defaults."""
        with tempfile.TemporaryDirectory() as tmpdir:
            lab_config.load(Path(tmpdir) / "nonexistent.yaml")

            assert lab_config.limits.rules == DEFAULT_CAP_RULES
            assert lab_config.solver.directions == DEFAULT_DIRECTIONS

    def test_malformed_yaml(self, lab_config):
        """Test malformed YAML raises ConfigurationError."""
        with tempfile.TemporaryDirectory() as tmpdir:
            config_file = Path(tmpdir) / "bcelab.yaml"
            config_file.write_text("limits: [unclosed")

            with pytest.raises(ConfigurationError, match="Malformed"):
                lab_config.load(config_file)

    def test_yaml_must_be_mapping(self, lab_config):
        """Test a YAML list is refused."""
        with tempfile.TemporaryDirectory() as tmpdir:
            config_file = Path(tmpdir) / "bcelab.yaml"
            config_file.write_text("- rules\n- 10\n")

            with pytest.raises(ConfigurationError, match="not a mapping"):
                lab_config.load(config_file)


class TestEnvironmentVariables:
    """Test environment variable integration."""

    def test_env_variables_override_yaml(self, lab_config, monkeypatch):
        """Test that environment variables override YAML values."""
        with tempfile.TemporaryDirectory() as tmpdir:
            config_file = Path(tmpdir) / "bcelab.yaml"
            config_file.write_text(
                """
limits:
  rules: 500
  deviations: 700
"""
            )
            monkeypatch.setenv("BCELAB_CAP_RULES", "42")
            lab_config.load(config_file)

            assert lab_config.limits.rules == 42
            assert lab_config.limits.deviations == 700

    def test_env_sections(self, monkeypatch):
        """Test flat variables map onto sections."""
        monkeypatch.setenv("BCELAB_CAP_HISTORIES", "99")
        monkeypatch.setenv("BCELAB_LOG_LEVEL", "debug")
        monkeypatch.setenv("BCELAB_LP_DUMP_DIR", "lp-dumps")

        sections = EnvOverrides().as_sections()

        assert sections["limits"] == {"histories": 99}
        assert sections["logging"] == {"level": "debug"}
        assert sections["solver"] == {"lp_dump_dir": "lp-dumps"}

    def test_invalid_env_value(self, lab_config, monkeypatch):
        """Test a non-integer cap raises ConfigurationError."""
        monkeypatch.setenv("BCELAB_CAP_RULES", "many")

        with pytest.raises(ConfigurationError):
            lab_config.load()

    def test_config_path_from_env(self, lab_config, monkeypatch):
        """Test BCELAB_CONFIG selects the YAML file."""
        with tempfile.TemporaryDirectory() as tmpdir:
            config_file = Path(tmpdir) / "other.yaml"
            config_file.write_text("solver:\n  directions: 3\n")
            monkeypatch.setenv("BCELAB_CONFIG", str(config_file))

            lab_config.load()

            assert lab_config.config_path == config_file
            assert lab_config.solver.directions == 3


class TestOverrides:
    """Test programmatic overrides (command-line flags)."""

    def test_override_applies(self, lab_config):
        """Test override updates a section."""
        lab_config.override(limits={"rules": 10})

        assert lab_config.limits.rules == 10

    def test_override_survives_load(self, lab_config):
        """Test overrides win over file values on reload from disk."""
        lab_config.override(solver={"directions": 5})
        lab_config.load()

        assert lab_config.solver.directions == 5

    def test_reload_drops_overrides(self, lab_config):
        """Test reload forgets programmatic overrides."""
        lab_config.override(limits={"rules": 10})
        lab_config.reload()

        assert lab_config.limits.rules == DEFAULT_CAP_RULES

    def test_invalid_override(self, lab_config):
        """Test an invalid override raises ConfigurationError."""
        with pytest.raises(ConfigurationError, match="validation failed"):
            lab_config.override(limits={"rules": 0})


class TestConfigProperties:
    """Test Config class properties."""

    def test_get_method_dot_notation(self, lab_config):
        """Test get method with dot notation."""
        lab_config.override(limits={"rules": 77})

        assert lab_config.get("limits.rules") == 77
        assert lab_config.get("solver.directions") == DEFAULT_DIRECTIONS
        assert lab_config.get("nonexistent.key", "default") == "default"

    def test_to_dict_method(self, lab_config):
        """Test to_dict method."""
        config_dict = lab_config.to_dict()

        assert isinstance(config_dict, dict)
        assert set(lab_config.sections()) <= set(config_dict)
        assert "limits" in config_dict
        assert "logging" in config_dict

    def test_repr(self, lab_config):
        """Test the representation names the rule cap."""
        assert "rules_cap=" in repr(lab_config)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
