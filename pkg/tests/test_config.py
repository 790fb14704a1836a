"""
Tests for configuration loading and validation.
"""

import pytest
from pydantic import ValidationError

from flightplay.config import (
    FlightPlayConfig,
    InterpolationConfig,
    LoggingConfig,
    PlaybackConfig,
    ProjectionConfig,
    env_overrides,
    get_config_from_env,
    load_config,
    load_config_file,
)
from flightplay.exceptions import ConfigurationError
from tests.conftest import REPO_ROOT


@pytest.mark.unit
class TestConfigFileLoading:
    """Test YAML settings files"""

    def test_load_bundled_config(self):
        """Test that the sample config in the repository equals the defaults"""
        config = load_config(str(REPO_ROOT / "flightplay.yaml"))
        assert config == FlightPlayConfig()

    def test_load_partial_file(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("playback:\n  fps: 60\n")

        config = load_config(str(path))
        assert config.playback.fps == 60
        assert config.playback.rate == 1.0
        assert config.interpolation.samples_per_segment == 5

    def test_empty_file(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("")
        assert load_config_file(str(path)) == {}

    def test_missing_file(self, tmp_path):
        """Test that a missing file raises ConfigurationError naming it"""
        with pytest.raises(ConfigurationError) as exc_info:
            load_config(str(tmp_path / "absent.yaml"))
        assert exc_info.value.details['config_file'].endswith("absent.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("playback: [unclosed\n")
        with pytest.raises(ConfigurationError):
            load_config(str(path))

    def test_non_mapping_top_level(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError):
            load_config(str(path))

    def test_invalid_value_names_key(self, tmp_path):
        """Test that a bad value reports its dotted config key"""
        path = tmp_path / "settings.yaml"
        path.write_text("projection:\n  fov_y_deg: 200\n")
        with pytest.raises(ConfigurationError) as exc_info:
            load_config(str(path))
        assert exc_info.value.details['config_key'] == "projection.fov_y_deg"


@pytest.mark.unit
class TestConfigValidation:
    """Test section models"""

    def test_defaults(self):
        config = FlightPlayConfig()
        assert config.interpolation.samples_per_segment == 5
        assert config.interpolation.degree == 3
        assert config.playback.fps == 30
        assert config.projection.width_px == 1920
        assert config.ingest.config_glob == "*.cfg"
        assert config.logging.format == "json"

    @pytest.mark.parametrize("model,kwargs", [
        (InterpolationConfig, {"samples_per_segment": -1}),
        (InterpolationConfig, {"degree": 0}),
        (PlaybackConfig, {"fps": 0}),
        (PlaybackConfig, {"rate": 0.0}),
        (PlaybackConfig, {"rate": 1e-300}),
        (ProjectionConfig, {"near": -1.0}),
        (ProjectionConfig, {"height_px": 0}),
        (LoggingConfig, {"level": "VERBOSE"}),
        (LoggingConfig, {"format": "xml"}),
    ])
    def test_invalid_values(self, model, kwargs):
        with pytest.raises(ValidationError):
            model(**kwargs)

    def test_log_level_uppercased(self):
        assert LoggingConfig(level="debug").level == "DEBUG"


@pytest.mark.unit
class TestEnvironmentOverrides:
    """Test FLIGHTPLAY_* variables"""

    def test_no_variables(self, clean_env):
        assert env_overrides() == {}
        assert get_config_from_env() == FlightPlayConfig()

    def test_env_var_overrides(self, clean_env):
        clean_env.setenv("FLIGHTPLAY_FPS", "24")
        clean_env.setenv("FLIGHTPLAY_LOG_LEVEL", "warning")

        config = get_config_from_env()
        assert config.playback.fps == 24
        assert config.logging.level == "WARNING"

    def test_env_overrides_file(self, clean_env, tmp_path):
        """Test that the environment wins over the file"""
        path = tmp_path / "settings.yaml"
        path.write_text("playback:\n  fps: 60\n  rate: 2.0\n")
        clean_env.setenv("FLIGHTPLAY_FPS", "12")

        config = get_config_from_env(str(path))
        assert config.playback.fps == 12
        assert config.playback.rate == 2.0

    def test_config_path_from_env(self, clean_env, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("interpolation:\n  samples_per_segment: 9\n")
        clean_env.setenv("FLIGHTPLAY_CONFIG", str(path))

        assert get_config_from_env().interpolation.samples_per_segment == 9

    def test_invalid_env_value(self, clean_env):
        clean_env.setenv("FLIGHTPLAY_RATE", "fast")
        with pytest.raises(ConfigurationError) as exc_info:
            get_config_from_env()
        assert exc_info.value.details['config_key'] == "playback.rate"
