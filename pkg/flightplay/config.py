"""
Configuration management for flightplay.

Settings come from an optional YAML file, environment variables and CLI
flags. The file and the environment are handled here; CLI precedence is
applied by ``ConfigMerger``.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from flightplay.exceptions import ConfigurationError
from flightplay.models import MIN_RATE

logger = logging.getLogger(__name__)


class InterpolationConfig(BaseModel):
    """Trajectory interpolation settings"""
    samples_per_segment: int = Field(default=5, description="Interpolated samples between consecutive inputs")
    degree: int = Field(default=3, description="B-spline degree for lon/lat")

    @field_validator('samples_per_segment')
    @classmethod
    def validate_samples(cls, v):
        if v < 0:
            raise ValueError('samples_per_segment must be non-negative')
        return v

    @field_validator('degree')
    @classmethod
    def validate_degree(cls, v):
        if not (1 <= v <= 5):
            raise ValueError('degree must be between 1 and 5')
        return v


class PlaybackConfig(BaseModel):
    """Headless playback settings"""
    fps: int = Field(default=30, description="Frames per simulated second")
    rate: float = Field(default=1.0, description="Initial time multiplier")

    @field_validator('fps')
    @classmethod
    def validate_fps(cls, v):
        if v < 1:
            raise ValueError('fps must be at least 1')
        return v

    @field_validator('rate')
    @classmethod
    def validate_rate(cls, v):
        if v < MIN_RATE:
            raise ValueError(f'rate must be at least {MIN_RATE}')
        return v


class ProjectionConfig(BaseModel):
    """Fixed projection and window matrix parameters"""
    fov_y_deg: float = Field(default=60.0, description="Vertical field of view in degrees")
    aspect: float = Field(default=16.0 / 9.0, description="Width over height")
    near: float = Field(default=1.0, description="Near plane distance in meters")
    far: float = Field(default=1e8, description="Far plane distance in meters")
    width_px: int = Field(default=1920, description="Window width in pixels")
    height_px: int = Field(default=1080, description="Window height in pixels")

    @field_validator('fov_y_deg')
    @classmethod
    def validate_fov(cls, v):
        if not (0 < v < 180):
            raise ValueError('fov_y_deg must be in (0, 180)')
        return v

    @field_validator('aspect', 'near', 'far')
    @classmethod
    def validate_positive(cls, v):
        if v <= 0:
            raise ValueError('must be positive')
        return v

    @field_validator('width_px', 'height_px')
    @classmethod
    def validate_pixels(cls, v):
        if v < 1:
            raise ValueError('pixel dimensions must be at least 1')
        return v


class KmlConfig(BaseModel):
    """KML style settings"""
    input_icon_href: str = Field(default="icons/red-dot.png", description="Icon for input trajectory marks")
    interp_icon_href: str = Field(default="icons/green-mark.png", description="Icon for interpolated marks")


class IngestConfig(BaseModel):
    """Flight directory ingestion settings"""
    config_glob: str = Field(default="*.cfg", description="Glob selecting flight configuration files")
    max_workers: int = Field(default=4, description="Parallel file parsers")

    @field_validator('max_workers')
    @classmethod
    def validate_workers(cls, v):
        if v < 1:
            raise ValueError('max_workers must be at least 1')
        return v


class LoggingConfig(BaseModel):
    """Logging settings"""
    level: str = Field(default="INFO", description="Log level name")
    format: str = Field(default="json", description="json or text")

    @field_validator('level')
    @classmethod
    def validate_level(cls, v):
        v = v.upper()
        if v not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f'unknown log level: {v}')
        return v

    @field_validator('format')
    @classmethod
    def validate_format(cls, v):
        if v not in ('json', 'text'):
            raise ValueError('format must be json or text')
        return v


class FlightPlayConfig(BaseModel):
    """Complete configuration"""
    interpolation: InterpolationConfig = Field(default_factory=InterpolationConfig)
    playback: PlaybackConfig = Field(default_factory=PlaybackConfig)
    projection: ProjectionConfig = Field(default_factory=ProjectionConfig)
    kml: KmlConfig = Field(default_factory=KmlConfig)
    ingest: IngestConfig = Field(default_factory=IngestConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


def load_config_file(config_path: str) -> Dict[str, Any]:
    """
    Load raw settings from a YAML file.

    Args:
        config_path: Path to the YAML file

    Returns:
        Dictionary of settings (empty for an empty file)

    Raises:
        ConfigurationError: If the file is missing or not valid YAML
    """
    path = Path(config_path)

    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}", config_file=str(path))

    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        logger.error(f"Invalid YAML in config file {path}: {e}")
        raise ConfigurationError(f"invalid YAML: {e}", config_file=str(path)) from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError("top level must be a mapping", config_file=str(path))

    logger.info(f"Loaded configuration from {path}")
    return data


def load_config(config_path: Optional[str] = None) -> FlightPlayConfig:
    """
    Load and validate configuration.

    Args:
        config_path: Optional YAML file; defaults apply when absent

    Returns:
        Validated FlightPlayConfig

    Raises:
        ConfigurationError: If the file is unreadable or a value is invalid
    """
    data = load_config_file(config_path) if config_path else {}
    return build_config(data, source=config_path)


def build_config(data: Dict[str, Any], source: Optional[str] = None) -> FlightPlayConfig:
    """Validate a settings dictionary into a FlightPlayConfig"""
    try:
        return FlightPlayConfig(**data)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first.get('loc', ()))
        raise ConfigurationError(first.get('msg', str(e)), config_key=key, config_file=source) from e


ENV_OVERRIDES = {
    'FLIGHTPLAY_FPS': ('playback', 'fps'),
    'FLIGHTPLAY_RATE': ('playback', 'rate'),
    'FLIGHTPLAY_SAMPLES_PER_SEGMENT': ('interpolation', 'samples_per_segment'),
    'FLIGHTPLAY_LOG_LEVEL': ('logging', 'level'),
    'FLIGHTPLAY_LOG_FORMAT': ('logging', 'format'),
}


def env_overrides() -> Dict[str, Dict[str, str]]:
    """
    Collect settings from environment variables.

    Environment variables:
    - FLIGHTPLAY_FPS: playback frames per second
    - FLIGHTPLAY_RATE: playback time multiplier
    - FLIGHTPLAY_SAMPLES_PER_SEGMENT: interpolated samples per segment
    - FLIGHTPLAY_LOG_LEVEL: log level
    - FLIGHTPLAY_LOG_FORMAT: json or text

    Returns:
        Nested dictionary of the overrides that are set
    """
    overrides: Dict[str, Dict[str, str]] = {}
    for env_name, (section, key) in ENV_OVERRIDES.items():
        value = os.getenv(env_name)
        if value:
            overrides.setdefault(section, {})[key] = value
    return overrides


def get_config_from_env(config_path: Optional[str] = None) -> FlightPlayConfig:
    """
    Load configuration with environment variable overrides.

    The config file is taken from ``config_path`` or, when that is absent,
    from FLIGHTPLAY_CONFIG.

    Returns:
        Complete FlightPlayConfig with environment overrides applied
    """
    path = config_path or os.getenv('FLIGHTPLAY_CONFIG') or None
    data = load_config_file(path) if path else {}

    for section, values in env_overrides().items():
        merged = dict(data.get(section) or {})
        merged.update(values)
        data[section] = merged

    config = build_config(data, source=path)
    logger.debug("Configuration loaded with environment variable overrides")
    return config
