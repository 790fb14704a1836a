"""
Pytest configuration and fixtures for the flightplay test suite.
"""

import shutil
from pathlib import Path
from typing import Dict, List

import numpy as np
import pytest
from click.testing import CliRunner

from flightplay.config_merger import ConfigMerger
from flightplay.models import PathPoint, PhotoMeta

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_FLIGHT_DIR = REPO_ROOT / "data" / "demo_flight"


def make_config_text(**overrides) -> str:
    """Render a flight config record; pass a key as None to drop it"""
    values: Dict[str, object] = {
        "image_file": "photo.jpg",
        "time": 0,
        "longitude": 121.48844,
        "latitude": 53.332649,
        "height": 1000.0,
        "heading": 45.0,
        "pitch": 0.0,
        "roll": 0.0,
        "image_width_px": 1024,
        "image_height_px": 768,
        "pixel_scale_deg_x": 0.00001,
        "pixel_scale_deg_y": 0.00001,
    }
    values.update(overrides)
    return "".join(f"{k}: {v}\n" for k, v in values.items() if v is not None)


def make_point(time: float, lon: float, lat: float, height: float = 1000.0,
               heading: float = 0.0, pitch: float = 0.0, roll: float = 0.0) -> PathPoint:
    return PathPoint(time=time, lon=lon, lat=lat, height=height,
                     heading=heading, pitch=pitch, roll=roll, photo_ref=f"p{time}.jpg")


@pytest.fixture
def rng():
    """Seeded random generator so sweeps are reproducible"""
    return np.random.default_rng(20240611)


@pytest.fixture
def sample_photo() -> PhotoMeta:
    return PhotoMeta(image_file="photo.jpg", width_px=100, height_px=100, pixel_scale_deg=(0.01, 0.01))


@pytest.fixture
def straight_points() -> List[PathPoint]:
    """Five points heading north-east with constant posture"""
    return [
        make_point(float(i), 121.0 + 0.001 * i, 53.0 + 0.0005 * i, heading=30.0)
        for i in range(5)
    ]


@pytest.fixture
def demo_flight_dir(tmp_path) -> Path:
    """Copy of the bundled 10-point demo flight with placeholder photographs"""
    target = tmp_path / "demo_flight"
    shutil.copytree(DEMO_FLIGHT_DIR, target)
    for cfg in sorted(target.glob("*.cfg")):
        cfg.with_suffix(".jpg").write_bytes(b"\xff\xd8\xff\xd9")
    return target


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def config_merger():
    """ConfigMerger instance for testing"""
    return ConfigMerger()


@pytest.fixture
def clean_env(monkeypatch):
    """Remove FLIGHTPLAY_* variables so tests see only what they set"""
    for name in ("FLIGHTPLAY_CONFIG", "FLIGHTPLAY_FPS", "FLIGHTPLAY_RATE",
                 "FLIGHTPLAY_SAMPLES_PER_SEGMENT", "FLIGHTPLAY_LOG_LEVEL", "FLIGHTPLAY_LOG_FORMAT"):
        monkeypatch.delenv(name, raising=False)
    return monkeypatch
