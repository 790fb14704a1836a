"""
Pydantic value models shared across the engine.

All models are frozen: once a flight has been ingested its points, samples
and frame records can be shared freely between threads.
"""

import math
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FORMAT_VERSION = 1

# slowest playback speed; smaller multipliers vanish against the frame step
MIN_RATE = 1e-6


def normalize_heading(value: float) -> float:
    """Wrap an angle into [0, 360)"""
    wrapped = value % 360.0
    # -1e-17 % 360 rounds to 360.0
    if wrapped >= 360.0:
        wrapped -= 360.0
    return wrapped + 0.0


def normalize_signed(value: float) -> float:
    """Wrap an angle into [-180, 180)"""
    wrapped = (value + 180.0) % 360.0
    if wrapped >= 360.0:
        wrapped -= 360.0
    return wrapped - 180.0 + 0.0


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


class GeodeticPoint(_Frozen):
    """Longitude/latitude in degrees and height in meters above the ellipsoid"""
    lon: float = Field(..., ge=-180.0, le=180.0, allow_inf_nan=False)
    lat: float = Field(..., ge=-90.0, le=90.0, allow_inf_nan=False)
    h: float = Field(default=0.0, allow_inf_nan=False)


class EcefPoint(_Frozen):
    """Earth-Centered Earth-Fixed position in meters"""
    x: float = Field(..., allow_inf_nan=False)
    y: float = Field(..., allow_inf_nan=False)
    z: float = Field(..., allow_inf_nan=False)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)


class LsrVector(_Frozen):
    """Offset in the local east/north/up tangent frame, meters"""
    u: float = Field(..., allow_inf_nan=False, description="east")
    v_north: float = Field(..., allow_inf_nan=False, description="north")
    w: float = Field(..., allow_inf_nan=False, description="up")


class Posture(_Frozen):
    """Aviation posture angles in degrees"""
    heading: float = Field(default=0.0, allow_inf_nan=False)
    pitch: float = Field(default=0.0, ge=-90.0, le=90.0, allow_inf_nan=False)
    roll: float = Field(default=0.0, ge=-180.0, le=180.0, allow_inf_nan=False)

    @field_validator('heading')
    @classmethod
    def wrap_heading(cls, v):
        return normalize_heading(v)


class PathPoint(_Frozen):
    """One input flight sample read from a configuration file"""
    time: float = Field(..., ge=0.0, allow_inf_nan=False)
    lon: float = Field(..., ge=-180.0, le=180.0, allow_inf_nan=False)
    lat: float = Field(..., ge=-90.0, le=90.0, allow_inf_nan=False)
    height: float = Field(..., allow_inf_nan=False)
    heading: float = Field(..., allow_inf_nan=False)
    pitch: float = Field(..., ge=-90.0, le=90.0, allow_inf_nan=False)
    roll: float = Field(..., ge=-180.0, le=180.0, allow_inf_nan=False)
    photo_ref: str = Field(default="", description="Photograph path")

    @field_validator('heading')
    @classmethod
    def wrap_heading(cls, v):
        return normalize_heading(v)

    @property
    def geodetic(self) -> GeodeticPoint:
        return GeodeticPoint(lon=self.lon, lat=self.lat, h=self.height)

    @property
    def posture(self) -> Posture:
        return Posture(heading=self.heading, pitch=self.pitch, roll=self.roll)


class PhotoMeta(_Frozen):
    """Raster facts needed to place a photograph on the globe"""
    image_file: str = Field(..., min_length=1)
    width_px: int = Field(..., ge=1)
    height_px: int = Field(..., ge=1)
    pixel_scale_deg: Tuple[float, float] = Field(..., description="Degrees per pixel (x, y)")

    @field_validator('pixel_scale_deg')
    @classmethod
    def validate_scale(cls, v):
        if not all(math.isfinite(s) and s > 0 for s in v):
            raise ValueError('pixel scales must be positive')
        return v


class SampleOrigin(str, Enum):
    """Whether a trajectory sample is an input point or an interpolated one"""
    INPUT = "input"
    INTERPOLATED = "interpolated"


class SampledPose(_Frozen):
    """A trajectory sample after interpolation"""
    time: float = Field(..., allow_inf_nan=False)
    geodetic: GeodeticPoint
    posture: Posture
    origin: SampleOrigin

    @property
    def is_input(self) -> bool:
        return self.origin is SampleOrigin.INPUT


class GeometryHeader(_Frozen):
    """Key/value sidecar placing a photograph on the globe"""
    type: str = "ossimEquDistCylProjection"
    origin_latitude: float = 0.0
    central_meridian: float = 0.0
    pixel_scale_units: str = "degrees"
    pixel_scale_xy: Tuple[float, float]
    datum: str = "WGE"
    tie_point_units: str = "degrees"
    tie_point_xy: Tuple[float, float]
    pixel_type: str = "area"

    @field_validator('pixel_scale_xy')
    @classmethod
    def validate_scale(cls, v):
        if not all(math.isfinite(s) and s > 0 for s in v):
            raise ValueError('pixel scales must be positive')
        return v

    @field_validator('tie_point_xy')
    @classmethod
    def validate_tie_point(cls, v):
        lon, lat = v
        if not (-180.0 <= lon <= 180.0) or not (-90.0 <= lat <= 90.0):
            raise ValueError(f'tie point ({lon}, {lat}) outside lon/lat ranges')
        return v


class FrameRecord(_Frozen):
    """One rendered playback frame"""
    frame_index: int = Field(..., ge=0)
    sim_time: float
    eye_geodetic: GeodeticPoint
    eye_ecef: EcefPoint
    view_matrix: Tuple[float, ...] = Field(..., description="4x4 row-major")

    @field_validator('view_matrix')
    @classmethod
    def validate_rigid(cls, v):
        if len(v) != 16:
            raise ValueError('view matrix needs 16 entries')
        if tuple(v[12:]) != (0.0, 0.0, 0.0, 1.0):
            raise ValueError('view matrix bottom row must be 0 0 0 1')
        rows = [v[0:3], v[4:7], v[8:11]]
        for i in range(3):
            for j in range(3):
                dot = sum(a * b for a, b in zip(rows[i], rows[j]))
                if abs(dot - (1.0 if i == j else 0.0)) > 1e-9:
                    raise ValueError('view matrix rotation block is not orthonormal')
        return tuple(v)


class SimMode(str, Enum):
    """Rendering mode of the playback engine"""
    IDLE = "idle"
    SIMULATION = "simulation"


class SimCommand(str, Enum):
    """Scripted playback commands"""
    START = "start"
    PAUSE = "pause"
    STOP = "stop"
    SEEK = "seek"
    RATE = "rate"


class SimEvent(_Frozen):
    """A command addressed to a frame index"""
    at_frame: int = Field(..., ge=0)
    command: SimCommand
    value: Optional[float] = Field(default=None, allow_inf_nan=False)

    @model_validator(mode='after')
    def validate_value(self):
        if self.command in (SimCommand.SEEK, SimCommand.RATE) and self.value is None:
            raise ValueError(f'{self.command.value} needs a value')
        if self.command is SimCommand.RATE and self.value < MIN_RATE:
            raise ValueError(f'rate must be at least {MIN_RATE}')
        return self


class FlightSettings(_Frozen):
    """Interpolation settings a flight file was produced with"""
    samples_per_segment: int = Field(..., ge=0)
    degree: int = Field(default=3, ge=1)


class FlightInput(_Frozen):
    """An input point together with its photograph facts"""
    point: PathPoint
    photo: PhotoMeta


class FlightStore(_Frozen):
    """Persisted flight: inputs, interpolated samples and settings"""
    format_version: int = FORMAT_VERSION
    settings: FlightSettings
    inputs: List[FlightInput]
    samples: List[SampledPose]

    @model_validator(mode='after')
    def validate_consistency(self):
        if self.format_version != FORMAT_VERSION:
            raise ValueError(f'unsupported format_version {self.format_version}')

        n = len(self.inputs)
        if n < 2:
            raise ValueError('a flight needs at least 2 input points')

        times = [item.point.time for item in self.inputs]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError('input times must be strictly increasing')

        expected = n + (n - 1) * self.settings.samples_per_segment
        if len(self.samples) != expected:
            raise ValueError(f'expected {expected} samples, found {len(self.samples)}')

        sample_times = [s.time for s in self.samples]
        if any(b <= a for a, b in zip(sample_times, sample_times[1:])):
            raise ValueError('sample times must be strictly increasing')

        if sum(1 for s in self.samples if s.is_input) != n:
            raise ValueError('every input point must appear once among the samples')
        return self

    @property
    def points(self) -> List[PathPoint]:
        return [item.point for item in self.inputs]

    @property
    def photos(self) -> List[PhotoMeta]:
        return [item.photo for item in self.inputs]
