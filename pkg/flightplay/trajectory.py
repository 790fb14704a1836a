"""
Flight ingestion, trajectory interpolation and the animation path.

The pipeline runs in three stages:

1. ``parse_flight_config`` / ``ingest_flight`` turn per-photograph
   configuration files into time-sorted input points.
2. ``interpolate_trajectory`` densifies them: longitude/latitude follow an
   interpolating cubic B-spline, posture angles are blended linearly along
   the shortest arc, and height is held from the preceding input point.
3. ``build_animation_path`` converts every sample into an ECEF camera
   ``ControlPoint`` keyed by time; ``sample_path`` looks the path up at any
   time inside its range.
"""

import bisect
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic import ValidationError as PydanticValidationError
from scipy.spatial.transform import Rotation, Slerp

from flightplay.camera import rotation_from_posture, rotation_in_lsr
from flightplay.exceptions import (
    DomainError,
    ParseError,
    PathRangeError,
    UnsupportedInputError,
    ValidationError,
)
from flightplay.geodesy import WGS84, geodetic_to_ecef, lsr_basis_at
from flightplay.models import (
    EcefPoint,
    FlightInput,
    GeodeticPoint,
    PathPoint,
    PhotoMeta,
    Posture,
    SampledPose,
    SampleOrigin,
    normalize_heading,
    normalize_signed,
)
from flightplay.parallel import parse_in_parallel
from flightplay.spline import DEFAULT_DEGREE, InterpolatingBSpline

logger = logging.getLogger(__name__)

REQUIRED_KEYS = (
    'image_file',
    'longitude',
    'latitude',
    'height',
    'heading',
    'pitch',
    'roll',
    'image_width_px',
    'image_height_px',
    'pixel_scale_deg_x',
    'pixel_scale_deg_y',
)
OPTIONAL_KEYS = ('time',)

# model field -> configuration key, for error reporting
FIELD_TO_KEY = {
    'time': 'time',
    'lon': 'longitude',
    'lat': 'latitude',
    'height': 'height',
    'heading': 'heading',
    'pitch': 'pitch',
    'roll': 'roll',
    'image_file': 'image_file',
    'width_px': 'image_width_px',
    'height_px': 'image_height_px',
    'pixel_scale_deg': 'pixel_scale_deg_x',
}

MAX_LONGITUDE_GAP_DEG = 180.0
UNIT_NORM_TOLERANCE = 1e-6


class FlightRecord(NamedTuple):
    """One parsed configuration file"""
    point: PathPoint
    photo: PhotoMeta
    source: str
    timed: bool


# ---------------------------------------------------------------------------
# Configuration files
# ---------------------------------------------------------------------------

def _read_pairs(text: str, source: Optional[str]) -> Dict[str, Tuple[str, int]]:
    pairs: Dict[str, Tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if ':' not in line:
            raise ParseError(f"Expected 'key: value', got {line!r}", line=lineno, source=source)

        key, value = line.split(':', 1)
        key = key.strip()
        if not key:
            raise ParseError("Empty key", line=lineno, source=source)
        if key in pairs:
            raise ParseError(f"Duplicate key '{key}'", line=lineno, key=key, source=source)
        pairs[key] = (value.strip(), lineno)
    return pairs


def _number(pairs: Dict[str, Tuple[str, int]], key: str, source: Optional[str]) -> float:
    value, lineno = pairs[key]
    try:
        number = float(value)
    except ValueError:
        raise ParseError(f"Malformed number for '{key}': {value!r}", line=lineno, key=key, source=source)
    if not math.isfinite(number):
        raise ParseError(f"Non-finite number for '{key}': {value!r}", line=lineno, key=key, source=source)
    return number


def _integer(pairs: Dict[str, Tuple[str, int]], key: str, source: Optional[str]) -> int:
    number = _number(pairs, key, source)
    if not number.is_integer():
        value, lineno = pairs[key]
        raise ParseError(f"Expected an integer for '{key}': {value!r}", line=lineno, key=key, source=source)
    return int(number)


def _as_validation_error(error: PydanticValidationError, source: Optional[str]) -> ValidationError:
    first = error.errors()[0]
    field = str(first['loc'][0]) if first.get('loc') else None
    key = FIELD_TO_KEY.get(field, field)
    return ValidationError(f"Invalid value for '{key}': {first['msg']}", field=key, source=source)


def parse_flight_config(
    text: str,
    source: Optional[str] = None,
    base_dir: Optional[Path] = None,
) -> Tuple[PathPoint, PhotoMeta]:
    """
    Parse one flight configuration record.

    Args:
        text: ``key: value`` lines; ``#`` starts a comment line
        source: File name used in error details
        base_dir: Directory ``image_file`` is relative to

    Returns:
        The input point (time 0 when the record carries none) and photo facts

    Raises:
        ParseError: Malformed line or number, duplicate or missing key
        ValidationError: A value outside its range
    """
    record = _parse_record(text, source, base_dir)
    return record.point, record.photo


def _parse_record(text: str, source: Optional[str], base_dir: Optional[Path]) -> FlightRecord:
    pairs = _read_pairs(text, source)

    for key in REQUIRED_KEYS:
        if key not in pairs:
            raise ParseError(f"Missing required key '{key}'", key=key, source=source)

    for key in pairs:
        if key not in REQUIRED_KEYS and key not in OPTIONAL_KEYS:
            logger.warning(f"Ignoring unknown key '{key}' in {source or 'flight config'}")

    image_file = pairs['image_file'][0]
    if not image_file:
        raise ParseError("Empty image_file", line=pairs['image_file'][1], key='image_file', source=source)
    if base_dir is not None:
        image_file = str(Path(base_dir) / image_file)

    timed = 'time' in pairs
    try:
        point = PathPoint(
            time=_number(pairs, 'time', source) if timed else 0.0,
            lon=_number(pairs, 'longitude', source),
            lat=_number(pairs, 'latitude', source),
            height=_number(pairs, 'height', source),
            heading=_number(pairs, 'heading', source),
            pitch=_number(pairs, 'pitch', source),
            roll=_number(pairs, 'roll', source),
            photo_ref=image_file,
        )
        photo = PhotoMeta(
            image_file=image_file,
            width_px=_integer(pairs, 'image_width_px', source),
            height_px=_integer(pairs, 'image_height_px', source),
            pixel_scale_deg=(
                _number(pairs, 'pixel_scale_deg_x', source),
                _number(pairs, 'pixel_scale_deg_y', source),
            ),
        )
    except PydanticValidationError as e:
        raise _as_validation_error(e, source) from e

    return FlightRecord(point=point, photo=photo, source=source or '', timed=timed)


def read_flight_config(path: Path) -> FlightRecord:
    """Read and parse a configuration file; image paths resolve next to it"""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"Cannot read flight config: {e}", source=str(path)) from e

    record = _parse_record(text, str(path), path.parent)
    if not Path(record.photo.image_file).exists():
        logger.warning(f"Photograph {record.photo.image_file} referenced by {path} does not exist")
    return record


def discover_flight_configs(directory: Path, pattern: str = '*.cfg') -> List[Path]:
    """Configuration files in a directory, sorted by name"""
    directory = Path(directory)
    if not directory.is_dir():
        raise DomainError(f"Not a directory: {directory}", {'source': str(directory)})
    return sorted(p for p in directory.glob(pattern) if p.is_file())


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def ingest_flight(records: Sequence[FlightRecord]) -> List[FlightInput]:
    """
    Order parsed records into a flight.

    Records without a time get 0, 1, 2, ... seconds in the order given.

    Raises:
        DomainError: Fewer than 2 records
        ValidationError: Mixed timed/untimed records or duplicate times
        UnsupportedInputError: Flight crossing the antimeridian
    """
    if len(records) < 2:
        raise DomainError("A flight needs at least 2 configuration records", {'count': len(records)})

    timed = [r.timed for r in records]
    if any(timed) and not all(timed):
        untimed = [r.source for r in records if not r.timed]
        raise ValidationError(
            "Either every record carries 'time' or none does",
            field='time',
            details={'untimed': untimed},
        )

    if not any(timed):
        logger.info(f"No record carries a time; assigning 0..{len(records) - 1} s in file order")
        records = [
            r._replace(point=r.point.model_copy(update={'time': float(i)}))
            for i, r in enumerate(records)
        ]

    ordered = sorted(records, key=lambda r: r.point.time)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.point.time == prev.point.time:
            raise ValidationError(
                f"Duplicate time {cur.point.time} in {prev.source} and {cur.source}",
                field='time',
                source=cur.source or None,
            )
        if abs(cur.point.lon - prev.point.lon) > MAX_LONGITUDE_GAP_DEG:
            raise UnsupportedInputError(
                "Flights crossing the antimeridian are not supported",
                {'source': cur.source, 'lon_from': prev.point.lon, 'lon_to': cur.point.lon},
            )

    return [FlightInput(point=r.point, photo=r.photo) for r in ordered]


def ingest_directory(
    directory: Path,
    pattern: str = '*.cfg',
    max_workers: int = 4,
) -> List[FlightInput]:
    """
    Parse every configuration file of a directory and order the flight.

    Raises:
        DomainError: No configuration files, or fewer than 2
        FlightPlayError: The first failing file in name order
    """
    paths = discover_flight_configs(directory, pattern)
    if not paths:
        raise DomainError(f"no configuration files matching '{pattern}' in {directory}",
                          {'source': str(directory)})

    outcomes = parse_in_parallel(paths, read_flight_config, max_workers=max_workers)
    for outcome in outcomes:
        if outcome.error is not None:
            raise outcome.error

    logger.info(f"Parsed {len(outcomes)} flight configs from {directory}")
    return ingest_flight([outcome.value for outcome in outcomes])


# ---------------------------------------------------------------------------
# Interpolation
# ---------------------------------------------------------------------------

class AngleKind(str, Enum):
    """Canonical range of a posture angle"""
    HEADING = "heading"  # [0, 360), cyclic
    PITCH = "pitch"      # [-90, 90], not cyclic
    ROLL = "roll"        # [-180, 180), cyclic


def interpolate_angle(a0: float, a1: float, u: float, kind: AngleKind = AngleKind.HEADING) -> float:
    """
    Blend two angles by fraction u.

    Cyclic angles take the shorter arc and are wrapped into their canonical
    range; pitch is blended directly.
    """
    if not (0.0 <= u <= 1.0):
        raise DomainError(f"Blend fraction {u} outside [0, 1]", {'u': u})

    if kind is AngleKind.PITCH:
        return a0 + u * (a1 - a0)

    delta = (a1 - a0 + 180.0) % 360.0 - 180.0
    value = a0 + u * delta
    if kind is AngleKind.HEADING:
        return normalize_heading(value)
    return normalize_signed(value)


def _check_lon_lat(lon: float, lat: float, time: float) -> None:
    if not (-180.0 <= lon <= 180.0) or not (-90.0 <= lat <= 90.0):
        raise DomainError(
            f"Interpolated position ({lon}, {lat}) leaves the valid lon/lat range",
            {'time': time, 'lon': lon, 'lat': lat},
        )


def _input_sample(point: PathPoint) -> SampledPose:
    return SampledPose(
        time=point.time,
        geodetic=point.geodetic,
        posture=point.posture,
        origin=SampleOrigin.INPUT,
    )


def interpolate_trajectory(
    points: Sequence[PathPoint],
    samples_per_segment: int,
    degree: int = DEFAULT_DEGREE,
) -> List[SampledPose]:
    """
    Densify a flight into input and interpolated samples.

    Each segment between consecutive inputs receives ``samples_per_segment``
    interior samples at evenly spaced fractions of its spline parameter
    interval. Time and posture use the same fraction; height is held from
    the segment's first input point.

    Returns:
        n + (n - 1) * samples_per_segment samples in time order

    Raises:
        DomainError: Fewer than 2 points, negative sample count, or a spline
            overshoot outside the lon/lat ranges
        NumericError: Singular collocation system
    """
    n = len(points)
    if n < 2:
        raise DomainError("Interpolation needs at least 2 points", {'count': n})
    if samples_per_segment < 0:
        raise DomainError("samples_per_segment must be nonnegative",
                          {'samples_per_segment': samples_per_segment})

    k = samples_per_segment
    if k == 0:
        return [_input_sample(p) for p in points]

    planar = [(p.lon, p.lat) for p in points]
    stationary = all(xy == planar[0] for xy in planar)
    if stationary:
        logger.debug("All input points share one position; skipping the spline")
        spline, params = None, [i / (n - 1) for i in range(n)]
    else:
        spline = InterpolatingBSpline(planar, degree)
        spline.fit()
        params = spline.params

    samples: List[SampledPose] = []
    for i in range(n - 1):
        start, end = points[i], points[i + 1]
        samples.append(_input_sample(start))

        for j in range(1, k + 1):
            f = j / (k + 1)
            time = start.time + f * (end.time - start.time)
            if spline is None:
                lon, lat = planar[0]
            else:
                lon, lat = spline.evaluate(params[i] + f * (params[i + 1] - params[i]))
                _check_lon_lat(lon, lat, time)

            samples.append(SampledPose(
                time=time,
                geodetic=GeodeticPoint(lon=lon, lat=lat, h=start.height),
                posture=Posture(
                    heading=interpolate_angle(start.heading, end.heading, f, AngleKind.HEADING),
                    pitch=interpolate_angle(start.pitch, end.pitch, f, AngleKind.PITCH),
                    roll=interpolate_angle(start.roll, end.roll, f, AngleKind.ROLL),
                ),
                origin=SampleOrigin.INTERPOLATED,
            ))

    samples.append(_input_sample(points[-1]))
    logger.debug(f"Interpolated {n} points into {len(samples)} samples (k={k})")
    return samples


# ---------------------------------------------------------------------------
# Control points and the animation path
# ---------------------------------------------------------------------------

class ControlPoint(BaseModel):
    """Camera key: ECEF position, unit quaternion (x, y, z, w) and scale"""
    model_config = ConfigDict(frozen=True)

    position: EcefPoint
    rotation: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)
    scale: Tuple[float, float, float] = Field(default=(1.0, 1.0, 1.0))

    @field_validator('rotation')
    @classmethod
    def normalize_rotation(cls, v):
        q = np.asarray(v, dtype=float)
        norm = float(np.linalg.norm(q))
        if not np.all(np.isfinite(q)) or abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise ValueError(f'rotation must be a unit quaternion, norm is {norm}')
        return tuple(float(c) for c in q / norm)

    @field_validator('scale')
    @classmethod
    def validate_scale(cls, v):
        if not all(math.isfinite(s) and s > 0 for s in v):
            raise ValueError('scale components must be positive')
        return v

    def rotation_matrix(self) -> np.ndarray:
        return Rotation.from_quat(self.rotation).as_matrix()

    def get_matrix(self) -> np.ndarray:
        """4x4 local-to-world matrix: translate * rotate * scale"""
        m = np.eye(4)
        m[:3, :3] = self.rotation_matrix() @ np.diag(self.scale)
        m[:3, 3] = self.position.as_tuple()
        return m


def pose_to_control_point(p: SampledPose) -> ControlPoint:
    """Camera key for a sample: ECEF eye and the posture expressed in ECEF"""
    rotation = rotation_in_lsr(
        rotation_from_posture(p.posture),
        lsr_basis_at(p.geodetic.lon, p.geodetic.lat),
    )
    quat = Rotation.from_matrix(rotation).as_quat()
    return ControlPoint(
        position=geodetic_to_ecef(WGS84, p.geodetic),
        rotation=tuple(float(c) for c in quat),
    )


class AnimationPath:
    """
    Time-keyed camera control points.

    Keys are kept sorted; inserting at an existing time replaces that key.
    Lookups never modify the path, so one path can be shared by concurrent
    readers once it has been built.
    """

    def __init__(self):
        self._times: List[float] = []
        self._points: List[ControlPoint] = []

    def insert(self, time: float, control_point: ControlPoint) -> None:
        if not math.isfinite(time):
            raise DomainError("Key time must be finite", {'time': time})

        index = bisect.bisect_left(self._times, time)
        if index < len(self._times) and self._times[index] == time:
            self._points[index] = control_point
            return
        self._times.insert(index, time)
        self._points.insert(index, control_point)

    def __len__(self) -> int:
        return len(self._times)

    def __iter__(self):
        return iter(zip(self._times, self._points))

    def _require_keys(self) -> None:
        if not self._times:
            raise DomainError("Animation path is empty")

    @property
    def first_time(self) -> float:
        self._require_keys()
        return self._times[0]

    @property
    def last_time(self) -> float:
        self._require_keys()
        return self._times[-1]

    @property
    def period(self) -> float:
        return self.last_time - self.first_time

    @property
    def time_control_point_map(self) -> Dict[float, ControlPoint]:
        """Copy of the keys as an ordered time -> control point mapping"""
        return dict(zip(self._times, self._points))

    @property
    def times(self) -> Tuple[float, ...]:
        return tuple(self._times)

    def get_interpolated_control_point(self, t: float) -> ControlPoint:
        return sample_path(self, t)

    def bracket(self, t: float) -> Tuple[float, ControlPoint, float, ControlPoint]:
        """
        Keys on either side of t as (t0, before, t1, after).

        At a key time both sides are that key.

        Raises:
            PathRangeError: t outside [first_time, last_time]
        """
        first, last = self.first_time, self.last_time
        if not (first <= t <= last):
            raise PathRangeError(t, first, last)

        index = bisect.bisect_left(self._times, t)
        if self._times[index] == t:
            return t, self._points[index], t, self._points[index]
        return self._times[index - 1], self._points[index - 1], self._times[index], self._points[index]

    def get_matrix(self, t: float) -> np.ndarray:
        return sample_path(self, t).get_matrix()

    def __repr__(self) -> str:
        if not self._times:
            return "AnimationPath(keys=0)"
        return f"AnimationPath(keys={len(self)}, first={self.first_time}, last={self.last_time})"


def build_animation_path(samples: Iterable[SampledPose]) -> AnimationPath:
    """
    One control point per sample, keyed by sample time.

    Raises:
        DomainError: No samples, or times not strictly increasing
    """
    samples = list(samples)
    if not samples:
        raise DomainError("Cannot build an animation path from no samples")

    for prev, cur in zip(samples, samples[1:]):
        if cur.time <= prev.time:
            raise DomainError(
                "Sample times must be strictly increasing",
                {'time': cur.time, 'previous_time': prev.time},
            )

    path = AnimationPath()
    for sample in samples:
        path.insert(sample.time, pose_to_control_point(sample))
    return path


def sample_path(path: AnimationPath, t: float) -> ControlPoint:
    """
    Control point at time t.

    Key times return the stored control point itself. Between keys the
    position and scale are blended linearly and the rotation by spherical
    interpolation along the shorter arc.

    Raises:
        PathRangeError: t outside [first_time, last_time]
    """
    t0, a, t1, b = path.bracket(t)
    if t0 == t1:
        return a

    u = (t - t0) / (t1 - t0)

    pa = np.array(a.position.as_tuple())
    pb = np.array(b.position.as_tuple())
    position = pa + u * (pb - pa)
    scale = np.array(a.scale) + u * (np.array(b.scale) - np.array(a.scale))

    slerp = Slerp([0.0, 1.0], Rotation.from_quat([a.rotation, b.rotation]))
    quat = slerp([u]).as_quat()[0]

    return ControlPoint(
        position=EcefPoint(x=float(position[0]), y=float(position[1]), z=float(position[2])),
        rotation=tuple(float(c) for c in quat),
        scale=tuple(float(s) for s in scale),
    )
