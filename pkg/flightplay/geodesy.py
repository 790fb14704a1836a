"""
WGS-84 ellipsoid model and coordinate transformations.

Three frames are involved:

- geodetic: longitude, latitude (degrees) and height above the ellipsoid
- ECEF: Earth-Centered Earth-Fixed cartesian coordinates in meters
- LSR: the local east/north/up tangent frame at an origin point

Angles cross this API in degrees and are converted to radians internally.
All functions are pure.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from flightplay.exceptions import DomainError, NumericError
from flightplay.models import EcefPoint, GeodeticPoint, LsrVector

MAX_INVERSE_ITERATIONS = 50
INVERSE_TOLERANCE_RAD = 1e-12
POLE_COS_EPSILON = 1e-12
MIN_CENTER_DISTANCE_M = 1.0


class Ellipsoid(BaseModel):
    """Reference ellipsoid defined by semi-major axis and flattening"""
    model_config = ConfigDict(frozen=True)

    a: float = Field(..., gt=0.0, description="Semi-major axis in meters")
    f: float = Field(..., description="Flattening")

    @field_validator('f')
    @classmethod
    def validate_flattening(cls, v):
        if not (0.0 < v < 1.0):
            raise ValueError('flattening must be in (0, 1)')
        return v

    @property
    def b(self) -> float:
        """Semi-minor axis in meters"""
        return self.a * (1.0 - self.f)

    @property
    def e2(self) -> float:
        """First eccentricity squared"""
        return 2.0 * self.f - self.f * self.f


WGS84 = Ellipsoid(a=6378137.0, f=1.0 / 298.257223563)


def _check_latitude(lat: float) -> None:
    if not (-90.0 <= lat <= 90.0) or not math.isfinite(lat):
        raise DomainError(f"Latitude {lat} outside [-90, 90]", {'lat': lat})


def prime_vertical_radius(ell: Ellipsoid, lat: float) -> float:
    """
    Radius of curvature in the prime vertical at a latitude.

    Args:
        ell: Reference ellipsoid
        lat: Latitude in degrees

    Returns:
        a / sqrt(1 - e2 sin^2(lat)) in meters

    Raises:
        DomainError: If the latitude is outside [-90, 90]
    """
    _check_latitude(lat)
    sin_phi = math.sin(math.radians(lat))
    return ell.a / math.sqrt(1.0 - ell.e2 * sin_phi * sin_phi)


def geodetic_to_ecef(ell: Ellipsoid, p: GeodeticPoint) -> EcefPoint:
    """Convert a geodetic point to ECEF"""
    phi = math.radians(p.lat)
    lam = math.radians(p.lon)
    v = prime_vertical_radius(ell, p.lat)

    cos_phi = math.cos(phi)
    return EcefPoint(
        x=(v + p.h) * cos_phi * math.cos(lam),
        y=(v + p.h) * cos_phi * math.sin(lam),
        z=((1.0 - ell.e2) * v + p.h) * math.sin(phi),
    )


def ecef_to_geodetic(ell: Ellipsoid, p: EcefPoint) -> GeodeticPoint:
    """
    Convert an ECEF point back to geodetic coordinates.

    Fixed-point iteration on latitude using tan(lat) = (z + e2 v sin(lat)) / p,
    which contracts by roughly e2 per step. Once two iterates agree within
    1e-12 rad one more step is taken so the position error drops below the
    double precision floor.

    Raises:
        DomainError: If the point is within 1 m of the Earth's center
        NumericError: If the iteration does not converge in 50 steps
    """
    x, y, z = p.x, p.y, p.z
    if math.sqrt(x * x + y * y + z * z) < MIN_CENTER_DISTANCE_M:
        raise DomainError("Point too close to Earth's center", {'x': x, 'y': y, 'z': z})

    e2 = ell.e2
    rho = math.hypot(x, y)
    phi = math.atan2(z, rho * (1.0 - e2))

    for iteration in range(1, MAX_INVERSE_ITERATIONS + 1):
        sin_phi = math.sin(phi)
        v = ell.a / math.sqrt(1.0 - e2 * sin_phi * sin_phi)
        next_phi = math.atan2(z + e2 * v * sin_phi, rho)
        converged = abs(next_phi - phi) < INVERSE_TOLERANCE_RAD
        phi = next_phi
        if converged:
            sin_phi = math.sin(phi)
            v = ell.a / math.sqrt(1.0 - e2 * sin_phi * sin_phi)
            phi = math.atan2(z + e2 * v * sin_phi, rho)
            break
    else:
        raise NumericError(
            "Geodetic latitude iteration did not converge",
            {'x': x, 'y': y, 'z': z},
            iterations=MAX_INVERSE_ITERATIONS,
        )

    sin_phi = math.sin(phi)
    cos_phi = math.cos(phi)
    v = ell.a / math.sqrt(1.0 - e2 * sin_phi * sin_phi)
    # stable at the poles, unlike rho / cos(phi) - v
    h = rho * cos_phi + z * sin_phi - ell.a * ell.a / v

    if abs(cos_phi) < POLE_COS_EPSILON:
        lon = 0.0
    else:
        lon = math.degrees(math.atan2(y, x))

    lat = max(-90.0, min(90.0, math.degrees(phi)))
    return GeodeticPoint(lon=lon, lat=lat, h=h)


def lsr_basis_at(lon0: float, lat0: float) -> np.ndarray:
    """
    Local tangent basis at a point.

    Returns:
        3x3 rotation whose columns are the east, north and up unit vectors
        expressed in ECEF
    """
    _check_latitude(lat0)
    lam = math.radians(lon0)
    phi = math.radians(lat0)
    sl, cl = math.sin(lam), math.cos(lam)
    sp, cp = math.sin(phi), math.cos(phi)

    return np.array([
        [-sl, -sp * cl, cp * cl],
        [cl, -sp * sl, cp * sl],
        [0.0, cp, sp],
    ])


def lsr_to_ecef(ell: Ellipsoid, origin: GeodeticPoint, d: LsrVector) -> EcefPoint:
    """Convert an east/north/up offset at an origin to an ECEF position"""
    base = geodetic_to_ecef(ell, origin)
    offset = lsr_basis_at(origin.lon, origin.lat) @ np.array([d.u, d.v_north, d.w])
    return EcefPoint(
        x=base.x + float(offset[0]),
        y=base.y + float(offset[1]),
        z=base.z + float(offset[2]),
    )


def ecef_distance(p: EcefPoint, q: EcefPoint) -> float:
    return math.sqrt((p.x - q.x) ** 2 + (p.y - q.y) ** 2 + (p.z - q.z) ** 2)
