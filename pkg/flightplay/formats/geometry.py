"""
Geometry sidecar files placing a photograph on the globe.

A sidecar is nine ``key: value`` lines in a fixed order. Emission is
canonical (``key: value`` with shortest round-trip floats); parsing also
accepts the looser ``key:value`` and ``( .133, .133 )`` spellings.
"""

import logging
import re
from pathlib import Path
from typing import Dict, Optional, Tuple

from pydantic import ValidationError as PydanticValidationError

from flightplay.exceptions import ParseError, ValidationError
from flightplay.formats.output import write_text_file
from flightplay.models import GeodeticPoint, GeometryHeader, PhotoMeta

logger = logging.getLogger(__name__)

GEOMETRY_KEYS = (
    'type',
    'origin_latitude',
    'central_meridian',
    'pixel_scale_units',
    'pixel_scale_xy',
    'datum',
    'tie_point_units',
    'tie_point_xy',
    'pixel_type',
)
FLOAT_KEYS = ('origin_latitude', 'central_meridian')
PAIR_KEYS = ('pixel_scale_xy', 'tie_point_xy')
SIDECAR_SUFFIX = '.geom'

_PAIR = re.compile(r'^\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)$')


def format_float(value: float) -> str:
    """Shortest round-trip decimal text; negative zero prints as 0.0"""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return repr(value)


def _format_pair(pair: Tuple[float, float]) -> str:
    return f"({format_float(pair[0])}, {format_float(pair[1])})"


def geometry_header_for(meta: PhotoMeta, center: GeodeticPoint) -> GeometryHeader:
    """
    Header for a photograph centred at a ground point.

    The tie point is the upper-left corner: half the image extent west and
    north of the centre.

    Raises:
        ValidationError: If the corner falls outside the lon/lat ranges
    """
    sx, sy = meta.pixel_scale_deg
    tie_lon = center.lon - meta.width_px * sx / 2.0
    tie_lat = center.lat + meta.height_px * sy / 2.0
    try:
        return GeometryHeader(pixel_scale_xy=(sx, sy), tie_point_xy=(tie_lon, tie_lat))
    except PydanticValidationError as e:
        first = e.errors()[0]
        raise ValidationError(
            f"Photograph {meta.image_file} does not fit on the globe: {first['msg']}",
            field=str(first['loc'][0]),
            source=meta.image_file,
        ) from e


def render_geometry_header(header: GeometryHeader) -> str:
    lines = []
    for key in GEOMETRY_KEYS:
        value = getattr(header, key)
        if key in PAIR_KEYS:
            text = _format_pair(value)
        elif key in FLOAT_KEYS:
            text = format_float(value)
        else:
            text = value
        lines.append(f"{key}: {text}")
    return "\n".join(lines) + "\n"


def emit_geometry_file(meta: PhotoMeta, center: GeodeticPoint) -> str:
    """Sidecar text for a photograph centred at a ground point"""
    return render_geometry_header(geometry_header_for(meta, center))


def sidecar_path(meta: PhotoMeta) -> Path:
    """``<image dir>/<image stem>.geom``"""
    return Path(meta.image_file).with_suffix(SIDECAR_SUFFIX)


def write_geometry_sidecar(meta: PhotoMeta, center: GeodeticPoint) -> Path:
    path = write_text_file(sidecar_path(meta), emit_geometry_file(meta, center))
    logger.debug(f"Wrote geometry sidecar {path}")
    return path


def _parse_float(text: str, key: str, lineno: int, source: Optional[str]) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"Malformed number for '{key}': {text!r}", line=lineno, key=key, source=source)


def parse_geometry_file(text: str, source: Optional[str] = None) -> GeometryHeader:
    """
    Parse sidecar text.

    Raises:
        ParseError: Malformed line, unknown, duplicate or missing key
        ValidationError: Non-positive scale or tie point out of range
    """
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if ':' not in line:
            raise ParseError(f"Expected 'key: value', got {line!r}", line=lineno, source=source)

        key, value = (part.strip() for part in line.split(':', 1))
        if key not in GEOMETRY_KEYS:
            raise ParseError(f"Unknown geometry key '{key}'", line=lineno, key=key, source=source)
        if key in values:
            raise ParseError(f"Duplicate key '{key}'", line=lineno, key=key, source=source)

        if key in PAIR_KEYS:
            match = _PAIR.match(value)
            if not match:
                raise ParseError(f"Expected '(x, y)' for '{key}', got {value!r}",
                                 line=lineno, key=key, source=source)
            values[key] = (
                _parse_float(match.group(1), key, lineno, source),
                _parse_float(match.group(2), key, lineno, source),
            )
        elif key in FLOAT_KEYS:
            values[key] = _parse_float(value, key, lineno, source)
        else:
            values[key] = value

    for key in GEOMETRY_KEYS:
        if key not in values:
            raise ParseError(f"Missing geometry key '{key}'", key=key, source=source)

    try:
        return GeometryHeader(**values)
    except PydanticValidationError as e:
        first = e.errors()[0]
        field = str(first['loc'][0]) if first.get('loc') else None
        raise ValidationError(f"Invalid geometry value: {first['msg']}", field=field, source=source) from e
