"""
Frame and mark dumps written by playback.

Frame dump: one line per frame with ``frame t lon lat h x y z`` followed by
the 16 view-matrix entries row-major. Mark dump: one line per visible mark
per frame with ``frame mark x_px y_px depth``. Fields are space separated,
reals use 12 significant digits, lines end with LF.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Union

from flightplay.exceptions import ParseError
from flightplay.formats.output import write_text_file
from flightplay.models import FrameRecord

logger = logging.getLogger(__name__)

FRAME_FIELDS = 8 + 16


def format_real(value: float) -> str:
    text = f"{float(value):.12g}"
    return '0' if text == '-0' else text


def format_frame_record(record: FrameRecord) -> str:
    g, e = record.eye_geodetic, record.eye_ecef
    head = [g.lon, g.lat, g.h, e.x, e.y, e.z]
    parts = [str(record.frame_index), format_real(record.sim_time)]
    parts.extend(format_real(v) for v in head)
    parts.extend(format_real(v) for v in record.view_matrix)
    return " ".join(parts)


def dump_frames(records: Iterable[FrameRecord]) -> str:
    return "".join(format_frame_record(r) + "\n" for r in records)


def write_frame_dump(records: Iterable[FrameRecord], path: Union[str, Path]) -> Path:
    text = dump_frames(records)
    path = write_text_file(path, text)
    logger.info(f"Wrote {text.count(chr(10))} frame records to {path}")
    return path


def read_frame_dump(text: str) -> List[List[float]]:
    """Rows of a frame dump as numbers; used to compare dumps numerically"""
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if len(fields) != FRAME_FIELDS:
            raise ParseError(f"Expected {FRAME_FIELDS} fields, found {len(fields)}", line=lineno)
        try:
            rows.append([float(f) for f in fields])
        except ValueError as e:
            raise ParseError(f"Malformed frame field: {e}", line=lineno) from e
    return rows


def dump_marks(frames) -> str:
    """
    Args:
        frames: Iterable of (frame_index, [(mark_index, x_px, y_px, depth), ...])
    """
    lines = []
    for frame_index, marks in frames:
        for mark_index, x, y, depth in marks:
            lines.append(f"{frame_index} {mark_index} {format_real(x)} {format_real(y)} {format_real(depth)}")
    return "".join(line + "\n" for line in lines)


def write_mark_dump(frames, path: Union[str, Path]) -> Path:
    path = write_text_file(path, dump_marks(frames))
    logger.info(f"Wrote mark projections to {path}")
    return path
