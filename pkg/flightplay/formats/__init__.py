"""
File formats: geometry sidecars, KML trajectories, flight files, event
scripts and playback dumps.
"""

from flightplay.formats.event_script import load_event_script, parse_event_script
from flightplay.formats.flight_store import (
    build_flight_store,
    dump_flight_store,
    load_flight_store,
    parse_flight_store,
    write_flight_store,
)
from flightplay.formats.frame_dump import dump_frames, dump_marks, read_frame_dump, write_frame_dump, write_mark_dump
from flightplay.formats.geometry import (
    emit_geometry_file,
    parse_geometry_file,
    sidecar_path,
    write_geometry_sidecar,
)
from flightplay.formats.kml import emit_trajectory_kml
from flightplay.formats.output import write_text_file

__all__ = [
    'build_flight_store',
    'dump_flight_store',
    'dump_frames',
    'dump_marks',
    'emit_geometry_file',
    'emit_trajectory_kml',
    'load_event_script',
    'load_flight_store',
    'parse_event_script',
    'parse_flight_store',
    'parse_geometry_file',
    'read_frame_dump',
    'sidecar_path',
    'write_flight_store',
    'write_frame_dump',
    'write_geometry_sidecar',
    'write_mark_dump',
    'write_text_file',
]
