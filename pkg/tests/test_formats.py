"""
Tests for geometry sidecars, KML documents, flight files, event scripts and
frame dumps.
"""

from xml.etree import ElementTree as ET

import pytest
from pydantic import ValidationError as PydanticValidationError

from flightplay.exceptions import OutputError, ParseError, ValidationError
from flightplay.formats.event_script import parse_event_script, render_event_script
from flightplay.formats.flight_store import (
    build_flight_store,
    dump_flight_store,
    load_flight_store,
    parse_flight_store,
    write_flight_store,
)
from flightplay.formats.frame_dump import FRAME_FIELDS, dump_frames, dump_marks, format_real, read_frame_dump
from flightplay.formats.geometry import (
    GEOMETRY_KEYS,
    emit_geometry_file,
    parse_geometry_file,
    render_geometry_header,
    sidecar_path,
    write_geometry_sidecar,
)
from flightplay.formats.kml import emit_trajectory_kml, format_coordinate
from flightplay.formats.output import write_text_file
from flightplay.models import (
    EcefPoint,
    FlightInput,
    FrameRecord,
    GeodeticPoint,
    GeometryHeader,
    PhotoMeta,
    SimCommand,
)
from flightplay.trajectory import interpolate_trajectory
from tests.conftest import make_point

KML_NS = {"kml": "http://www.opengis.net/kml/2.2"}

FIG3_TEXT = """type: ossimEquDistCylProjection
origin_latitude:0.0
central_meridian: 0.0
pixel_scale_units: degrees
pixel_scale_xy: ( .133, .133 )
datum: WGE
tie_point_units: degrees
tie_point_xy: (-180.0, 90.0)
pixel_type: area
"""


def placemarks(text: str):
    root = ET.fromstring(text.encode("utf-8"))
    return root.findall("kml:Document/kml:Placemark", KML_NS)


def demo_inputs(count=10):
    points = [make_point(float(i), 121.48844 + 0.002 * i, 53.332649 + 0.0003 * i) for i in range(count)]
    photo = PhotoMeta(image_file="p.jpg", width_px=10, height_px=10, pixel_scale_deg=(1e-05, 1e-05))
    return points, [FlightInput(point=p, photo=photo) for p in points]


@pytest.mark.unit
class TestGeometryFile:
    """Test geometry sidecar emission and parsing"""

    def test_canonical_rendering(self):
        """Test the nine lines for the global raster example"""
        header = GeometryHeader(pixel_scale_xy=(0.133, 0.133), tie_point_xy=(-180.0, 90.0))
        lines = render_geometry_header(header).splitlines()

        assert [line.split(":")[0] for line in lines] == list(GEOMETRY_KEYS)
        assert lines == [
            "type: ossimEquDistCylProjection",
            "origin_latitude: 0.0",
            "central_meridian: 0.0",
            "pixel_scale_units: degrees",
            "pixel_scale_xy: (0.133, 0.133)",
            "datum: WGE",
            "tie_point_units: degrees",
            "tie_point_xy: (-180.0, 90.0)",
            "pixel_type: area",
        ]
        for line in ("type: ossimEquDistCylProjection", "central_meridian: 0.0", "datum: WGE",
                     "tie_point_xy: (-180.0, 90.0)", "pixel_type: area"):
            assert line in FIG3_TEXT.splitlines()

    def test_upper_left_tie_point(self):
        """Test the corner of a 100x100 photo at (0, 0)"""
        meta = PhotoMeta(image_file="a.jpg", width_px=100, height_px=100, pixel_scale_deg=(0.01, 0.01))
        header = parse_geometry_file(emit_geometry_file(meta, GeodeticPoint(lon=0.0, lat=0.0, h=0.0)))
        assert header.tie_point_xy == pytest.approx((-0.5, 0.5))

    def test_parse_loose_spelling(self):
        """Test parsing the spaced, no-leading-zero spelling"""
        header = parse_geometry_file(FIG3_TEXT)
        assert header.pixel_scale_xy == (0.133, 0.133)
        assert header.tie_point_xy == (-180.0, 90.0)
        assert header.origin_latitude == 0.0

    def test_round_trip_is_byte_identical(self, sample_photo):
        """Test emit -> parse -> emit"""
        text = emit_geometry_file(sample_photo, GeodeticPoint(lon=121.48844, lat=53.332649, h=0.0))
        assert render_geometry_header(parse_geometry_file(text)) == text
        assert text.endswith("\n") and "\r" not in text

    def test_missing_datum(self):
        text = "".join(line + "\n" for line in FIG3_TEXT.splitlines() if not line.startswith("datum"))
        with pytest.raises(ParseError) as exc_info:
            parse_geometry_file(text)
        assert exc_info.value.key == "datum"

    def test_negative_scale(self):
        with pytest.raises(ValidationError):
            parse_geometry_file(FIG3_TEXT.replace("( .133, .133 )", "(-0.133, 0.133)"))

    def test_unknown_key(self):
        with pytest.raises(ParseError) as exc_info:
            parse_geometry_file(FIG3_TEXT + "zone: 51\n")
        assert exc_info.value.line == 10

    def test_malformed_pair(self):
        with pytest.raises(ParseError) as exc_info:
            parse_geometry_file(FIG3_TEXT.replace("(-180.0, 90.0)", "-180.0 90.0"))
        assert exc_info.value.line == 8

    def test_sidecar_next_to_photo(self, tmp_path):
        """Test that the sidecar lands at <image dir>/<stem>.geom"""
        meta = PhotoMeta(image_file=str(tmp_path / "photo_01.jpg"), width_px=10, height_px=10,
                         pixel_scale_deg=(0.001, 0.001))
        assert sidecar_path(meta) == tmp_path / "photo_01.geom"
        written = write_geometry_sidecar(meta, GeodeticPoint(lon=1.0, lat=1.0, h=0.0))
        assert written.read_bytes().count(b"\n") == 9


@pytest.mark.unit
class TestKml:
    """Test KML trajectory documents"""

    def test_single_placemark_coordinates(self):
        """Test the coordinate text of a single input point"""
        text = emit_trajectory_kml([make_point(0.0, 121.48844, 53.332649, height=0.0)], [])
        marks = placemarks(text)
        assert len(marks) == 1
        assert marks[0].find("kml:Point/kml:coordinates", KML_NS).text == "121.48844,53.332649,0"
        assert marks[0].find("kml:styleUrl", KML_NS).text == "#inputMark"

    def test_header_and_namespaces(self):
        text = emit_trajectory_kml([], [])
        assert text.startswith('<?xml version="1.0" encoding="UTF-8"?>\n')
        assert 'xmlns="http://www.opengis.net/kml/2.2"' in text
        assert 'xmlns:gx="http://www.google.com/kml/ext/2.2"' in text

    def test_empty_document_has_styles(self):
        """Test that empty inputs give styles and no placemarks"""
        root = ET.fromstring(emit_trajectory_kml([], []).encode("utf-8"))
        styles = root.findall("kml:Document/kml:Style", KML_NS)
        assert [s.get("id") for s in styles] == ["inputMark", "interpMark"]
        assert root.findall("kml:Document/kml:Placemark", KML_NS) == []

    def test_demo_counts(self):
        """Test 10 inputs and 45 interpolated marks"""
        points, _ = demo_inputs()
        samples = interpolate_trajectory(points, 5)
        interpolated = [s for s in samples if not s.is_input]

        marks = placemarks(emit_trajectory_kml(points, interpolated))
        styles = [m.find("kml:styleUrl", KML_NS).text for m in marks]
        assert len(marks) == 55
        assert styles[:10] == ["#inputMark"] * 10
        assert styles[10:] == ["#interpMark"] * 45

    def test_every_style_reference_is_defined(self):
        points, _ = demo_inputs(3)
        text = emit_trajectory_kml(points, [s for s in interpolate_trajectory(points, 2) if not s.is_input])
        root = ET.fromstring(text.encode("utf-8"))
        ids = {s.get("id") for s in root.findall("kml:Document/kml:Style", KML_NS)}
        for mark in root.findall("kml:Document/kml:Placemark", KML_NS):
            assert mark.find("kml:styleUrl", KML_NS).text.lstrip("#") in ids

    @pytest.mark.parametrize("value,expected", [
        (121.48844, "121.48844"),
        (53.332649, "53.332649"),
        (0.0, "0"),
        (-0.0000001, "0"),
        (1000.0, "1000"),
        (-12.3456789, "-12.345679"),
    ])
    def test_coordinate_format(self, value, expected):
        assert format_coordinate(value) == expected


@pytest.mark.unit
class TestFlightStore:
    """Test the YAML flight file"""

    def _store(self, k=2):
        points, inputs = demo_inputs(4)
        return build_flight_store(inputs, interpolate_trajectory(points, k), k, 3)

    def test_round_trip(self):
        store = self._store()
        assert parse_flight_store(dump_flight_store(store)) == store

    def test_dump_is_deterministic(self):
        assert dump_flight_store(self._store()) == dump_flight_store(self._store())

    def test_key_order(self):
        text = dump_flight_store(self._store())
        assert text.index("format_version") < text.index("settings") < text.index("inputs") < text.index("samples")

    def test_write_and_load(self, tmp_path):
        store = self._store()
        path = write_flight_store(store, tmp_path / "flight.yaml")
        assert load_flight_store(path) == store

    def test_wrong_version(self):
        text = dump_flight_store(self._store()).replace("format_version: 1", "format_version: 2")
        with pytest.raises(ValidationError):
            parse_flight_store(text)

    def test_sample_count_mismatch(self):
        """Test that settings inconsistent with the samples are rejected"""
        text = dump_flight_store(self._store(k=2)).replace("samples_per_segment: 2", "samples_per_segment: 3")
        with pytest.raises(ValidationError):
            parse_flight_store(text)

    def test_not_yaml(self):
        with pytest.raises(ParseError):
            parse_flight_store("inputs: [unclosed\n")

    def test_not_a_mapping(self):
        with pytest.raises(ParseError):
            parse_flight_store("- 1\n- 2\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_flight_store(tmp_path / "nope.yaml")


@pytest.mark.unit
class TestEventScript:
    """Test scripted playback events"""

    def test_parse_all_commands(self):
        events = parse_event_script(
            "# demo\n"
            "frame=0 cmd=start\n"
            "frame=10 cmd=rate:2\n"
            "frame=10 cmd=seek:4.5\n"
            "\n"
            "frame=20 cmd=pause\n"
            "frame=30 cmd=stop\n"
        )
        assert [(e.at_frame, e.command, e.value) for e in events] == [
            (0, SimCommand.START, None),
            (10, SimCommand.RATE, 2.0),
            (10, SimCommand.SEEK, 4.5),
            (20, SimCommand.PAUSE, None),
            (30, SimCommand.STOP, None),
        ]

    def test_unsorted_frames(self):
        with pytest.raises(ValidationError) as exc_info:
            parse_event_script("frame=5 cmd=start\nframe=2 cmd=stop\n")
        assert exc_info.value.details["line"] == 2

    def test_unknown_command(self):
        with pytest.raises(ParseError) as exc_info:
            parse_event_script("frame=0 cmd=start\nframe=1 cmd=jump\n")
        assert exc_info.value.line == 2

    def test_missing_value(self):
        with pytest.raises(ParseError):
            parse_event_script("frame=0 cmd=seek\n")

    def test_value_on_plain_command(self):
        with pytest.raises(ParseError):
            parse_event_script("frame=0 cmd=start:1\n")

    def test_bad_frame(self):
        with pytest.raises(ParseError):
            parse_event_script("frame=abc cmd=start\n")

    def test_non_positive_rate(self):
        with pytest.raises(ValidationError):
            parse_event_script("frame=0 cmd=rate:0\n")

    def test_vanishing_rate(self):
        with pytest.raises(ValidationError):
            parse_event_script("frame=0 cmd=rate:1e-300\n")

    def test_missing_frame(self):
        with pytest.raises(ParseError) as exc_info:
            parse_event_script("cmd=start\n")
        assert exc_info.value.key == "frame"

    def test_render_parses_back(self):
        text = "frame=0 cmd=start\nframe=3 cmd=seek:1.25\n"
        assert render_event_script(parse_event_script(text)) == text


@pytest.mark.unit
class TestFrameDump:
    """Test frame and mark dump formatting"""

    def _record(self):
        vm = (1.0, 0.0, 0.0, -6378137.0,
              0.0, 1.0, 0.0, 0.0,
              0.0, 0.0, 1.0, 0.0,
              0.0, 0.0, 0.0, 1.0)
        return FrameRecord(
            frame_index=3,
            sim_time=0.1,
            eye_geodetic=GeodeticPoint(lon=0.0, lat=0.0, h=0.0),
            eye_ecef=EcefPoint(x=6378137.0, y=0.0, z=0.0),
            view_matrix=vm,
        )

    def test_line_layout(self):
        text = dump_frames([self._record()])
        assert text.endswith("\n") and "\r" not in text
        fields = text.split()
        assert len(fields) == FRAME_FIELDS
        assert fields[:5] == ["3", "0.1", "0", "0", "0"]
        assert fields[5] == "6378137"
        assert fields[11] == "-6378137"

    def test_read_back(self):
        rows = read_frame_dump(dump_frames([self._record(), self._record()]))
        assert len(rows) == 2
        assert rows[0][1] == 0.1

    def test_read_rejects_short_line(self):
        with pytest.raises(ParseError):
            read_frame_dump("1 2 3\n")

    def test_twelve_significant_digits(self):
        assert format_real(1.0 / 3.0) == "0.333333333333"
        assert format_real(-0.0) == "0"

    def test_marks(self):
        text = dump_marks([(0, [(2, 960.0, 540.0, 0.5)]), (1, [])])
        assert text == "0 2 960 540 0.5\n"

    def test_rigid_matrix_required(self):
        """Test that a non-rigid view matrix is rejected"""
        with pytest.raises(PydanticValidationError):
            FrameRecord(
                frame_index=0, sim_time=0.0,
                eye_geodetic=GeodeticPoint(lon=0.0, lat=0.0, h=0.0),
                eye_ecef=EcefPoint(x=1.0, y=0.0, z=0.0),
                view_matrix=(2.0,) + (0.0,) * 14 + (1.0,),
            )


@pytest.mark.unit
class TestWriteTextFile:
    """Test the shared output writer"""

    def test_writes_lf_text(self, tmp_path):
        path = write_text_file(tmp_path / "out.txt", "a\nb\n")
        assert path.read_bytes() == b"a\nb\n"

    def test_missing_directory_names_path(self, tmp_path):
        target = tmp_path / "missing" / "out.txt"
        with pytest.raises(OutputError) as exc_info:
            write_text_file(target, "x\n")
        assert exc_info.value.details['source'] == str(target)
        assert str(target) in exc_info.value.describe()
