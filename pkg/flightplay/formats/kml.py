"""
KML trajectory documents.

One Document with two icon styles and a Point placemark per trajectory
mark: input points first, then interpolated points, each group in time
order.
"""

import logging
from typing import Iterable, Optional, Sequence
from xml.etree import ElementTree as ET

from flightplay.config import KmlConfig
from flightplay.models import PathPoint, SampledPose

logger = logging.getLogger(__name__)

KML_NAMESPACE = "http://www.opengis.net/kml/2.2"
GX_NAMESPACE = "http://www.google.com/kml/ext/2.2"
INPUT_STYLE_ID = "inputMark"
INTERP_STYLE_ID = "interpMark"
XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>'


def format_coordinate(value: float) -> str:
    """At most 6 decimals, trailing zeros and a bare point removed"""
    text = f"{value:.6f}".rstrip('0').rstrip('.')
    if text in ('-0', ''):
        return '0'
    return text


def format_coordinates(lon: float, lat: float, alt: float) -> str:
    return ",".join(format_coordinate(v) for v in (lon, lat, alt))


def _add_style(document: ET.Element, style_id: str, icon_href: str) -> None:
    style = ET.SubElement(document, "Style", id=style_id)
    icon_style = ET.SubElement(style, "IconStyle")
    icon = ET.SubElement(icon_style, "Icon")
    ET.SubElement(icon, "href").text = icon_href


def _add_placemark(document: ET.Element, style_id: str, lon: float, lat: float, alt: float) -> None:
    placemark = ET.SubElement(document, "Placemark")
    ET.SubElement(placemark, "styleUrl").text = f"#{style_id}"
    point = ET.SubElement(placemark, "Point")
    ET.SubElement(point, "coordinates").text = format_coordinates(lon, lat, alt)


def emit_trajectory_kml(
    inputs: Sequence[PathPoint],
    interpolated: Iterable[SampledPose],
    settings: Optional[KmlConfig] = None,
) -> str:
    """
    Render input and interpolated trajectory marks as a KML document.

    Args:
        inputs: Input points, styled ``inputMark``
        interpolated: Interpolated samples, styled ``interpMark``
        settings: Icon references; defaults when absent

    Returns:
        UTF-8 XML text with declaration and trailing newline
    """
    settings = settings or KmlConfig()

    root = ET.Element("kml", {"xmlns": KML_NAMESPACE, "xmlns:gx": GX_NAMESPACE})
    document = ET.SubElement(root, "Document")
    _add_style(document, INPUT_STYLE_ID, settings.input_icon_href)
    _add_style(document, INTERP_STYLE_ID, settings.interp_icon_href)

    count = 0
    for point in sorted(inputs, key=lambda p: p.time):
        _add_placemark(document, INPUT_STYLE_ID, point.lon, point.lat, point.height)
        count += 1
    for sample in sorted(interpolated, key=lambda s: s.time):
        g = sample.geodetic
        _add_placemark(document, INTERP_STYLE_ID, g.lon, g.lat, g.h)
        count += 1

    ET.indent(root, space="  ")
    logger.debug(f"Rendered KML with {count} placemarks")
    return XML_DECLARATION + "\n" + ET.tostring(root, encoding="unicode") + "\n"
