"""
flightplay - headless flight trajectory recreation and playback.

Ingests per-photograph flight configuration files, smooths the trajectory
with an interpolating B-spline, places photographs on the globe with
geometry sidecars, exports KML trajectory marks and replays the flight as a
deterministic sequence of camera frames.
"""

__version__ = "0.1.0"
