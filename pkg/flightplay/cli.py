"""
Command-line interface.

Examples:
    # Ingest a directory of flight configs and photographs
    flightplay ingest data/demo_flight

    # Export trajectory marks for a globe viewer
    flightplay export-kml data/demo_flight/flight.yaml

    # Play the flight back from a scripted event file
    flightplay --fps 30 playback data/demo_flight/flight.yaml data/demo_flight/play.events
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click

from flightplay import __version__
from flightplay.camera import make_fixed_pm_wm
from flightplay.config import FlightPlayConfig, get_config_from_env
from flightplay.config_merger import ConfigMerger
from flightplay.exceptions import FlightPlayError
from flightplay.formats import (
    build_flight_store,
    emit_trajectory_kml,
    load_event_script,
    load_flight_store,
    write_flight_store,
    write_frame_dump,
    write_geometry_sidecar,
    write_mark_dump,
    write_text_file,
)
from flightplay.geodesy import WGS84, geodetic_to_ecef
from flightplay.logging_config import log_flight_event, new_run_id, setup_logging
from flightplay.parallel import parse_in_parallel
from flightplay.playback import project_marks_per_frame, run_playback
from flightplay.trajectory import (
    build_animation_path,
    discover_flight_configs,
    ingest_directory,
    ingest_flight,
    interpolate_trajectory,
    read_flight_config,
)

logger = logging.getLogger(__name__)

FLIGHT_FILE_NAME = 'flight.yaml'


class CliContext:
    """Effective configuration and global flags shared by all commands"""

    def __init__(self, config: FlightPlayConfig, out: Optional[str]):
        self.config = config
        self.out = out

    def output_path(self, default: Path) -> Path:
        return Path(self.out) if self.out else default


def _fail(error: FlightPlayError) -> None:
    logger.debug(f"Command failed: {error.to_dict()}")
    click.echo(f"Error: {error.describe()}", err=True)
    sys.exit(error.exit_code)


@click.group()
@click.version_option(__version__, prog_name='flightplay')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False),
              help='YAML settings file (also FLIGHTPLAY_CONFIG)')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              help='Log level (overrides config)')
@click.option('--log-format', type=click.Choice(['json', 'text']), help='Log record format (overrides config)')
@click.option('--fps', type=int, help='Playback frames per second (default 30)')
@click.option('--rate', type=float, help='Initial playback time multiplier (default 1.0)')
@click.option('--samples-per-segment', type=int,
              help='Interpolated samples between consecutive input points (default 5)')
@click.option('--degree', type=int, help='Spline degree for longitude/latitude (default 3)')
@click.option('--max-workers', type=int, help='Concurrent config file parsers (default 4)')
@click.option('--out', type=click.Path(dir_okay=False), help='Output file of the command')
@click.pass_context
def main(
    ctx: click.Context,
    config_path: Optional[str],
    log_level: Optional[str],
    log_format: Optional[str],
    fps: Optional[int],
    rate: Optional[float],
    samples_per_segment: Optional[int],
    degree: Optional[int],
    max_workers: Optional[int],
    out: Optional[str],
):
    """Recreate and play back flight trajectories from photograph configuration files."""
    try:
        base = get_config_from_env(config_path)
        config = ConfigMerger().build_effective_config(base, {
            'log_level': log_level,
            'log_format': log_format,
            'fps': fps,
            'rate': rate,
            'samples_per_segment': samples_per_segment,
            'degree': degree,
            'max_workers': max_workers,
        })
    except FlightPlayError as e:
        _fail(e)

    setup_logging(config.logging.level, config.logging.format)
    run_id = new_run_id()
    logger.debug(f"Starting run {run_id}: {ctx.invoked_subcommand}")
    ctx.obj = CliContext(config, out)


@main.command()
@click.argument('directory', type=click.Path(file_okay=False))
@click.pass_obj
def ingest(obj: CliContext, directory: str):
    """Ingest DIRECTORY into a flight file and write geometry sidecars."""
    config = obj.config
    try:
        inputs = ingest_directory(Path(directory), config.ingest.config_glob, config.ingest.max_workers)
        points = [item.point for item in inputs]
        samples = interpolate_trajectory(
            points,
            config.interpolation.samples_per_segment,
            config.interpolation.degree,
        )
        store = build_flight_store(
            inputs, samples,
            config.interpolation.samples_per_segment,
            config.interpolation.degree,
        )
        sidecars = [write_geometry_sidecar(item.photo, item.point.geodetic) for item in inputs]
        out = write_flight_store(store, obj.output_path(Path(directory) / FLIGHT_FILE_NAME))
    except FlightPlayError as e:
        _fail(e)

    log_flight_event(logger, str(out), 'ingested', 'Flight ingested',
                     inputs=len(inputs), samples=len(samples), sidecars=len(sidecars))
    click.echo(f"Flight: {out}")
    click.echo(f"Input points: {len(inputs)}")
    click.echo(f"Samples: {len(samples)}")
    click.echo(f"Geometry sidecars: {len(sidecars)}")


@main.command('export-kml')
@click.argument('flight', type=click.Path(dir_okay=False))
@click.pass_obj
def export_kml(obj: CliContext, flight: str):
    """Write the input and interpolated marks of FLIGHT as KML."""
    try:
        store = load_flight_store(flight)
        interpolated = [s for s in store.samples if not s.is_input]
        text = emit_trajectory_kml(store.points, interpolated, obj.config.kml)
        out = write_text_file(obj.output_path(Path(flight).with_suffix('.kml')), text)
    except FlightPlayError as e:
        _fail(e)

    log_flight_event(logger, flight, 'kml_exported', 'KML exported',
                     placemarks=len(store.points) + len(interpolated))
    click.echo(f"KML: {out}")
    click.echo(f"Placemarks: {len(store.points) + len(interpolated)} "
               f"({len(store.points)} input, {len(interpolated)} interpolated)")


@main.command()
@click.argument('flight', type=click.Path(dir_okay=False))
@click.argument('script', type=click.Path(dir_okay=False))
@click.option('--marks-out', type=click.Path(dir_okay=False),
              help='Also write the window positions of trajectory marks per frame')
@click.pass_obj
def playback(obj: CliContext, flight: str, script: str, marks_out: Optional[str]):
    """Play FLIGHT back under the event SCRIPT and dump every frame."""
    config = obj.config
    try:
        store = load_flight_store(flight)
        events = load_event_script(script)
        path = build_animation_path(store.samples)
        records = run_playback(path, events, config.playback.fps, config.playback.rate)

        out = obj.output_path(Path(flight).with_name(Path(flight).stem + '.frames.txt'))
        write_frame_dump(records, out)

        if marks_out:
            projection = config.projection
            pm, wm = make_fixed_pm_wm(
                projection.fov_y_deg, projection.aspect, projection.near, projection.far,
                projection.width_px, projection.height_px,
            )
            marks = [geodetic_to_ecef(WGS84, s.geodetic) for s in store.samples]
            write_mark_dump(project_marks_per_frame(records, marks, pm, wm), marks_out)
    except FlightPlayError as e:
        _fail(e)

    log_flight_event(logger, flight, 'played_back', 'Playback finished',
                     frames=len(records), fps=config.playback.fps)
    click.echo(f"Frames: {len(records)}")
    click.echo(f"Dump: {out}")


@main.command()
@click.argument('directory', type=click.Path(file_okay=False))
@click.pass_obj
def validate(obj: CliContext, directory: str):
    """Check every flight config in DIRECTORY without writing anything."""
    config = obj.config
    try:
        paths = discover_flight_configs(Path(directory), config.ingest.config_glob)
    except FlightPlayError as e:
        _fail(e)

    if not paths:
        click.echo(f"Error: no configuration files matching '{config.ingest.config_glob}' in {directory}",
                   err=True)
        sys.exit(1)

    outcomes = parse_in_parallel(paths, read_flight_config, max_workers=config.ingest.max_workers)
    failures = 0
    for outcome in outcomes:
        if outcome.ok:
            click.echo(f"OK   {outcome.path}")
        else:
            failures += 1
            click.echo(f"FAIL {outcome.path}: {outcome.error.describe()}")

    if not failures:
        try:
            ingest_flight([o.value for o in outcomes])
        except FlightPlayError as e:
            failures += 1
            click.echo(f"FAIL flight: {e.describe()}")

    if failures:
        click.echo(f"{failures} problem(s) in {len(paths)} files")
        sys.exit(1)
    click.echo(f"All {len(paths)} files valid")


@main.command()
@click.argument('flight', type=click.Path(dir_okay=False))
def info(flight: str):
    """Summarise a stored FLIGHT."""
    try:
        store = load_flight_store(flight)
    except FlightPlayError as e:
        _fail(e)

    lons = [s.geodetic.lon for s in store.samples]
    lats = [s.geodetic.lat for s in store.samples]
    heights = [s.geodetic.h for s in store.samples]
    first, last = store.samples[0].time, store.samples[-1].time

    click.echo(f"Format version: {store.format_version}")
    click.echo(f"Input points: {len(store.inputs)}")
    click.echo(f"Samples: {len(store.samples)}")
    click.echo(f"Samples per segment: {store.settings.samples_per_segment}")
    click.echo(f"Spline degree: {store.settings.degree}")
    click.echo(f"Period: {last - first!r} s ({first!r} .. {last!r})")
    click.echo(f"Longitude: {min(lons)!r} .. {max(lons)!r}")
    click.echo(f"Latitude: {min(lats)!r} .. {max(lats)!r}")
    click.echo(f"Height: {min(heights)!r} .. {max(heights)!r} m")


if __name__ == "__main__":
    main()
