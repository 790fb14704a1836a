"""
Headless playback of an animation path.

Each frame runs three traversals in a fixed order:

- event: apply the scripted commands due at this frame
- update: advance simulated time by dt * rate and look up the camera key
- render: turn the current camera key into a view matrix and frame record

Time advances in fixed steps of 1 / fps, so a run is a pure function of the
path, the script and the frame rate.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from flightplay.camera import CameraPose, view_matrix_of, world_to_screen
from flightplay.exceptions import DomainError, PlaybackStateError, ProjectionError
from flightplay.geodesy import WGS84, ecef_to_geodetic
from flightplay.models import MIN_RATE, EcefPoint, FrameRecord, SimCommand, SimEvent, SimMode
from flightplay.trajectory import AnimationPath, ControlPoint, sample_path

logger = logging.getLogger(__name__)

END_SNAP_SECONDS = 1e-9

ProjectedMark = Tuple[int, float, float, float]


class SimState(BaseModel):
    """Playback state carried from one frame to the next"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    path: AnimationPath
    mode: SimMode = SimMode.IDLE
    sim_time: float = 0.0
    rate: float = Field(default=1.0, ge=MIN_RATE)
    frame_index: int = Field(default=0, ge=0)
    current_control: Optional[ControlPoint] = None
    paused: bool = False
    # start/seek show the requested time before advancing
    hold: bool = False
    end_reached: bool = False


def initial_state(path: AnimationPath, rate: float = 1.0) -> SimState:
    return SimState(path=path, sim_time=path.first_time, rate=rate)


def _reach_end(state: SimState, was_simulating: bool) -> SimState:
    return state.model_copy(update={
        'sim_time': state.path.last_time,
        'mode': SimMode.IDLE,
        'paused': False,
        'hold': False,
        'end_reached': was_simulating,
    })


def event_traversal(state: SimState, due: Sequence[SimEvent]) -> SimState:
    """Apply commands in order; seeks clamp into the path's time range"""
    path = state.path
    for event in due:
        simulating = state.mode is SimMode.SIMULATION
        command = event.command

        if command is SimCommand.START:
            if not simulating:
                state = state.model_copy(update={
                    'mode': SimMode.SIMULATION,
                    'sim_time': path.first_time,
                    'paused': False,
                    'hold': True,
                    'end_reached': False,
                })
            elif state.paused:
                state = state.model_copy(update={'paused': False})

        elif command is SimCommand.PAUSE:
            if simulating:
                state = state.model_copy(update={'paused': True})

        elif command is SimCommand.SEEK:
            target = min(max(event.value, path.first_time), path.last_time)
            if target != event.value:
                logger.debug(f"Seek to {event.value} clamped to {target}")
            if target >= path.last_time:
                state = _reach_end(state, simulating)
            else:
                state = state.model_copy(update={'sim_time': target, 'hold': simulating})

        elif command is SimCommand.RATE:
            state = state.model_copy(update={'rate': event.value})

        elif command is SimCommand.STOP:
            state = state.model_copy(update={
                'mode': SimMode.IDLE,
                'paused': False,
                'hold': False,
                'end_reached': False,
            })

    return state


def update_traversal(state: SimState, dt: float) -> SimState:
    """
    Advance simulated time and refresh the current control point.

    Raises:
        DomainError: If dt is not positive
        PlaybackStateError: If the time step is too small to change simulated time
    """
    if dt <= 0:
        raise DomainError("Frame time step must be positive", {'dt': dt})

    if state.mode is not SimMode.SIMULATION:
        if state.end_reached:
            return state.model_copy(update={'current_control': sample_path(state.path, state.sim_time)})
        return state

    sim_time = state.sim_time
    if not (state.hold or state.paused):
        sim_time += dt * state.rate
        if sim_time <= state.sim_time:
            raise PlaybackStateError(
                f"Time step {dt * state.rate} is lost at t={state.sim_time}; playback cannot advance",
                frame_index=state.frame_index,
            )

    state = state.model_copy(update={'sim_time': sim_time, 'hold': False})
    if sim_time >= state.path.last_time - END_SNAP_SECONDS:
        state = _reach_end(state, was_simulating=True)

    return state.model_copy(update={'current_control': sample_path(state.path, state.sim_time)})


def pose_of(control: ControlPoint) -> CameraPose:
    return CameraPose(rotation_lsr=control.rotation_matrix(), eye=control.position)


def render_traversal(state: SimState) -> FrameRecord:
    """
    Record the frame for the current control point.

    Raises:
        PlaybackStateError: If no control point has been computed yet
    """
    control = state.current_control
    if control is None:
        raise PlaybackStateError("Nothing to render before the first update", frame_index=state.frame_index)

    vm = view_matrix_of(pose_of(control))
    return FrameRecord(
        frame_index=state.frame_index,
        sim_time=state.sim_time,
        eye_geodetic=ecef_to_geodetic(WGS84, control.position),
        eye_ecef=control.position,
        view_matrix=tuple(float(v) for v in vm.flatten()),
    )


def frame(state: SimState, due: Sequence[SimEvent], dt: float) -> Tuple[SimState, Optional[FrameRecord]]:
    """
    One event -> update -> render cycle.

    A record is produced while simulating and on the frame that reaches the
    end of the path.
    """
    state = event_traversal(state, due)
    state = update_traversal(state, dt)

    record = None
    if state.mode is SimMode.SIMULATION or state.end_reached:
        record = render_traversal(state)

    state = state.model_copy(update={'frame_index': state.frame_index + 1, 'end_reached': False})
    return state, record


def run_playback(
    path: AnimationPath,
    script: Sequence[SimEvent],
    fps: int,
    rate: float = 1.0,
) -> List[FrameRecord]:
    """
    Run the frame loop until playback is idle with no pending events.

    Idle stretches between events are skipped. A run that is paused with no
    further events stops there.

    An immediate start at rate r renders one frame per step of r / fps plus
    the clamped final frame, which is ceil(period * fps / r) + 1 frames. When
    period * fps / r is not a whole number that is one more than
    floor(period * fps / r) + 1.

    Raises:
        DomainError: If fps is below 1
        PlaybackStateError: If the time step is too small to change simulated time
    """
    if fps < 1:
        raise DomainError("fps must be at least 1", {'fps': fps})

    dt = 1.0 / fps
    events = sorted(script, key=lambda e: e.at_frame)
    state = initial_state(path, rate)
    records: List[FrameRecord] = []
    cursor = 0

    while True:
        due = []
        while cursor < len(events) and events[cursor].at_frame <= state.frame_index:
            due.append(events[cursor])
            cursor += 1

        state, record = frame(state, due, dt)
        if record is not None:
            records.append(record)

        pending = cursor < len(events)
        if state.mode is SimMode.IDLE:
            if not pending:
                break
            state = state.model_copy(update={'frame_index': max(state.frame_index, events[cursor].at_frame)})
        elif state.paused and not pending:
            logger.warning(f"Playback paused at t={state.sim_time} with no further events; stopping")
            break

    logger.info(f"Playback produced {len(records)} frames at {fps} fps")
    return records


def _window_size(wm: np.ndarray) -> Tuple[float, float]:
    return 2.0 * float(wm[0, 3]), 2.0 * float(wm[1, 3])


def project_marks(
    record: FrameRecord,
    marks: Sequence[EcefPoint],
    pm: np.ndarray,
    wm: np.ndarray,
) -> List[ProjectedMark]:
    """
    Window positions of trajectory marks visible in a frame.

    Returns:
        (mark index, x_px, y_px, depth) for marks in front of the camera and
        inside the window
    """
    vm = np.array(record.view_matrix).reshape(4, 4)
    width, height = _window_size(wm)
    visible = []
    for index, mark in enumerate(marks):
        try:
            x, y, depth = world_to_screen(mark, vm, pm, wm)
        except ProjectionError:
            continue
        if 0.0 <= x <= width and 0.0 <= y <= height and 0.0 <= depth <= 1.0:
            visible.append((index, x, y, depth))
    return visible


def project_marks_per_frame(
    records: Iterable[FrameRecord],
    marks: Sequence[EcefPoint],
    pm: np.ndarray,
    wm: np.ndarray,
) -> List[Tuple[int, List[ProjectedMark]]]:
    return [(r.frame_index, project_marks(r, marks, pm, wm)) for r in records]
