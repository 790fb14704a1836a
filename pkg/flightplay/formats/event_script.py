"""
Scripted playback events.

One event per line::

    # comment
    frame=0 cmd=start
    frame=45 cmd=rate:2
    frame=90 cmd=seek:4.5
    frame=120 cmd=pause
    frame=150 cmd=stop

Frames must be nondecreasing; several events may share a frame and are
applied in file order.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Union

from pydantic import ValidationError as PydanticValidationError

from flightplay.exceptions import ParseError, ValidationError
from flightplay.models import SimCommand, SimEvent

logger = logging.getLogger(__name__)

VALUE_COMMANDS = (SimCommand.SEEK, SimCommand.RATE)


def _parse_command(text: str, lineno: int, source: Optional[str]):
    name, sep, raw_value = text.partition(':')
    try:
        command = SimCommand(name)
    except ValueError:
        raise ParseError(f"Unknown command {name!r}", line=lineno, key='cmd', source=source)

    if command in VALUE_COMMANDS:
        if not sep:
            raise ParseError(f"Command '{name}' needs a value, e.g. {name}:1.5",
                             line=lineno, key='cmd', source=source)
        try:
            value = float(raw_value)
        except ValueError:
            raise ParseError(f"Malformed {name} value {raw_value!r}", line=lineno, key='cmd', source=source)
        if not math.isfinite(value):
            raise ParseError(f"Non-finite {name} value {raw_value!r}", line=lineno, key='cmd', source=source)
        return command, value

    if sep:
        raise ParseError(f"Command '{name}' takes no value", line=lineno, key='cmd', source=source)
    return command, None


def _parse_line(line: str, lineno: int, source: Optional[str]) -> SimEvent:
    fields = {}
    for token in line.split():
        key, sep, value = token.partition('=')
        if not sep or key not in ('frame', 'cmd'):
            raise ParseError(f"Unexpected token {token!r}", line=lineno, source=source)
        if key in fields:
            raise ParseError(f"Duplicate '{key}'", line=lineno, key=key, source=source)
        fields[key] = value

    for key in ('frame', 'cmd'):
        if key not in fields:
            raise ParseError(f"Missing '{key}='", line=lineno, key=key, source=source)

    try:
        frame = int(fields['frame'])
    except ValueError:
        raise ParseError(f"Malformed frame index {fields['frame']!r}", line=lineno, key='frame', source=source)

    command, value = _parse_command(fields['cmd'], lineno, source)
    try:
        return SimEvent(at_frame=frame, command=command, value=value)
    except PydanticValidationError as e:
        raise ValidationError(
            f"Invalid event on line {lineno}: {e.errors()[0]['msg']}",
            field='frame' if frame < 0 else 'cmd',
            source=source,
            details={'line': lineno},
        ) from e


def parse_event_script(text: str, source: Optional[str] = None) -> List[SimEvent]:
    """
    Parse an event script.

    Raises:
        ParseError: Malformed line, with its line number
        ValidationError: Negative frame, non-positive rate, or frames out of order
    """
    events: List[SimEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue

        event = _parse_line(line, lineno, source)
        if events and event.at_frame < events[-1].at_frame:
            raise ValidationError(
                f"Events must be sorted by frame: frame {event.at_frame} on line {lineno} "
                f"follows frame {events[-1].at_frame}",
                field='frame',
                source=source,
                details={'line': lineno},
            )
        events.append(event)

    logger.debug(f"Parsed {len(events)} playback events")
    return events


def load_event_script(path: Union[str, Path]) -> List[SimEvent]:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"Cannot read event script: {e}", source=str(path)) from e
    return parse_event_script(text, source=str(path))


def render_event_script(events: List[SimEvent]) -> str:
    lines = []
    for event in events:
        cmd = event.command.value
        if event.value is not None:
            cmd = f"{cmd}:{event.value!r}"
        lines.append(f"frame={event.at_frame} cmd={cmd}")
    return "\n".join(lines) + ("\n" if lines else "")
