"""
Versioned YAML flight files.

A flight file stores the ingested inputs, the interpolated samples and the
settings they were produced with. Keys are written in model order so
identical flights produce identical bytes.
"""

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import yaml
from pydantic import ValidationError as PydanticValidationError

from flightplay.exceptions import ParseError, ValidationError
from flightplay.formats.output import write_text_file
from flightplay.models import FlightInput, FlightSettings, FlightStore, SampledPose

logger = logging.getLogger(__name__)


def build_flight_store(
    inputs: Sequence[FlightInput],
    samples: Sequence[SampledPose],
    samples_per_segment: int,
    degree: int,
) -> FlightStore:
    try:
        return FlightStore(
            settings=FlightSettings(samples_per_segment=samples_per_segment, degree=degree),
            inputs=list(inputs),
            samples=list(samples),
        )
    except PydanticValidationError as e:
        raise ValidationError(f"Inconsistent flight: {e.errors()[0]['msg']}") from e


def dump_flight_store(store: FlightStore) -> str:
    return yaml.safe_dump(
        store.model_dump(mode='json'),
        sort_keys=False,
        default_flow_style=False,
        allow_unicode=True,
    )


def write_flight_store(store: FlightStore, path: Union[str, Path]) -> Path:
    path = write_text_file(path, dump_flight_store(store))
    logger.info(f"Wrote flight file {path} ({len(store.inputs)} inputs, {len(store.samples)} samples)")
    return path


def parse_flight_store(text: str, source: Optional[str] = None) -> FlightStore:
    """
    Parse flight file text.

    Raises:
        ParseError: Not YAML, or not a mapping
        ValidationError: Fails the flight consistency checks
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        line = None
        mark = getattr(e, 'problem_mark', None)
        if mark is not None:
            line = mark.line + 1
        raise ParseError(f"Invalid flight file: {e}", line=line, source=source) from e

    if not isinstance(data, dict):
        raise ParseError("Flight file must be a mapping", source=source)

    try:
        return FlightStore.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first.get('loc', ())) or None
        raise ValidationError(f"Invalid flight file: {first['msg']}", field=field, source=source) from e


def load_flight_store(path: Union[str, Path]) -> FlightStore:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise ParseError(f"Cannot read flight file: {e}", source=str(path)) from e
    return parse_flight_store(text, source=str(path))
