"""
Trio-based parallel parsing of per-file inputs.

Each file is parsed in a worker thread under a capacity limiter. Results are
stored by input index, so output order never depends on completion order.
A failing file does not cancel its siblings: its error is captured in its
outcome and the caller decides whether to raise it or report it.
"""

import logging
from pathlib import Path
from typing import Callable, Generic, List, Optional, Sequence, TypeVar

import trio

from flightplay.exceptions import FlightPlayError

logger = logging.getLogger(__name__)

T = TypeVar('T')


class ParseOutcome(Generic[T]):
    """Result of parsing one file: a value or the error it raised"""

    def __init__(self, path: Path, value: Optional[T] = None, error: Optional[FlightPlayError] = None):
        self.path = path
        self.value = value
        self.error = error

    @property
    def ok(self) -> bool:
        return self.error is None

    def __repr__(self) -> str:
        state = 'ok' if self.ok else self.error.error_code
        return f"ParseOutcome({self.path}, {state})"


async def _parse_all(
    paths: Sequence[Path],
    parse_fn: Callable[[Path], T],
    max_workers: int,
) -> List[ParseOutcome[T]]:
    limiter = trio.CapacityLimiter(max_workers)
    outcomes: List[Optional[ParseOutcome[T]]] = [None] * len(paths)

    async def parse_one(index: int, path: Path):
        try:
            value = await trio.to_thread.run_sync(parse_fn, path, limiter=limiter)
            outcomes[index] = ParseOutcome(path, value=value)
        except FlightPlayError as e:
            e.details.setdefault('source', str(path))
            logger.debug(f"Parsing {path} failed: {e.message}")
            outcomes[index] = ParseOutcome(path, error=e)

    async with trio.open_nursery() as nursery:
        for index, path in enumerate(paths):
            nursery.start_soon(parse_one, index, path)

    return outcomes


def parse_in_parallel(
    paths: Sequence[Path],
    parse_fn: Callable[[Path], T],
    max_workers: int = 4,
) -> List[ParseOutcome[T]]:
    """
    Parse files concurrently.

    Args:
        paths: Files to parse
        parse_fn: Blocking parser called once per path in a worker thread
        max_workers: Maximum number of concurrently running parsers

    Returns:
        One outcome per path, in the order of ``paths``
    """
    if max_workers < 1:
        raise ValueError("max_workers must be at least 1")
    if not paths:
        return []

    logger.debug(f"Parsing {len(paths)} files with up to {max_workers} workers")
    return trio.run(_parse_all, list(paths), parse_fn, max_workers)
