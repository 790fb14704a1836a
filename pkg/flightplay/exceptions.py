"""
Custom exceptions for flightplay.

This module defines the exception hierarchy used throughout the engine
for consistent error reporting. Every error carries a machine-readable
code, a details dictionary with the offending file, line, field or value,
and the process exit code the CLI uses when the error reaches it.
"""

from datetime import datetime, timezone
from typing import Any, Dict, Optional


class FlightPlayError(Exception):
    """Base exception for all flightplay errors"""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        error_code: Optional[str] = None,
        exit_code: int = 1,
    ):
        self.message = message
        self.details = details or {}
        self.error_code = error_code or self.__class__.__name__
        self.exit_code = exit_code
        self.timestamp = datetime.now(timezone.utc)
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for structured logging"""
        result = {
            'error': self.error_code,
            'message': self.message,
            'timestamp': self.timestamp.isoformat(),
        }

        if self.details:
            result['details'] = self.details

        return result

    def add_context(self, key: str, value: Any) -> 'FlightPlayError':
        """Add additional context to the exception"""
        self.details[key] = value
        return self

    def describe(self) -> str:
        """One-line human readable description including known location details"""
        location = []
        for key in ('source', 'line', 'key', 'field'):
            if key in self.details:
                location.append(f"{key}={self.details[key]}")

        if location:
            return f"{self.message} ({', '.join(location)})"
        return self.message


class DomainError(FlightPlayError):
    """An input lies outside the domain of an operation"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details, error_code="DomainError")


class NumericError(FlightPlayError):
    """A numerical procedure failed (singular system, no convergence)"""

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        iterations: Optional[int] = None,
    ):
        enhanced_details = details or {}
        if iterations is not None:
            enhanced_details['iterations'] = iterations

        super().__init__(message, enhanced_details, error_code="NumericError")


class ParseError(FlightPlayError):
    """Malformed text input"""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        key: Optional[str] = None,
        source: Optional[str] = None,
    ):
        details: Dict[str, Any] = {}
        if source:
            details['source'] = source
        if line is not None:
            details['line'] = line
        if key:
            details['key'] = key

        super().__init__(message, details, error_code="ParseError")

    @property
    def line(self) -> Optional[int]:
        return self.details.get('line')

    @property
    def key(self) -> Optional[str]:
        return self.details.get('key')


class ValidationError(FlightPlayError):
    """Well-formed input carrying an invalid value"""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        source: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        enhanced_details = details or {}
        if source:
            enhanced_details['source'] = source
        if field:
            enhanced_details['field'] = field

        super().__init__(message, enhanced_details, error_code="ValidationError")

    @property
    def field(self) -> Optional[str]:
        return self.details.get('field')


class UnsupportedInputError(FlightPlayError):
    """Input the engine deliberately refuses to process"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details, error_code="UnsupportedInput")


class PathRangeError(FlightPlayError):
    """Time lookup outside the animation path"""

    def __init__(self, time: float, first_time: float, last_time: float):
        super().__init__(
            f"Time {time} outside animation path [{first_time}, {last_time}]",
            {'time': time, 'first_time': first_time, 'last_time': last_time},
            error_code="PathRangeError",
        )


class ProjectionError(FlightPlayError):
    """Point cannot be projected (at or behind the eye plane)"""

    def __init__(self, message: str, w: Optional[float] = None):
        details = {}
        if w is not None:
            details['w'] = w

        super().__init__(message, details, error_code="ProjectionError")


class PlaybackStateError(FlightPlayError):
    """Playback state does not allow the requested traversal"""

    def __init__(self, message: str, frame_index: Optional[int] = None):
        details = {}
        if frame_index is not None:
            details['frame_index'] = frame_index

        super().__init__(message, details, error_code="PlaybackStateError")


class ConfigurationError(FlightPlayError):
    """Configuration error"""

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        config_file: Optional[str] = None,
    ):
        details = {}
        if config_key:
            details['config_key'] = config_key
        if config_file:
            details['config_file'] = config_file

        super().__init__(
            f"Configuration error: {message}",
            details,
            error_code="ConfigurationError",
        )


class OutputError(FlightPlayError):
    """An output file could not be written"""

    def __init__(self, message: str, path: str):
        super().__init__(message, {'source': path}, error_code="OutputError")
