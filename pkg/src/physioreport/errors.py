"""Exception hierarchy shared by all modules.

The CLI maps :class:`InputError` subclasses to exit code 2 and
:class:`AgentError` subclasses to exit code 3.
"""

from __future__ import annotations


class PhysioReportError(Exception):
    """Base class for every error raised by this package."""


class InputError(PhysioReportError, ValueError):
    """Invalid user-supplied data or parameters."""


class InvalidParameterError(InputError):
    pass


class FilterDesignError(InputError):
    pass


class UnstableFilterError(InputError):
    pass


class FlatSpectrumError(InputError):
    """No in-band spectral power; ``fallback_hz`` is the lowest in-band bin."""

    def __init__(self, message: str, fallback_hz: float):
        super().__init__(message)
        self.fallback_hz = fallback_hz


class IngestError(InputError):
    """A file could not be read or did not match its documented format."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = None if path is None else str(path)
        self.line = line
        self.reason = message
        location = ""
        if self.path is not None:
            location = self.path
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(location + message)


class FormatError(IngestError):
    pass


class ParseError(IngestError):
    pass


class ValidationError(IngestError):
    pass


class EmptyInputError(IngestError):
    pass


class AgentError(PhysioReportError):
    """Failure while talking to, or interpreting, the language model."""


class BackendError(AgentError):
    """Transport failure: timeout, connection refused, HTTP error."""


class ProtocolError(AgentError):
    pass


class ResponseFormatError(AgentError):
    def __init__(self, message: str, raw_text: str = ""):
        super().__init__(message)
        self.raw_text = raw_text


class TurnLimitError(AgentError):
    pass
