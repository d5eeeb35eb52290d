"""Exception types raised across the toolkit.

Every error subclasses :class:`FusebenchError`, which itself subclasses
``ValueError`` so callers that do not care about the fine-grained kind can
catch a single base class.
"""


class FusebenchError(ValueError):
    """Base class for all toolkit errors."""


class NonFiniteError(FusebenchError):
    """A value that must be finite is NaN or infinite."""


class NegativeExtentError(FusebenchError):
    """A rectangle was given a negative width or height.

    Carries ``line`` (1-based) when raised by a file parser.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class LengthMismatchError(FusebenchError):
    """Two per-frame sequences that must align have different lengths."""


class MissingConfidenceError(FusebenchError):
    """A prediction used for expert selection carries no confidence score."""


class NegativeLossError(FusebenchError):
    """A per-expert loss value is negative."""


class EmptyScoreMapError(FusebenchError):
    """A classification score map contains no values."""


class EmptyTraceError(FusebenchError):
    """A selection trace contains no frames."""


class EmptyCurveError(FusebenchError):
    """A threshold curve contains no points."""


class MissingSequenceResultError(FusebenchError):
    """An evaluation was requested for a sequence with no predictions."""

    def __init__(self, sequence_id: str):
        super().__init__(f"no results for sequence {sequence_id!r}")
        self.sequence_id = sequence_id


class MalformedLineError(FusebenchError):
    """A text file line does not match the declared grammar."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateSequenceIdError(FusebenchError):
    """A manifest lists the same sequence id twice."""


class ConfigError(FusebenchError):
    """A configuration value violates its declared invariant."""


class UnknownKeyError(ConfigError):
    """A configuration or manifest file contains an undeclared key."""

    def __init__(self, key: str, where: str = "config"):
        super().__init__(f"unknown key {key!r} in {where}")
        self.key = key


class EmptySubsetError(FusebenchError):
    """A requested evaluation subset contains no sequences."""

    def __init__(self, tag: str):
        super().__init__(f"subset {tag!r} contains no sequences")
        self.tag = tag


class NonPositiveScoreError(FusebenchError):
    """Balanced-benchmark indicators require strictly positive scores."""


class IntervalOutOfBoundsError(FusebenchError):
    """A degradation interval lies outside the sequence bounds."""
