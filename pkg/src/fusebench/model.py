"""Core domain types: boxes, presence/absence, sequences, expert streams.

Conventions used throughout the toolkit:

* coordinates are real-valued pixels, ``(x, y)`` is the top-left corner and
  ``y`` grows downward (image convention);
* target absence is a distinct variant (``box is None``), never an all-zero
  sentinel rectangle -- the sentinel exists only in files and is translated
  at the parser boundary (see :mod:`fusebench.io`);
* all types are immutable after construction and safe to share across
  concurrent evaluation workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DuplicateSequenceIdError,
    FusebenchError,
    MissingConfidenceError,
    NegativeExtentError,
    NonFiniteError,
)

__all__ = [
    "Expert",
    "Subset",
    "Box",
    "FrameTruth",
    "FramePrediction",
    "SequenceAnnotation",
    "ExpertStream",
    "DatasetManifest",
    "make_box",
    "center",
]


class Expert(str, Enum):
    """One of the three tracking experts emitting per-frame predictions."""

    RGB = "rgb"
    TIR = "tir"
    RGBT = "rgbt"

    def __str__(self) -> str:  # keep file/CLI output free of "Expert."
        return self.value


class Subset(str, Enum):
    """Modality-dominance tag attached to a sequence."""

    RGB_DOMINANT = "rgb"
    TIR_DOMINANT = "tir"
    UNSPECIFIED = "none"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in pixel space.

    Width and height must be non-negative; all fields must be finite.
    A zero-area box is valid (degenerate rectangle).
    """

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise NonFiniteError(f"box field {name} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise NonFiniteError(f"box field {name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.w < 0 or self.h < 0:
            raise NegativeExtentError(f"box extent must be non-negative, got w={self.w}, h={self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    def center(self) -> tuple[float, float]:
        """Center point ``(x + w/2, y + h/2)``; total for any valid box."""
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def shifted(self, dx: float, dy: float) -> "Box":
        return Box(self.x + dx, self.y + dy, self.w, self.h)


def make_box(x: float, y: float, w: float, h: float) -> Box:
    """Validating constructor; rejects non-finite values and negative extents."""
    return Box(x, y, w, h)


def center(b: Box) -> tuple[float, float]:
    """Center of a box, as a free function."""
    return b.center()


@dataclass(frozen=True)
class FrameTruth:
    """Ground truth for one frame: either a visible box or target absence."""

    box: Box | None = None

    @classmethod
    def present(cls, box: Box) -> "FrameTruth":
        if box is None:
            raise FusebenchError("present frame requires a box")
        return cls(box)

    @classmethod
    def absent(cls) -> "FrameTruth":
        return cls(None)

    @property
    def is_present(self) -> bool:
        return self.box is not None


@dataclass(frozen=True)
class FramePrediction:
    """One expert's output for one frame.

    ``box is None`` means the expert declared the target absent. The
    confidence score is optional in general but required on every frame of
    an :class:`ExpertStream` (selection needs it).
    """

    box: Box | None = None
    confidence: float | None = None

    def __post_init__(self):
        if self.confidence is not None:
            c = float(self.confidence)
            if not math.isfinite(c):
                raise NonFiniteError(f"prediction confidence must be finite, got {self.confidence!r}")
            object.__setattr__(self, "confidence", c)

    @classmethod
    def absent(cls, confidence: float | None = None) -> "FramePrediction":
        return cls(None, confidence)

    @property
    def is_present(self) -> bool:
        return self.box is not None

    @property
    def declares_absence(self) -> bool:
        return self.box is None


@dataclass(frozen=True)
class SequenceAnnotation:
    """Ordered ground-truth frames for one video, plus its subset tag."""

    id: str
    frames: tuple[FrameTruth, ...]
    subset: Subset = Subset.UNSPECIFIED

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "subset", Subset(self.subset))
        if len(self.frames) < 1:
            raise FusebenchError(f"sequence {self.id!r} must contain at least one frame")

    def __len__(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class ExpertStream:
    """One expert's per-frame predictions, every frame carrying a confidence.

    Construction fails if any frame lacks a finite confidence; pairing with
    an annotation of different length is rejected by the consumers
    (evaluation, fusion) rather than silently truncated.
    """

    expert: Expert
    predictions: tuple[FramePrediction, ...]

    def __post_init__(self):
        object.__setattr__(self, "expert", Expert(self.expert))
        object.__setattr__(self, "predictions", tuple(self.predictions))
        for i, p in enumerate(self.predictions):
            if p.confidence is None:
                raise MissingConfidenceError(
                    f"{self.expert} stream: frame {i} has no confidence score"
                )

    def __len__(self) -> int:
        return len(self.predictions)

    @property
    def confidences(self) -> tuple[float, ...]:
        return tuple(p.confidence for p in self.predictions)


@dataclass(frozen=True)
class DatasetManifest:
    """A loaded benchmark: at least one sequence, ids unique.

    ``paths`` optionally records where each sequence's groundtruth file came
    from (filled by :func:`fusebench.io.load_manifest`).
    """

    sequences: tuple[SequenceAnnotation, ...]
    name: str = ""
    paths: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(self.sequences))
        if len(self.sequences) < 1:
            raise FusebenchError("manifest must contain at least one sequence")
        seen: set[str] = set()
        for seq in self.sequences:
            if seq.id in seen:
                raise DuplicateSequenceIdError(f"duplicate sequence id {seq.id!r}")
            seen.add(seq.id)

    @property
    def m(self) -> int:
        """Number of sequences in the benchmark."""
        return len(self.sequences)

    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sequences)

    def subset(self, tag: Subset) -> tuple[SequenceAnnotation, ...]:
        return tuple(s for s in self.sequences if s.subset is tag)


