"""Decision-level fusion: per-frame expert selection by confidence.

Each of the three experts (RGB, TIR, fused RGBT) emits a box prediction and
a confidence score per frame; the expert with the highest confidence wins
the frame. Confidences are compared raw, with no cross-expert
normalization. Ties are broken by a configurable, deterministic preference
order (fused expert first by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    EmptyScoreMapError,
    EmptyTraceError,
    FusebenchError,
    LengthMismatchError,
    NegativeLossError,
    NonFiniteError,
)
from .model import Expert, ExpertStream, FramePrediction

__all__ = [
    "TiePolicy",
    "DEFAULT_TIE_POLICY",
    "ScoreMap",
    "SelectionRecord",
    "SelectionTrace",
    "confidence_from_score_map",
    "select_expert",
    "fuse_streams",
    "selection_ratios",
    "aggregate_expert_losses",
]


@dataclass(frozen=True)
class TiePolicy:
    """Total preference order over the three experts, used only on exact ties."""

    order: tuple[Expert, Expert, Expert] = (Expert.RGBT, Expert.TIR, Expert.RGB)

    def __post_init__(self):
        order = tuple(Expert(e) for e in self.order)
        object.__setattr__(self, "order", order)
        if sorted(e.value for e in order) != ["rgb", "rgbt", "tir"]:
            raise ConfigError(f"tie policy must order all three experts, got {order}")

    @classmethod
    def parse(cls, text: str) -> "TiePolicy":
        """Parse either a preset name ("rgbt-first") or an explicit order
        ("rgbt,tir,rgb")."""
        presets = {
            "rgbt-first": (Expert.RGBT, Expert.TIR, Expert.RGB),
            "tir-first": (Expert.TIR, Expert.RGBT, Expert.RGB),
            "rgb-first": (Expert.RGB, Expert.RGBT, Expert.TIR),
        }
        key = text.strip().lower()
        if key in presets:
            return cls(presets[key])
        parts = [p.strip() for p in key.split(",")]
        if len(parts) != 3:
            raise ConfigError(f"cannot parse tie policy {text!r}")
        try:
            return cls(tuple(Expert(p) for p in parts))  # type: ignore[arg-type]
        except ValueError as exc:
            raise ConfigError(f"cannot parse tie policy {text!r}: {exc}") from None


DEFAULT_TIE_POLICY = TiePolicy()


@dataclass(frozen=True, eq=False)
class ScoreMap:
    """A 2-D classification score grid; non-empty, all values finite."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 2:
            raise FusebenchError(f"score map must be 2-D, got shape {arr.shape}")
        if arr.size == 0:
            raise EmptyScoreMapError("score map has no values")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteError("score map contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


def confidence_from_score_map(score_map: ScoreMap | np.ndarray) -> float:
    """Reduce a classification score map to a confidence: its maximum value."""
    if isinstance(score_map, ScoreMap):
        return float(score_map.values.max())
    arr = np.asarray(score_map, dtype=float)
    if arr.size == 0:
        raise EmptyScoreMapError("score map has no values")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("score map contains non-finite values")
    return float(arr.max())


@dataclass(frozen=True)
class SelectionRecord:
    """One frame's selection outcome: the winner and all three confidences."""

    frame: int
    chosen: Expert
    confidence: float  # the winning (maximum) confidence
    cs_rgb: float
    cs_tir: float
    cs_rgbt: float

    def __post_init__(self):
        object.__setattr__(self, "chosen", Expert(self.chosen))
        top = max(self.cs_rgb, self.cs_tir, self.cs_rgbt)
        if self.confidence != top:
            raise FusebenchError(
                f"frame {self.frame}: winning confidence {self.confidence} "
                f"is not the maximum {top}"
            )
        if self.score_of(self.chosen) != self.confidence:
            raise FusebenchError(
                f"frame {self.frame}: chosen expert {self.chosen} does not "
                f"attain the winning confidence"
            )

    def score_of(self, expert: Expert) -> float:
        return {Expert.RGB: self.cs_rgb, Expert.TIR: self.cs_tir, Expert.RGBT: self.cs_rgbt}[expert]


@dataclass(frozen=True)
class SelectionTrace:
    """Per-frame record of which expert won and with what confidence."""

    records: tuple[SelectionRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    def count(self, expert: Expert) -> int:
        return sum(1 for r in self.records if r.chosen is expert)


def select_expert(
    cs_rgb: float,
    cs_tir: float,
    cs_rgbt: float,
    tie: TiePolicy = DEFAULT_TIE_POLICY,
) -> Expert:
    """The expert attaining the maximum confidence; exact ties fall back to
    the tie policy's preference order."""
    scores = {Expert.RGB: cs_rgb, Expert.TIR: cs_tir, Expert.RGBT: cs_rgbt}
    for e, v in scores.items():
        if not math.isfinite(v):
            raise NonFiniteError(f"{e} confidence must be finite, got {v!r}")
    top = max(scores.values())
    for e in tie.order:
        if scores[e] == top:
            return e
    raise AssertionError("unreachable: some expert attains the maximum")


def fuse_streams(
    rgb: ExpertStream,
    tir: ExpertStream,
    rgbt: ExpertStream,
    tie: TiePolicy = DEFAULT_TIE_POLICY,
) -> tuple[list[FramePrediction], SelectionTrace]:
    """Per frame, emit the prediction of the highest-confidence expert.

    Streams must have equal length; every frame of every stream carries a
    confidence (enforced by :class:`ExpertStream`). Declared-absence
    predictions compete like any other: their confidence decides.
    """
    n = len(rgb)
    if len(tir) != n or len(rgbt) != n:
        raise LengthMismatchError(
            f"streams disagree in length: rgb={n}, tir={len(tir)}, rgbt={len(rgbt)}"
        )
    by_expert = {Expert.RGB: rgb, Expert.TIR: tir, Expert.RGBT: rgbt}
    fused: list[FramePrediction] = []
    records: list[SelectionRecord] = []
    for i in range(n):
        cs = {e: s.predictions[i].confidence for e, s in by_expert.items()}
        chosen = select_expert(cs[Expert.RGB], cs[Expert.TIR], cs[Expert.RGBT], tie)
        fused.append(by_expert[chosen].predictions[i])
        records.append(
            SelectionRecord(
                frame=i,
                chosen=chosen,
                confidence=cs[chosen],
                cs_rgb=cs[Expert.RGB],
                cs_tir=cs[Expert.TIR],
                cs_rgbt=cs[Expert.RGBT],
            )
        )
    return fused, SelectionTrace(tuple(records))


def selection_ratios(trace: SelectionTrace) -> tuple[float, float, float]:
    """Fractions of frames won by (RGB, TIR, RGBT); they sum to 1."""
    n = len(trace)
    if n == 0:
        raise EmptyTraceError("selection trace has no frames")
    return (
        trace.count(Expert.RGB) / n,
        trace.count(Expert.TIR) / n,
        trace.count(Expert.RGBT) / n,
    )


def aggregate_expert_losses(l_rgb: float, l_tir: float, l_rgbt: float) -> float:
    """Arithmetic mean of the three per-expert losses."""
    for v in (l_rgb, l_tir, l_rgbt):
        if not math.isfinite(v):
            raise NonFiniteError(f"loss must be finite, got {v!r}")
        if v < 0:
            raise NegativeLossError(f"loss must be non-negative, got {v}")
    return (l_rgb + l_tir + l_rgbt) / 3.0
