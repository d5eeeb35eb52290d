"""Synthetic expert-stream simulator for fusion-policy experiments.

The simulator generates ground-truth box trajectories and three expert
streams (RGB, TIR, fused) whose quality is controlled by degradation
profiles, then evaluates five policies against each other:

* ``selection``     -- pick the highest-confidence expert per frame;
* ``always-fuse``   -- always use the fused expert;
* ``rgb-only`` / ``tir-only`` -- single-modality baselines;
* ``oracle``        -- per-frame best expert by true overlap (upper bound).

Degradation is modelled at the decision level: a degraded modality emits
predictions uncorrelated with the target (random, frozen or drifting
boxes), while an informative modality emits the true box with small
zero-mean jitter. Expert confidences are the true per-frame overlap plus
bounded uniform noise, so a noise level of zero gives perfectly calibrated
selection.

Everything is deterministic given the scenario seed: per-sequence and
per-stream random generators are derived statelessly from the master seed,
so results do not depend on any execution schedule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import ConfigError, IntervalOutOfBoundsError, LengthMismatchError
from .fusion import DEFAULT_TIE_POLICY, TiePolicy, fuse_streams
from .metrics import BenchmarkScores, MetricConfig, benchmark_scores, iou
from .model import (
    Box,
    DatasetManifest,
    Expert,
    ExpertStream,
    FramePrediction,
    FrameTruth,
    SequenceAnnotation,
)

__all__ = [
    "DegradedBehavior",
    "DegradationProfile",
    "FusedQualityModel",
    "ScenarioConfig",
    "ScenarioReport",
    "POLICIES",
    "child_seed",
    "generate_trajectory",
    "degraded_mask",
    "degrade_modality",
    "calibrate_confidence",
    "synthesize_fused_expert",
    "oracle_best_selection",
    "run_scenario",
]

POLICIES = ("selection", "always-fuse", "rgb-only", "tir-only", "oracle")


class DegradedBehavior(str, Enum):
    """What a non-informative modality emits on degraded frames."""

    UNIFORM_RANDOM_BOX = "uniform-random-box"
    FROZEN_BOX = "frozen-box"
    DRIFTING_BOX = "drifting-box"


@dataclass(frozen=True)
class DegradationProfile:
    """Describes when and how one modality stops being informative.

    Degraded frames are given either as explicit ``[start, end)`` intervals
    or as a random fraction of all frames (mutually exclusive). On
    informative frames the prediction is the true box jittered by zero-mean
    Gaussian noise with scale ``sigma_in`` times the box size.
    ``confidence_noise`` is the half-width of the uniform noise added to
    the overlap-based confidence (0 = perfectly calibrated).
    """

    target: Expert = Expert.RGB
    intervals: tuple[tuple[int, int], ...] | None = None
    fraction: float | None = None
    sigma_in: float = 0.05
    behavior: DegradedBehavior = DegradedBehavior.UNIFORM_RANDOM_BOX
    confidence_noise: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "target", Expert(self.target))
        object.__setattr__(self, "behavior", DegradedBehavior(self.behavior))
        if self.target is Expert.RGBT:
            raise ConfigError("degradation targets a single modality (rgb or tir)")
        if self.intervals is not None and self.fraction is not None:
            raise ConfigError("give degraded intervals or a fraction, not both")
        if self.intervals is not None:
            ivs = tuple((int(s), int(e)) for s, e in self.intervals)
            object.__setattr__(self, "intervals", ivs)
            for s, e in ivs:
                if s < 0 or e < s:
                    raise IntervalOutOfBoundsError(f"bad interval [{s}, {e})")
        if self.fraction is not None:
            f = float(self.fraction)
            if not 0.0 <= f <= 1.0:
                raise ConfigError(f"degraded fraction must lie in [0, 1], got {f}")
            object.__setattr__(self, "fraction", f)
        if self.sigma_in < 0 or not math.isfinite(self.sigma_in):
            raise ConfigError(f"sigma_in must be finite and non-negative, got {self.sigma_in}")
        if self.confidence_noise < 0 or not math.isfinite(self.confidence_noise):
            raise ConfigError(f"confidence_noise must be non-negative, got {self.confidence_noise}")


@dataclass(frozen=True)
class FusedQualityModel:
    """Quality law of the synthesized fused expert.

    With both inputs informative the fused overlap target is
    ``min(1, best_input + boost)`` (modality synergy). With one input
    degraded it is the mixture
    ``informative_weight * informative + (1 - informative_weight) * degraded``,
    i.e. the degraded side drags fusion down. With both degraded the same
    mixture is applied to (best, worst).
    """

    informative_weight: float = 0.5
    boost: float = 0.05
    confidence_noise: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.informative_weight <= 1.0:
            raise ConfigError(f"informative_weight must lie in [0, 1], got {self.informative_weight}")
        if self.boost < 0 or not math.isfinite(self.boost):
            raise ConfigError(f"boost must be non-negative, got {self.boost}")
        if self.confidence_noise < 0 or not math.isfinite(self.confidence_noise):
            raise ConfigError(f"confidence_noise must be non-negative, got {self.confidence_noise}")


def _default_rgb_profile() -> DegradationProfile:
    return DegradationProfile(target=Expert.RGB)


def _default_tir_profile() -> DegradationProfile:
    return DegradationProfile(target=Expert.TIR)


@dataclass(frozen=True)
class ScenarioConfig:
    """Full generative description of one simulation experiment."""

    n_sequences: int = 10
    n_frames: int = 100
    extent: tuple[float, float] = (640.0, 480.0)
    size_range: tuple[float, float] = (30.0, 60.0)
    motion_step_std: float = 4.0
    seed: int = 0
    rgb: DegradationProfile = field(default_factory=_default_rgb_profile)
    tir: DegradationProfile = field(default_factory=_default_tir_profile)
    fused: FusedQualityModel = field(default_factory=FusedQualityModel)

    def __post_init__(self):
        object.__setattr__(self, "extent", (float(self.extent[0]), float(self.extent[1])))
        object.__setattr__(self, "size_range", (float(self.size_range[0]), float(self.size_range[1])))
        if self.n_sequences < 1 or self.n_frames < 1:
            raise ConfigError("sequence and frame counts must be at least 1")
        if self.extent[0] <= 0 or self.extent[1] <= 0:
            raise ConfigError(f"image extent must be positive, got {self.extent}")
        lo, hi = self.size_range
        if not 0 < lo <= hi:
            raise ConfigError(f"object size range must satisfy 0 < lo <= hi, got {self.size_range}")
        if hi > min(self.extent):
            raise ConfigError("objects must fit inside the image extent")
        if self.motion_step_std < 0:
            raise ConfigError(f"motion_step_std must be non-negative, got {self.motion_step_std}")
        if self.rgb.target is not Expert.RGB:
            raise ConfigError("the rgb profile must target the rgb modality")
        if self.tir.target is not Expert.TIR:
            raise ConfigError("the tir profile must target the tir modality")


@dataclass(frozen=True)
class ScenarioReport:
    """Per-policy evaluation results plus the selection-policy trace ratios."""

    policies: dict[str, BenchmarkScores]
    selection_ratios: tuple[float, float, float]
    n_sequences: int
    n_frames: int
    seed: int


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def child_seed(seed, *keys: int) -> np.random.SeedSequence:
    """Stateless child-seed derivation: append ``keys`` to the spawn key.

    Unlike ``SeedSequence.spawn`` this has no internal counter, so the same
    (seed, keys) pair always yields the same child regardless of call order
    -- results stay schedule-independent.
    """
    base = _seed_sequence(seed)
    return np.random.SeedSequence(entropy=base.entropy, spawn_key=tuple(base.spawn_key) + keys)


def _reflect(x: float, lo: float, hi: float) -> float:
    """Fold ``x`` into ``[lo, hi]`` by repeated boundary reflection."""
    if hi <= lo:
        return lo
    span = hi - lo
    t = math.fmod(x - lo, 2.0 * span)
    if t < 0.0:
        t += 2.0 * span
    return lo + (t if t <= span else 2.0 * span - t)


def generate_trajectory(
    cfg: ScenarioConfig, seed, sequence_id: str | None = None
) -> SequenceAnnotation:
    """Smooth random-walk box trajectory clipped to the image extent.

    The center performs an independent Gaussian random walk per axis with
    reflective boundary handling; the box size is constant per sequence.
    Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(_seed_sequence(seed))
    W, H = cfg.extent
    lo, hi = cfg.size_range
    w = float(rng.uniform(lo, hi))
    h = float(rng.uniform(lo, hi))
    cx = float(rng.uniform(w / 2.0, W - w / 2.0))
    cy = float(rng.uniform(h / 2.0, H - h / 2.0))
    frames = []
    for i in range(cfg.n_frames):
        if i > 0:
            dx, dy = rng.normal(0.0, cfg.motion_step_std, size=2)
            cx = _reflect(cx + float(dx), w / 2.0, W - w / 2.0)
            cy = _reflect(cy + float(dy), h / 2.0, H - h / 2.0)
        frames.append(FrameTruth.present(Box(cx - w / 2.0, cy - h / 2.0, w, h)))
    sid = sequence_id if sequence_id is not None else f"sim-{_seed_sequence(seed).entropy}"
    return SequenceAnnotation(id=sid, frames=tuple(frames))


def degraded_mask(profile: DegradationProfile, n_frames: int, seed) -> np.ndarray:
    """Boolean mask of degraded frames for a sequence of ``n_frames``.

    Interval profiles are deterministic; fraction profiles choose a uniform
    random subset of ``round(fraction * n_frames)`` frames.
    """
    mask = np.zeros(n_frames, dtype=bool)
    if profile.intervals is not None:
        for s, e in profile.intervals:
            if e > n_frames:
                raise IntervalOutOfBoundsError(
                    f"interval [{s}, {e}) exceeds sequence length {n_frames}"
                )
            mask[s:e] = True
    elif profile.fraction is not None and profile.fraction > 0:
        k = int(round(profile.fraction * n_frames))
        if k > 0:
            rng = np.random.default_rng(_seed_sequence(seed))
            idx = rng.choice(n_frames, size=k, replace=False)
            mask[idx] = True
    return mask


def calibrate_confidence(pred: FramePrediction, gt: FrameTruth, noise: float = 0.0, seed=0) -> float:
    """Confidence = true overlap plus bounded uniform noise, clamped to [0, 1].

    ``noise = 0`` gives perfect calibration. ``seed`` may be an int, a
    ``SeedSequence`` or an existing ``Generator``.
    """
    if noise < 0 or not math.isfinite(noise):
        raise ConfigError(f"confidence noise must be non-negative, got {noise}")
    c = iou(gt, pred)
    if noise > 0:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        c += float(rng.uniform(-noise, noise))
    return min(1.0, max(0.0, c))


def _fallback_box(extent: tuple[float, float]) -> Box:
    W, H = extent
    return Box(W / 2.0 - W / 20.0, H / 2.0 - H / 20.0, W / 10.0, H / 10.0)


def degrade_modality(
    gt: SequenceAnnotation,
    profile: DegradationProfile,
    seed,
    extent: tuple[float, float] = (640.0, 480.0),
    mask: np.ndarray | None = None,
) -> ExpertStream:
    """Expert stream for one modality under a degradation profile.

    Informative frames emit the true box jittered by
    ``Normal(0, sigma_in * size)`` per axis (declared absence on absent
    ground-truth frames). Degraded frames follow the profile's behavior:

    * uniform-random-box: uniformly placed box of the target's size,
      uncorrelated with the target;
    * frozen-box: the last informative prediction, repeated;
    * drifting-box: a random walk wandering away from the last informative
      prediction (step scale 0.15 of the mean box side).

    ``mask`` may be supplied to reuse a precomputed degraded-frame mask;
    when omitted it is derived from the seed exactly as
    ``degraded_mask(profile, len(gt), child_seed(seed, 0))``.
    """
    n = len(gt)
    if mask is None:
        mask = degraded_mask(profile, n, child_seed(seed, 0))
    elif len(mask) != n:
        raise LengthMismatchError(f"mask has {len(mask)} entries for {n} frames")
    if profile.intervals is not None:
        for s, e in profile.intervals:
            if e > n:
                raise IntervalOutOfBoundsError(f"interval [{s}, {e}) exceeds sequence length {n}")
    rng = np.random.default_rng(child_seed(seed, 1))
    W, H = float(extent[0]), float(extent[1])

    first = next((f.box for f in gt.frames if f.is_present), None)
    last_informative = first if first is not None else _fallback_box((W, H))
    drift_box: Box | None = None

    preds: list[FramePrediction] = []
    for i, frame in enumerate(gt.frames):
        if not mask[i]:
            drift_box = None
            if frame.is_present:
                b = frame.box
                dx = float(rng.normal(0.0, profile.sigma_in * b.w)) if profile.sigma_in > 0 else 0.0
                dy = float(rng.normal(0.0, profile.sigma_in * b.h)) if profile.sigma_in > 0 else 0.0
                pred_box = b.shifted(dx, dy)
                last_informative = pred_box
                pred = FramePrediction(pred_box)
            else:
                pred = FramePrediction.absent()
        else:
            if profile.behavior is DegradedBehavior.UNIFORM_RANDOM_BOX:
                ref = frame.box if frame.is_present else last_informative
                w, h = ref.w, ref.h
                x = float(rng.uniform(0.0, max(W - w, 0.0)))
                y = float(rng.uniform(0.0, max(H - h, 0.0)))
                pred = FramePrediction(Box(x, y, w, h))
            elif profile.behavior is DegradedBehavior.FROZEN_BOX:
                pred = FramePrediction(last_informative)
            else:  # drifting
                if drift_box is None:
                    drift_box = last_informative
                step = 0.15 * (drift_box.w + drift_box.h) / 2.0
                dx, dy = rng.normal(0.0, step, size=2)
                drift_box = drift_box.shifted(float(dx), float(dy))
                pred = FramePrediction(drift_box)
        conf = calibrate_confidence(pred, frame, profile.confidence_noise, rng)
        preds.append(FramePrediction(pred.box, conf))
    return ExpertStream(expert=profile.target, predictions=tuple(preds))


def _box_with_overlap(gt_box: Box, quality: float, rng: np.random.Generator) -> Box:
    """A box whose IoU with ``gt_box`` equals ``quality`` (up to rounding).

    Pure horizontal shift of an equal-size box: shifting by
    ``d = w (1 - q) / (1 + q)`` yields IoU exactly ``q``; the direction is
    drawn from ``rng``.
    """
    q = min(1.0, max(0.0, quality))
    if gt_box.w <= 0.0 or gt_box.h <= 0.0:
        return gt_box
    d = gt_box.w * (1.0 - q) / (1.0 + q)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return gt_box.shifted(sign * d, 0.0)


def synthesize_fused_expert(
    rgb: ExpertStream,
    tir: ExpertStream,
    gt: SequenceAnnotation,
    model: FusedQualityModel | None = None,
    seed=0,
    rgb_degraded: Sequence[bool] | np.ndarray | None = None,
    tir_degraded: Sequence[bool] | np.ndarray | None = None,
) -> ExpertStream:
    """Fused expert whose per-frame overlap follows the quality model.

    Input qualities are the true per-frame overlaps of the two streams.
    The degraded masks say which side is non-informative at each frame
    (default: neither). A box realizing the resulting quality target is
    synthesized by controlled perturbation of the true box.
    """
    model = model or FusedQualityModel()
    n = len(gt)
    if len(rgb) != n or len(tir) != n:
        raise LengthMismatchError(
            f"stream lengths {len(rgb)}/{len(tir)} do not match {n} ground-truth frames"
        )
    rgb_deg = np.zeros(n, dtype=bool) if rgb_degraded is None else np.asarray(rgb_degraded, dtype=bool)
    tir_deg = np.zeros(n, dtype=bool) if tir_degraded is None else np.asarray(tir_degraded, dtype=bool)
    if len(rgb_deg) != n or len(tir_deg) != n:
        raise LengthMismatchError("degraded masks must match the sequence length")

    rng = np.random.default_rng(_seed_sequence(seed))
    a = model.informative_weight
    preds: list[FramePrediction] = []
    for i, frame in enumerate(gt.frames):
        if not frame.is_present:
            pred = FramePrediction.absent()
        else:
            q_rgb = iou(frame, rgb.predictions[i])
            q_tir = iou(frame, tir.predictions[i])
            if not rgb_deg[i] and not tir_deg[i]:
                target = min(1.0, max(q_rgb, q_tir) + model.boost)
            elif rgb_deg[i] and not tir_deg[i]:
                target = a * q_tir + (1.0 - a) * q_rgb
            elif tir_deg[i] and not rgb_deg[i]:
                target = a * q_rgb + (1.0 - a) * q_tir
            else:
                target = a * max(q_rgb, q_tir) + (1.0 - a) * min(q_rgb, q_tir)
            pred = FramePrediction(_box_with_overlap(frame.box, target, rng))
        conf = calibrate_confidence(pred, frame, model.confidence_noise, rng)
        preds.append(FramePrediction(pred.box, conf))
    return ExpertStream(expert=Expert.RGBT, predictions=tuple(preds))


def oracle_best_selection(
    rgb: ExpertStream,
    tir: ExpertStream,
    rgbt: ExpertStream,
    gt: SequenceAnnotation,
    tie: TiePolicy = DEFAULT_TIE_POLICY,
) -> list[FramePrediction]:
    """Per frame, the prediction with maximal true overlap (ties by policy)."""
    n = len(gt)
    for s in (rgb, tir, rgbt):
        if len(s) != n:
            raise LengthMismatchError(
                f"{s.expert} stream has {len(s)} frames for {n} ground-truth frames"
            )
    by_expert = {Expert.RGB: rgb, Expert.TIR: tir, Expert.RGBT: rgbt}
    out: list[FramePrediction] = []
    for i, frame in enumerate(gt.frames):
        q = {e: iou(frame, s.predictions[i]) for e, s in by_expert.items()}
        best = max(q.values())
        for e in tie.order:
            if q[e] == best:
                out.append(by_expert[e].predictions[i])
                break
    return out


def run_scenario(cfg: ScenarioConfig, metric_cfg: MetricConfig | None = None) -> ScenarioReport:
    """Generate a scenario and evaluate all five policies on it.

    Per-sequence seeds are derived statelessly from the master seed, so the
    result is byte-reproducible and independent of evaluation order.
    """
    metric_cfg = metric_cfg or MetricConfig()
    annotations: list[SequenceAnnotation] = []
    results: dict[str, dict[str, list[FramePrediction]]] = {p: {} for p in POLICIES}
    chosen_counts = {Expert.RGB: 0, Expert.TIR: 0, Expert.RGBT: 0}
    total_frames = 0

    for i in range(cfg.n_sequences):
        sid = f"seq-{i:04d}"
        traj = generate_trajectory(cfg, child_seed(cfg.seed, i, 0), sequence_id=sid)
        rgb_seed = child_seed(cfg.seed, i, 1)
        tir_seed = child_seed(cfg.seed, i, 2)
        rgb_mask = degraded_mask(cfg.rgb, cfg.n_frames, child_seed(rgb_seed, 0))
        tir_mask = degraded_mask(cfg.tir, cfg.n_frames, child_seed(tir_seed, 0))
        rgb = degrade_modality(traj, cfg.rgb, rgb_seed, extent=cfg.extent, mask=rgb_mask)
        tir = degrade_modality(traj, cfg.tir, tir_seed, extent=cfg.extent, mask=tir_mask)
        fused = synthesize_fused_expert(
            rgb, tir, traj, cfg.fused, child_seed(cfg.seed, i, 3),
            rgb_degraded=rgb_mask, tir_degraded=tir_mask,
        )

        selected, trace = fuse_streams(rgb, tir, fused)
        for r in trace.records:
            chosen_counts[r.chosen] += 1
        total_frames += len(trace)

        annotations.append(traj)
        results["selection"][sid] = selected
        results["always-fuse"][sid] = list(fused.predictions)
        results["rgb-only"][sid] = list(rgb.predictions)
        results["tir-only"][sid] = list(tir.predictions)
        results["oracle"][sid] = oracle_best_selection(rgb, tir, fused, traj)

    manifest = DatasetManifest(tuple(annotations), name="scenario")
    policies = {p: benchmark_scores(manifest, results[p], metric_cfg) for p in POLICIES}
    ratios = (
        chosen_counts[Expert.RGB] / total_frames,
        chosen_counts[Expert.TIR] / total_frames,
        chosen_counts[Expert.RGBT] / total_frames,
    )
    return ScenarioReport(
        policies=policies,
        selection_ratios=ratios,
        n_sequences=cfg.n_sequences,
        n_frames=cfg.n_frames,
        seed=cfg.seed,
    )
