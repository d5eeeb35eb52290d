"""Success/precision evaluation basics: overlap, absence, curves, AUC.

Run with: python3 demos/01_metrics_and_curves.py
"""

import numpy as np

from fusebench import (
    Box,
    DatasetManifest,
    FramePrediction,
    FrameTruth,
    MetricConfig,
    SequenceAnnotation,
    benchmark_scores,
    center_distance,
    frame_success_indicator,
    iou,
)

# ---------------------------------------------------------------------------
# Per-frame scores. Boxes are (x, y, w, h) with the top-left image convention.
# ---------------------------------------------------------------------------
gt = FrameTruth.present(Box(0, 0, 2, 2))
print("exact hit      ->", iou(gt, FramePrediction(Box(0, 0, 2, 2))))
print("offset by 1,1  ->", iou(gt, FramePrediction(Box(1, 1, 2, 2))), "(1/7)")
print("center error   ->", center_distance(gt, FramePrediction(Box(3, 4, 2, 2))), "px")

# Absence is a first-class outcome: a frame with no visible target counts as
# correct only when the tracker declares the absence.
absent = FrameTruth.absent()
print("declared absence on absent frame ->", iou(absent, FramePrediction.absent()))
print("box predicted on absent frame    ->", iou(absent, FramePrediction(Box(1, 1, 2, 2))))
print("success at threshold 1.0, correct absence ->",
      frame_success_indicator(absent, FramePrediction.absent(), 1.0))

# ---------------------------------------------------------------------------
# A small benchmark: two sequences tracked with different quality.
# ---------------------------------------------------------------------------
rng = np.random.default_rng(0)
sequences, results = [], {}
for sid, noise in (("steady", 1.0), ("shaky", 6.0)):
    frames, preds = [], []
    for i in range(60):
        box = Box(20.0 + i, 30.0, 25.0, 25.0)
        frames.append(FrameTruth.present(box))
        dx, dy = rng.normal(0.0, noise, size=2)
        preds.append(FramePrediction(box.shifted(float(dx), float(dy))))
    sequences.append(SequenceAnnotation(id=sid, frames=tuple(frames)))
    results[sid] = preds

manifest = DatasetManifest(tuple(sequences), name="demo")
scores = benchmark_scores(manifest, results, MetricConfig())

print("\nsuccess curve (threshold -> score):")
for th, s in list(zip(scores.sr_curve.thresholds, scores.sr_curve.scores))[::4]:
    print(f"  {th:4.2f} -> {s:.3f}  {'#' * int(s * 40)}")
print(f"\nSR-AUC  = {scores.sr_auc:.4f}   (mean of the 21 grid scores)")
print(f"PR@20px = {scores.pr_at_threshold:.4f}")
