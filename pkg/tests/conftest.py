import json
from pathlib import Path

import numpy as np
import pytest

from fusebench import (
    Box,
    DatasetManifest,
    FramePrediction,
    FrameTruth,
    SequenceAnnotation,
)
from fusebench import io as fio


def random_box(rng: np.random.Generator, extent: float = 100.0, degenerate_p: float = 0.02) -> Box:
    x, y = rng.uniform(0.0, extent, size=2)
    if rng.random() < degenerate_p:
        return Box(float(x), float(y), 0.0, 0.0)
    w, h = rng.uniform(0.5, extent / 2.0, size=2)
    return Box(float(x), float(y), float(w), float(h))


def random_truth(rng: np.random.Generator, absent_p: float = 0.15) -> FrameTruth:
    if rng.random() < absent_p:
        return FrameTruth.absent()
    return FrameTruth.present(random_box(rng))


def random_prediction(rng: np.random.Generator, gt: FrameTruth, absent_p: float = 0.15) -> FramePrediction:
    if rng.random() < absent_p:
        return FramePrediction.absent()
    if gt.is_present and rng.random() < 0.5:
        # near-miss around the target, including exact hits
        b = gt.box
        if rng.random() < 0.2:
            return FramePrediction(b)
        dx, dy = rng.normal(0.0, max(b.w, 1.0) / 2.0, size=2)
        return FramePrediction(b.shifted(float(dx), float(dy)))
    return FramePrediction(random_box(rng))


def random_benchmark(
    rng: np.random.Generator, n_sequences: int, max_frames: int = 50
) -> tuple[DatasetManifest, dict[str, list[FramePrediction]]]:
    """A benchmark of random sequences with presence/absence on both sides."""
    sequences = []
    results: dict[str, list[FramePrediction]] = {}
    for i in range(n_sequences):
        t = int(rng.integers(1, max_frames + 1))
        frames = tuple(random_truth(rng) for _ in range(t))
        sid = f"rand-{i:05d}"
        sequences.append(SequenceAnnotation(id=sid, frames=frames))
        results[sid] = [random_prediction(rng, g) for g in frames]
    return DatasetManifest(tuple(sequences), name="random"), results


@pytest.fixture
def toy_dataset(tmp_path: Path):
    """Small on-disk benchmark: 3 sequences (rgb/tir/untagged tags), perfect
    self-predictions, one absent frame per sequence."""
    rng = np.random.default_rng(42)
    gt_dir = tmp_path / "gt"
    res_dir = tmp_path / "results"
    gt_dir.mkdir()
    res_dir.mkdir()
    entries = []
    for i, tag in enumerate(["rgb", "tir", "none"]):
        sid = f"seq{i}"
        frames = []
        for j in range(10):
            if j == 4:
                frames.append(FrameTruth.absent())
            else:
                x, y = rng.uniform(5.0, 60.0, size=2)
                frames.append(FrameTruth.present(Box(float(x), float(y), 20.0, 15.0)))
        (gt_dir / f"{sid}.txt").write_text(fio.write_groundtruth(frames))
        (res_dir / f"{sid}.txt").write_text(fio.write_groundtruth(frames))
        entries.append({"id": sid, "groundtruth": f"gt/{sid}.txt", "subset": tag})
    manifest_path = tmp_path / "manifest.json"
    manifest_path.write_text(json.dumps({"name": "toy", "sequences": entries}, indent=1))
    return {"root": tmp_path, "manifest": manifest_path, "results": res_dir, "gt": gt_dir}
