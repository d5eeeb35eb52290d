"""File ingest and export: the boundary where sentinels become typed variants.

Formats
-------
Groundtruth / prediction files
    One frame per line, four real numbers ``x y w h`` separated by commas,
    spaces or tabs (mixes allowed). Blank lines are ignored. An all-zero
    row means the target is absent (groundtruth) or absence is declared
    (predictions). Values are taken verbatim; no 0- vs 1-indexing
    correction is applied.

Confidence sidecars
    One real number per line, same length as the prediction file it
    accompanies; conventional file name is the prediction file name plus
    the suffix ``.conf``.

Manifest (JSON)
    ``{"name": str?, "sequences": [{"id": str, "groundtruth": path,
    "subset": "rgb"|"tir"|"none"?}, ...]}``. Paths are relative to the
    manifest's directory. Sequence ids must be unique. Unknown keys are
    rejected.

Config (JSON)
    A single object with an optional ``"kind"`` key: ``"metrics"``
    (default) or ``"scenario"``. An empty file means all defaults. Unknown
    keys are rejected at every level; see README for the full key lists.

Results directory
    One prediction file per sequence, named ``<sequence id>.txt``, with
    optional ``<sequence id>.txt.conf`` sidecars.
"""

from __future__ import annotations

import json
import re
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    ConfigError,
    DuplicateSequenceIdError,
    FusebenchError,
    LengthMismatchError,
    MalformedLineError,
    NegativeExtentError,
    UnknownKeyError,
)
from .metrics import MetricConfig
from .model import (
    Box,
    DatasetManifest,
    Expert,
    ExpertStream,
    FramePrediction,
    FrameTruth,
    SequenceAnnotation,
    Subset,
)
from .simulate import (
    DegradationProfile,
    FusedQualityModel,
    ScenarioConfig,
)

__all__ = [
    "parse_groundtruth",
    "parse_predictions",
    "parse_confidences",
    "write_groundtruth",
    "write_predictions",
    "write_confidences",
    "load_manifest",
    "load_results",
    "load_expert_stream",
    "load_config",
    "metric_config_from_dict",
    "scenario_config_from_dict",
    "bundled_scenario_names",
    "bundled_scenario",
]

_SEP = re.compile(r"[,\s]+")


def _parse_line(line: str, line_no: int) -> tuple[float, float, float, float]:
    parts = [p for p in _SEP.split(line.strip()) if p]
    if len(parts) != 4:
        raise MalformedLineError(f"expected 4 fields, got {len(parts)}", line_no)
    values = []
    for p in parts:
        try:
            v = float(p)
        except ValueError:
            raise MalformedLineError(f"not a number: {p!r}", line_no) from None
        if v != v or v in (float("inf"), float("-inf")):
            raise MalformedLineError(f"non-finite value: {p!r}", line_no)
        values.append(v)
    return tuple(values)  # type: ignore[return-value]


def _iter_rows(text: str):
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        yield line_no, _parse_line(line, line_no)


def parse_groundtruth(text: str) -> list[FrameTruth]:
    """Parse a groundtruth file; all-zero rows become absent frames."""
    frames: list[FrameTruth] = []
    for line_no, (x, y, w, h) in _iter_rows(text):
        if x == 0 and y == 0 and w == 0 and h == 0:
            frames.append(FrameTruth.absent())
            continue
        if w < 0 or h < 0:
            raise NegativeExtentError(f"line {line_no}: negative extent w={w}, h={h}", line_no)
        frames.append(FrameTruth.present(Box(x, y, w, h)))
    return frames


def parse_confidences(text: str) -> list[float]:
    """Parse a confidence sidecar: one finite real per non-blank line."""
    values: list[float] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            v = float(line.strip())
        except ValueError:
            raise MalformedLineError(f"not a number: {line.strip()!r}", line_no) from None
        if v != v or v in (float("inf"), float("-inf")):
            raise MalformedLineError(f"non-finite confidence: {line.strip()!r}", line_no)
        values.append(v)
    return values


def parse_predictions(text: str, confidences: str | None = None) -> list[FramePrediction]:
    """Parse a prediction file, optionally attaching a confidence sidecar.

    All-zero rows become declared absences; confidences are attached
    positionally and must match the prediction count.
    """
    preds: list[FramePrediction] = []
    for line_no, (x, y, w, h) in _iter_rows(text):
        if x == 0 and y == 0 and w == 0 and h == 0:
            preds.append(FramePrediction.absent())
            continue
        if w < 0 or h < 0:
            raise NegativeExtentError(f"line {line_no}: negative extent w={w}, h={h}", line_no)
        preds.append(FramePrediction(Box(x, y, w, h)))
    if confidences is not None:
        conf = parse_confidences(confidences)
        if len(conf) != len(preds):
            raise LengthMismatchError(
                f"{len(preds)} predictions but {len(conf)} confidence values"
            )
        preds = [FramePrediction(p.box, c) for p, c in zip(preds, conf)]
    return preds


def _format_row(box: Box | None) -> str:
    if box is None:
        return "0,0,0,0"
    return f"{box.x!r},{box.y!r},{box.w!r},{box.h!r}"


def write_groundtruth(frames: Sequence[FrameTruth]) -> str:
    """Serialize groundtruth frames; absent frames become all-zero rows.

    Float fields use shortest round-trip formatting, so parsing the output
    reproduces the input exactly.
    """
    return "".join(_format_row(f.box) + "\n" for f in frames)


def write_predictions(preds: Sequence[FramePrediction]) -> str:
    """Serialize predictions in the groundtruth line format."""
    return "".join(_format_row(p.box) + "\n" for p in preds)


def write_confidences(preds: Sequence[FramePrediction]) -> str:
    """Serialize the confidence sidecar for a prediction list."""
    missing = [i for i, p in enumerate(preds) if p.confidence is None]
    if missing:
        raise FusebenchError(f"predictions at frames {missing[:5]} have no confidence")
    return "".join(f"{p.confidence!r}\n" for p in preds)


_SUBSET_TAGS = {"rgb": Subset.RGB_DOMINANT, "tir": Subset.TIR_DOMINANT, "none": Subset.UNSPECIFIED}


def _check_keys(d: Mapping, allowed: set[str], where: str) -> None:
    for k in d:
        if k not in allowed:
            raise UnknownKeyError(k, where)


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load a manifest and eagerly parse every referenced groundtruth file."""
    path = Path(path)
    raw = json.loads(path.read_text() or "{}")
    if not isinstance(raw, dict):
        raise ConfigError(f"manifest {path} must hold a JSON object")
    _check_keys(raw, {"name", "sequences"}, f"manifest {path.name}")
    entries = raw.get("sequences")
    if not isinstance(entries, list) or not entries:
        raise ConfigError(f"manifest {path} must list at least one sequence")

    sequences: list[SequenceAnnotation] = []
    paths: dict[str, str] = {}
    seen: set[str] = set()
    for entry in entries:
        if not isinstance(entry, dict):
            raise ConfigError(f"manifest {path}: sequence entries must be objects")
        _check_keys(entry, {"id", "groundtruth", "subset"}, f"manifest {path.name}")
        try:
            sid = str(entry["id"])
            gt_rel = str(entry["groundtruth"])
        except KeyError as exc:
            raise ConfigError(f"manifest {path}: sequence entry missing {exc}") from None
        if sid in seen:
            raise DuplicateSequenceIdError(f"duplicate sequence id {sid!r}")
        seen.add(sid)
        tag = entry.get("subset", "none")
        if tag not in _SUBSET_TAGS:
            raise ConfigError(f"manifest {path}: unknown subset tag {tag!r}")
        gt_path = path.parent / gt_rel
        if not gt_path.is_file():
            raise FileNotFoundError(f"groundtruth file for sequence {sid!r} not found: {gt_path}")
        frames = parse_groundtruth(gt_path.read_text())
        sequences.append(SequenceAnnotation(id=sid, frames=tuple(frames), subset=_SUBSET_TAGS[tag]))
        paths[sid] = str(gt_path)
    return DatasetManifest(tuple(sequences), name=str(raw.get("name", "")), paths=paths)


def load_results(
    manifest: DatasetManifest,
    results_dir: str | Path,
    with_confidence: bool = False,
) -> dict[str, list[FramePrediction]]:
    """Load one prediction file per manifest sequence from a directory.

    Files are ``<sequence id>.txt`` with optional ``.conf`` sidecars
    (required when ``with_confidence`` is set).
    """
    results_dir = Path(results_dir)
    out: dict[str, list[FramePrediction]] = {}
    for seq in manifest.sequences:
        pred_path = results_dir / f"{seq.id}.txt"
        if not pred_path.is_file():
            raise FileNotFoundError(f"prediction file for sequence {seq.id!r} not found: {pred_path}")
        conf_path = Path(str(pred_path) + ".conf")
        conf_text: str | None = None
        if conf_path.is_file():
            conf_text = conf_path.read_text()
        elif with_confidence:
            raise FileNotFoundError(f"confidence sidecar for sequence {seq.id!r} not found: {conf_path}")
        try:
            out[seq.id] = parse_predictions(pred_path.read_text(), conf_text)
        except FusebenchError as exc:
            raise FusebenchError(f"{pred_path.name}: {exc}") from exc
    return out


def load_expert_stream(path: str | Path, expert: Expert | str, conf_path: str | Path | None = None) -> ExpertStream:
    """Load a prediction file plus its confidence sidecar as an expert stream."""
    path = Path(path)
    conf_path = Path(conf_path) if conf_path is not None else Path(str(path) + ".conf")
    if not path.is_file():
        raise FileNotFoundError(f"prediction file not found: {path}")
    if not conf_path.is_file():
        raise FileNotFoundError(f"confidence sidecar not found: {conf_path}")
    preds = parse_predictions(path.read_text(), conf_path.read_text())
    return ExpertStream(expert=Expert(expert), predictions=tuple(preds))


# -- configuration files ----------------------------------------------------

_METRIC_KEYS = {
    "kind",
    "th_s",
    "th_p",
    "success_thresholds",
    "precision_thresholds",
    "pooling",
    "pr_report_threshold",
}

_SCENARIO_KEYS = {
    "kind",
    "n_sequences",
    "n_frames",
    "extent",
    "size_range",
    "motion_step_std",
    "seed",
    "rgb",
    "tir",
    "fused",
}

_PROFILE_KEYS = {"intervals", "fraction", "sigma_in", "behavior", "confidence_noise"}
_FUSED_KEYS = {"informative_weight", "boost", "confidence_noise"}


def metric_config_from_dict(d: Mapping) -> MetricConfig:
    """Build a MetricConfig from parsed JSON; unknown keys are rejected."""
    _check_keys(d, _METRIC_KEYS, "metrics config")
    kwargs = {k: v for k, v in d.items() if k != "kind"}
    try:
        return MetricConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _profile_from_dict(d: Mapping, target: Expert) -> DegradationProfile:
    _check_keys(d, _PROFILE_KEYS, f"{target} degradation profile")
    kwargs = dict(d)
    if "intervals" in kwargs and kwargs["intervals"] is not None:
        kwargs["intervals"] = tuple(tuple(iv) for iv in kwargs["intervals"])
    try:
        return DegradationProfile(target=target, **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def scenario_config_from_dict(d: Mapping) -> ScenarioConfig:
    """Build a ScenarioConfig from parsed JSON; unknown keys are rejected."""
    _check_keys(d, _SCENARIO_KEYS, "scenario config")
    kwargs = {k: v for k, v in d.items() if k not in ("kind", "rgb", "tir", "fused")}
    if "extent" in kwargs:
        kwargs["extent"] = tuple(kwargs["extent"])
    if "size_range" in kwargs:
        kwargs["size_range"] = tuple(kwargs["size_range"])
    if "rgb" in d:
        kwargs["rgb"] = _profile_from_dict(d["rgb"], Expert.RGB)
    if "tir" in d:
        kwargs["tir"] = _profile_from_dict(d["tir"], Expert.TIR)
    if "fused" in d:
        _check_keys(d["fused"], _FUSED_KEYS, "fused quality model")
        kwargs["fused"] = FusedQualityModel(**d["fused"])
    try:
        return ScenarioConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path) -> MetricConfig | ScenarioConfig:
    """Load a JSON config file; ``kind`` selects metrics (default) or scenario.

    An empty file yields a default MetricConfig.
    """
    path = Path(path)
    text = path.read_text().strip()
    raw = json.loads(text) if text else {}
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    kind = raw.get("kind", "metrics")
    if kind == "metrics":
        return metric_config_from_dict(raw)
    if kind == "scenario":
        return scenario_config_from_dict(raw)
    raise ConfigError(f"config {path}: unknown kind {kind!r} (use 'metrics' or 'scenario')")


# -- bundled scenarios -------------------------------------------------------


def bundled_scenario_names() -> tuple[str, ...]:
    """Names of the scenario configs shipped with the package."""
    pkg = resources.files("fusebench") / "data" / "scenarios"
    return tuple(sorted(p.name[: -len(".json")] for p in pkg.iterdir() if p.name.endswith(".json")))


def bundled_scenario(name: str) -> ScenarioConfig:
    """Load one of the scenario configs shipped with the package."""
    pkg = resources.files("fusebench") / "data" / "scenarios"
    candidate = pkg / f"{name}.json"
    try:
        text = candidate.read_text()
    except (FileNotFoundError, OSError):
        raise ConfigError(
            f"unknown bundled scenario {name!r}; available: {', '.join(bundled_scenario_names())}"
        ) from None
    raw = json.loads(text)
    return scenario_config_from_dict(raw)
