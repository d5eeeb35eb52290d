import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusebench import (
    Box,
    ConfigError,
    DuplicateSequenceIdError,
    Expert,
    FramePrediction,
    FrameTruth,
    LengthMismatchError,
    MalformedLineError,
    MetricConfig,
    NegativeExtentError,
    ScenarioConfig,
    Subset,
    UnknownKeyError,
)
from fusebench import io as fio


class TestParseGroundtruth:
    def test_all_zero_row_is_absent(self):
        assert fio.parse_groundtruth("0,0,0,0") == [FrameTruth.absent()]

    def test_space_separated(self):
        assert fio.parse_groundtruth("10.5 20 30 40") == [
            FrameTruth.present(Box(10.5, 20, 30, 40))
        ]

    def test_mixed_separators_and_blank_lines(self):
        text = "1,2 3\t4\n\n0, 0,\t0 0\n"
        frames = fio.parse_groundtruth(text)
        assert frames == [FrameTruth.present(Box(1, 2, 3, 4)), FrameTruth.absent()]

    def test_malformed_line_is_numbered(self):
        with pytest.raises(MalformedLineError) as err:
            fio.parse_groundtruth("10,20,thirty,40")
        assert err.value.line == 1

    def test_wrong_field_count(self):
        with pytest.raises(MalformedLineError) as err:
            fio.parse_groundtruth("1,2,3\n1,2,3,4")
        assert err.value.line == 1

    def test_negative_extent_is_numbered(self):
        with pytest.raises(NegativeExtentError) as err:
            fio.parse_groundtruth("1,1,2,2\n1,1,-3,2")
        assert err.value.line == 2

    def test_non_finite_rejected(self):
        with pytest.raises(MalformedLineError):
            fio.parse_groundtruth("nan,0,1,1")


class TestParsePredictions:
    def test_absence_with_confidence(self):
        preds = fio.parse_predictions("0,0,0,0", "0.9")
        assert preds == [FramePrediction.absent(0.9)]

    def test_confidence_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            fio.parse_predictions("1,1,2,2\n1,1,2,2\n1,1,2,2", "0.5\n0.5")

    def test_optional_confidence(self):
        preds = fio.parse_predictions("5,5,10,10")
        assert preds[0].box == Box(5, 5, 10, 10)
        assert preds[0].confidence is None

    def test_malformed_confidence(self):
        with pytest.raises(MalformedLineError):
            fio.parse_predictions("1,1,2,2", "high")


finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False, allow_infinity=False)
truth_frames = st.lists(
    st.one_of(
        st.just(FrameTruth.absent()),
        st.builds(lambda x, y, w, h: FrameTruth.present(Box(x, y, w, h)), finite, finite, positive, positive),
    ),
    min_size=1,
    max_size=30,
)


class TestRoundTrip:
    @given(frames=truth_frames)
    def test_groundtruth_round_trips(self, frames):
        assert fio.parse_groundtruth(fio.write_groundtruth(frames)) == frames

    @given(frames=truth_frames, confs=st.lists(st.floats(0, 1, allow_nan=False), min_size=30, max_size=30))
    def test_predictions_round_trip_with_confidences(self, frames, confs):
        preds = [FramePrediction(f.box, c) for f, c in zip(frames, confs)]
        text = fio.write_predictions(preds)
        sidecar = fio.write_confidences(preds)
        assert fio.parse_predictions(text, sidecar) == preds


class TestManifest:
    def test_load_with_tags(self, toy_dataset):
        man = fio.load_manifest(toy_dataset["manifest"])
        assert man.m == 3
        assert man.sequences[0].subset is Subset.RGB_DOMINANT
        assert man.sequences[1].subset is Subset.TIR_DOMINANT
        assert man.sequences[2].subset is Subset.UNSPECIFIED
        assert all(len(s) == 10 for s in man.sequences)

    def test_duplicate_id(self, tmp_path):
        (tmp_path / "a.txt").write_text("1,1,2,2\n")
        manifest = {
            "sequences": [
                {"id": "a", "groundtruth": "a.txt"},
                {"id": "a", "groundtruth": "a.txt"},
            ]
        }
        path = tmp_path / "m.json"
        path.write_text(json.dumps(manifest))
        with pytest.raises(DuplicateSequenceIdError):
            fio.load_manifest(path)

    def test_missing_groundtruth_file(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"sequences": [{"id": "a", "groundtruth": "nope.txt"}]}))
        with pytest.raises(FileNotFoundError) as err:
            fio.load_manifest(path)
        assert "a" in str(err.value)

    def test_unknown_key_rejected(self, tmp_path):
        (tmp_path / "a.txt").write_text("1,1,2,2\n")
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"sequences": [{"id": "a", "groundtruth": "a.txt", "fps": 30}]}))
        with pytest.raises(UnknownKeyError):
            fio.load_manifest(path)


class TestResults:
    def test_load_results(self, toy_dataset):
        man = fio.load_manifest(toy_dataset["manifest"])
        res = fio.load_results(man, toy_dataset["results"])
        assert set(res) == {"seq0", "seq1", "seq2"}
        assert len(res["seq0"]) == 10

    def test_missing_result_names_sequence(self, toy_dataset):
        man = fio.load_manifest(toy_dataset["manifest"])
        (toy_dataset["results"] / "seq1.txt").unlink()
        with pytest.raises(FileNotFoundError) as err:
            fio.load_results(man, toy_dataset["results"])
        assert "seq1" in str(err.value)

    def test_expert_stream_requires_sidecar(self, tmp_path):
        p = tmp_path / "rgb.txt"
        p.write_text("1,1,2,2\n")
        with pytest.raises(FileNotFoundError):
            fio.load_expert_stream(p, Expert.RGB)
        (tmp_path / "rgb.txt.conf").write_text("0.5\n")
        stream = fio.load_expert_stream(p, Expert.RGB)
        assert stream.predictions[0].confidence == 0.5


class TestConfig:
    def test_empty_config_gives_defaults(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text("")
        cfg = fio.load_config(path)
        assert isinstance(cfg, MetricConfig)
        assert len(cfg.success_thresholds) == 21
        assert len(cfg.precision_thresholds) == 51
        assert cfg.pr_report_threshold == 20.0

    def test_gtot_style_threshold(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"pr_report_threshold": 5}))
        cfg = fio.load_config(path)
        assert cfg.pr_report_threshold == 5.0

    def test_non_increasing_grid_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"success_thresholds": [0.9, 0.5, 0.1]}))
        with pytest.raises(ConfigError):
            fio.load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"succes_thresholds": [0.1]}))
        with pytest.raises(UnknownKeyError):
            fio.load_config(path)

    def test_scenario_kind(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "kind": "scenario",
            "n_sequences": 3,
            "n_frames": 7,
            "rgb": {"fraction": 0.5, "behavior": "frozen-box"},
        }))
        cfg = fio.load_config(path)
        assert isinstance(cfg, ScenarioConfig)
        assert cfg.n_sequences == 3
        assert cfg.rgb.fraction == 0.5

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"kind": "magic"}))
        with pytest.raises(ConfigError):
            fio.load_config(path)

    def test_unknown_nested_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"kind": "scenario", "rgb": {"strength": 2}}))
        with pytest.raises(UnknownKeyError):
            fio.load_config(path)


class TestBundledScenarios:
    def test_names(self):
        names = fio.bundled_scenario_names()
        assert "mmw-one-modality-dead" in names
        assert "common-scenario" in names

    def test_load(self):
        cfg = fio.bundled_scenario("mmw-one-modality-dead")
        assert cfg.rgb.fraction == 1.0
        assert cfg.tir.fraction == 0.0
        assert cfg.fused.informative_weight == 0.5
        assert cfg.n_sequences == 100 and cfg.n_frames == 200

    def test_unknown_name(self):
        with pytest.raises(ConfigError):
            fio.bundled_scenario("does-not-exist")
