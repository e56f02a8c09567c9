import csv

import pytest

from conftest import CONFERENCE, TRACK_DIR
from ontomatch.alignment import is_one_to_one, parse_alignment_xml
from ontomatch.bridge import read_training_csv
from ontomatch.candidates import high_recall_match
from ontomatch.cli import main, read_config_file
from ontomatch.negatives import (
    Label,
    SamplingConfig,
    add_negatives_via_matcher,
    sample_reference,
)

SOURCE = str(CONFERENCE / "source.ttl")
TARGET = str(CONFERENCE / "target.ttl")
REFERENCE = str(CONFERENCE / "reference.xml")


def read_csv_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


class TestMatch:
    def test_fixed_threshold_one_to_one(self, tmp_path, conference_source, conference_target):
        out = tmp_path / "alignment.xml"
        code = main(
            ["match", SOURCE, TARGET, "-o", str(out),
             "--threshold", "0.5", "--one-to-one", "--scorer", "lexical"]
        )
        assert code == 0
        alignment = parse_alignment_xml(out.read_bytes())
        assert is_one_to_one(alignment)
        candidates = high_recall_match(conference_source, conference_target)
        assert alignment.keys() <= candidates.keys()
        rows = read_csv_rows(tmp_path / "stages.csv")
        assert rows[0] == ["stage", "size"]
        sizes = [int(size) for name, size in rows[1:] if name in ("candidates", "threshold", "one_to_one")]
        assert sizes == sorted(sizes, reverse=True)
        assert (tmp_path / "stages.png").exists()

    def test_search_threshold_reports_choice(self, tmp_path, capsys):
        out = tmp_path / "alignment.xml"
        code = main(
            ["match", SOURCE, TARGET, "-o", str(out), "--reference", REFERENCE,
             "--search-threshold", "--fraction", "0.2", "--seed", "0", "--one-to-one"]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "chosen_threshold" in printed and "training_f1" in printed
        rows = {name: value for name, value in read_csv_rows(tmp_path / "stages.csv")[1:]}
        assert "chosen_threshold" in rows and "training_f1" in rows

    def test_unparseable_source_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.ttl"
        bad.write_text("this is not turtle at all {")
        code = main(["match", str(bad), TARGET, "-o", str(tmp_path / "o.xml")])
        assert code == 2
        assert "stage load" in capsys.readouterr().err

    def test_search_without_reference_fails(self, tmp_path, capsys):
        code = main(["match", SOURCE, TARGET, "-o", str(tmp_path / "o.xml"), "--search-threshold"])
        assert code == 1
        assert "reference" in capsys.readouterr().err


class TestEvaluate:
    @pytest.fixture()
    def system_dir(self, tmp_path):
        systems = tmp_path / "systems"
        systems.mkdir()
        for case in ("conference", "instruments"):
            reference = (TRACK_DIR / case / "reference.xml").read_bytes()
            (systems / f"{case}.xml").write_bytes(reference)
        return systems

    def test_perfect_systems_score_one(self, tmp_path, system_dir):
        out = tmp_path / "results.csv"
        code = main(["evaluate", str(TRACK_DIR), str(system_dir), "-o", str(out)])
        assert code == 0
        rows = read_csv_rows(out)
        assert rows[0] == ["testcase", "precision", "recall", "f1", "tp", "fp", "fn"]
        assert rows[-1][0] == "MICRO"
        assert float(rows[-1][3]) == 1.0
        assert out.with_suffix(".png").exists()

    def test_macro_row_label(self, tmp_path, system_dir):
        out = tmp_path / "results.csv"
        main(["evaluate", str(TRACK_DIR), str(system_dir), "-o", str(out), "--aggregation", "macro"])
        assert read_csv_rows(out)[-1][0] == "MACRO"

    def test_missing_system_alignment_counts_misses(self, tmp_path, system_dir):
        (system_dir / "instruments.xml").unlink()
        out = tmp_path / "results.csv"
        code = main(["evaluate", str(TRACK_DIR), str(system_dir), "-o", str(out)])
        assert code == 0
        by_name = {row[0]: row for row in read_csv_rows(out)[1:]}
        assert by_name["instruments"][6] == "6"  # all reference cells missed

    def test_parallel_jobs_give_same_results(self, tmp_path, system_dir):
        serial = tmp_path / "serial.csv"
        parallel = tmp_path / "parallel.csv"
        main(["evaluate", str(TRACK_DIR), str(system_dir), "-o", str(serial)])
        main(["evaluate", str(TRACK_DIR), str(system_dir), "-o", str(parallel), "--jobs", "4"])
        assert serial.read_bytes() == parallel.read_bytes()

    def test_broken_test_case_sets_exit_code(self, tmp_path, system_dir, capsys):
        broken_track = tmp_path / "track"
        broken_track.mkdir()
        case = broken_track / "incomplete"
        case.mkdir()
        (case / "source.ttl").write_text("@prefix ex: <http://a#> . ex:x a ex:C .")
        code = main(["evaluate", str(broken_track), str(system_dir), "-o", str(tmp_path / "r.csv")])
        assert code == 1
        assert "missing" in capsys.readouterr().err


class TestTrainData:
    def test_via_matcher_counts_match_library(self, tmp_path, conference_source, conference_target, conference_reference):
        out = tmp_path / "train.csv"
        code = main(
            ["train-data", SOURCE, TARGET, REFERENCE, "--strategy", "via_matcher",
             "--fraction", "0.2", "--seed", "11", "-o", str(out)]
        )
        assert code == 0
        candidates = high_recall_match(conference_source, conference_target)
        sampled = sample_reference(conference_reference, SamplingConfig(fraction=0.2, seed=11))
        expected = add_negatives_via_matcher(candidates, sampled)
        rows = read_training_csv(out.read_bytes())
        assert len(rows) == len(expected)
        expected_positives = sum(1 for e in expected if e.label is Label.POSITIVE)
        assert sum(1 for _, _, label in rows if label == 1) == expected_positives

    def test_share_zero_emits_positives_only(self, tmp_path):
        out = tmp_path / "train.csv"
        code = main(
            ["train-data", SOURCE, TARGET, REFERENCE, "--strategy", "share",
             "--share", "0", "-o", str(out)]
        )
        assert code == 0
        rows = read_training_csv(out.read_bytes())
        assert rows and all(label == 1 for _, _, label in rows)

    def test_output_reparses_with_bridge_reader(self, tmp_path):
        out = tmp_path / "train.csv"
        main(
            ["train-data", SOURCE, TARGET, REFERENCE, "--strategy", "one_one",
             "--seed", "3", "-o", str(out)]
        )
        rows = read_training_csv(out.read_bytes())
        labels = {label for _, _, label in rows}
        assert labels == {0, 1}


class TestSweep:
    def test_six_fractions_six_rows(self, tmp_path):
        out = tmp_path / "sweep"
        code = main(
            ["sweep", str(TRACK_DIR), "--fractions", "0.1,0.2,0.3,0.4,0.5,0.6",
             "--seed", "1", "-o", str(out), "--jobs", "2"]
        )
        assert code == 0
        rows = read_csv_rows(out / "sweep.csv")
        assert rows[0] == ["fraction", "precision", "recall", "f1"]
        assert [row[0] for row in rows[1:]] == ["0.1", "0.2", "0.3", "0.4", "0.5", "0.6"]
        assert (out / "sweep.png").exists()

    def test_deterministic_across_runs(self, tmp_path):
        first = tmp_path / "first"
        second = tmp_path / "second"
        args = ["sweep", str(TRACK_DIR), "--fractions", "0.2,0.4", "--seed", "7"]
        assert main(args + ["-o", str(first)]) == 0
        assert main(args + ["-o", str(second)]) == 0
        assert (first / "sweep.csv").read_bytes() == (second / "sweep.csv").read_bytes()

    def test_full_fraction_matches_match_plus_evaluate(self, tmp_path, conference_source, conference_target, conference_reference):
        from ontomatch.evaluation import confusion, load_track, micro_average
        from ontomatch.pipeline import PipelineConfig, SearchThreshold, run_match

        out = tmp_path / "sweep"
        code = main(["sweep", str(TRACK_DIR), "--fractions", "1.0", "--seed", "5", "-o", str(out)])
        assert code == 0
        row = read_csv_rows(out / "sweep.csv")[1]

        track, _ = load_track(TRACK_DIR)
        counts = []
        for case in track:
            o1, o2 = case.load_source(), case.load_target()
            reference = case.load_reference()
            cfg = PipelineConfig(
                threshold=SearchThreshold(fraction=1.0, seed=5, incomplete=False), one_to_one=False
            )
            result = run_match(o1, o2, cfg, reference)
            counts.append(confusion(result.alignment, reference))
        aggregate = micro_average(counts)
        assert row[1:] == [f"{aggregate.precision:.4f}", f"{aggregate.recall:.4f}", f"{aggregate.f1:.4f}"]

    def test_bad_fraction_rejected(self, tmp_path, capsys):
        code = main(["sweep", str(TRACK_DIR), "--fractions", "0.0,0.5", "-o", str(tmp_path / "s")])
        assert code == 1
        assert "fractions" in capsys.readouterr().err


class TestConfigFile:
    def test_config_file_applies_and_flags_win(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("extractor = transformers\nseed = 9\none_to_one = true\n# comment\n")
        values = read_config_file(cfg)
        assert values == {"extractor": "transformers", "seed": "9", "one_to_one": "true"}
        out = tmp_path / "o.xml"
        code = main(
            ["match", SOURCE, TARGET, "-o", str(out), "--config", str(cfg),
             "--extractor", "set", "--threshold", "0.4"]
        )
        assert code == 0
        assert is_one_to_one(parse_alignment_xml(out.read_bytes()))  # one_to_one from config

    def test_malformed_config_line(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("just a line without equals\n")
        with pytest.raises(ValueError, match="key = value"):
            read_config_file(cfg)

    def test_endpoint_falls_back_to_env_var(self, monkeypatch):
        from ontomatch.cli import ENDPOINT_ENV_VAR, build_parser, build_pipeline_config

        monkeypatch.setenv(ENDPOINT_ENV_VAR, "http://scorer.example:8000")
        args = build_parser().parse_args(["match", SOURCE, TARGET, "-o", "x.xml", "--scorer", "remote"])
        config = build_pipeline_config(args)
        assert config.endpoint is not None
        assert config.endpoint.base_url == "http://scorer.example:8000"

    def test_remote_without_endpoint_is_config_error(self, monkeypatch):
        from ontomatch.cli import ENDPOINT_ENV_VAR, StageError, build_parser, build_pipeline_config

        monkeypatch.delenv(ENDPOINT_ENV_VAR, raising=False)
        args = build_parser().parse_args(["match", SOURCE, TARGET, "-o", "x.xml", "--scorer", "remote"])
        with pytest.raises(StageError, match="endpoint"):
            build_pipeline_config(args)
