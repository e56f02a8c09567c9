import random

import pytest

from conftest import TRACK_DIR
from ontomatch.alignment import Alignment, Correspondence
from ontomatch.evaluation import (
    ConfusionCounts,
    Metrics,
    confusion,
    evaluate_track,
    load_track,
    macro_average,
    metrics,
    micro_average,
)
from ontomatch.rdf import Iri


def cell(s: str, t: str) -> Correspondence:
    return Correspondence(Iri(f"http://a#{s}"), Iri(f"http://b#{t}"))


class TestConfusion:
    def test_perfect_system(self):
        reference = Alignment([cell("a", "x"), cell("b", "y")])
        assert confusion(reference, reference) == ConfusionCounts(2, 0, 0)

    def test_disjoint(self):
        system = Alignment([cell("a", "x")])
        reference = Alignment([cell("b", "y"), cell("c", "z")])
        assert confusion(system, reference) == ConfusionCounts(0, 1, 2)

    def test_hand_counted_mix(self):
        system = Alignment([cell("a", "x"), cell("b", "y"), cell("c", "w")])
        reference = Alignment([cell("a", "x"), cell("b", "y"), cell("c", "z")])
        assert confusion(system, reference) == ConfusionCounts(2, 1, 1)

    def test_confidence_ignored(self):
        system = Alignment([Correspondence(Iri("http://a#a"), Iri("http://b#x"), confidence=0.1)])
        reference = Alignment([cell("a", "x")])
        assert confusion(system, reference) == ConfusionCounts(1, 0, 0)


class TestMetrics:
    def test_known_pr_to_f1(self):
        assert round(Metrics.from_pr(0.854, 0.825).f1, 3) == 0.839

    def test_second_known_pr_to_f1(self):
        assert abs(Metrics.from_pr(0.710, 0.498).f1 - 0.586) <= 0.0015

    def test_degenerate_zero_counts(self):
        assert metrics(ConfusionCounts(0, 0, 0)) == Metrics(0.0, 0.0, 0.0)

    def test_scale_consistency(self):
        base = ConfusionCounts(6, 3, 2)
        scaled = ConfusionCounts(18, 9, 6)
        assert metrics(base) == metrics(scaled)

    def test_f1_is_harmonic_mean(self):
        rng = random.Random(1)
        for _ in range(50):
            c = ConfusionCounts(rng.randrange(0, 20), rng.randrange(0, 20), rng.randrange(0, 20))
            m = metrics(c)
            if m.precision + m.recall > 0:
                assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))
                assert m.f1 <= max(m.precision, m.recall) + 1e-12
                assert m.f1 <= 2 * min(m.precision, m.recall) + 1e-12
            else:
                assert m.f1 == 0.0


class TestAggregation:
    def test_micro_of_single_equals_metrics(self):
        c = ConfusionCounts(3, 1, 2)
        assert micro_average([c]) == metrics(c)
        assert macro_average([metrics(c)]) == metrics(c)

    def test_micro_sums_counts(self):
        m = micro_average([ConfusionCounts(1, 1, 0), ConfusionCounts(1, 0, 1)])
        assert m.precision == pytest.approx(2 / 3)
        assert m.recall == pytest.approx(2 / 3)

    def test_micro_order_invariant(self):
        counts = [ConfusionCounts(3, 2, 1), ConfusionCounts(0, 5, 2), ConfusionCounts(7, 0, 0)]
        assert micro_average(counts) == micro_average(list(reversed(counts)))

    def test_macro_of_identical_cases(self):
        m = metrics(ConfusionCounts(4, 1, 1))
        averaged = macro_average([m, m, m])
        assert averaged.precision == pytest.approx(m.precision)
        assert averaged.recall == pytest.approx(m.recall)
        assert averaged.f1 == pytest.approx(m.f1)

    def test_macro_mean_of_f1(self):
        a = Metrics.from_pr(1.0, 1.0)
        b = Metrics(0.0, 0.0, 0.0)
        assert macro_average([a, b]).f1 == 0.5

    def test_micro_differs_from_macro_on_skew(self):
        # a big accurate case and a tiny terrible one
        big = ConfusionCounts(90, 0, 0)
        small = ConfusionCounts(0, 5, 5)
        micro = micro_average([big, small])
        macro = macro_average([metrics(big), metrics(small)])
        assert micro.f1 != macro.f1

    def test_empty_inputs_rejected(self):
        with pytest.raises(ValueError):
            micro_average([])
        with pytest.raises(ValueError):
            macro_average([])


class TestLoadTrack:
    def test_full_load(self):
        track, errors = load_track(TRACK_DIR)
        assert not errors
        assert [case.name for case in track] == ["conference", "instruments"]
        assert len(track.test_cases[0].load_reference()) == 32

    def test_missing_reference_reported(self, tmp_path):
        case = tmp_path / "broken"
        case.mkdir()
        (case / "source.ttl").write_text("@prefix ex: <http://a#> . ex:x a ex:C .")
        (case / "target.ttl").write_text("@prefix ex: <http://b#> . ex:y a ex:C .")
        ok = tmp_path / "ok"
        ok.mkdir()
        (ok / "source.ttl").write_text("@prefix ex: <http://a#> . ex:x a ex:C .")
        (ok / "target.ttl").write_text("@prefix ex: <http://b#> . ex:y a ex:C .")
        (ok / "reference.xml").write_bytes(
            b'<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"><Alignment>'
            b'<map><Cell><entity1 rdf:resource="http://a#x"/><entity2 rdf:resource="http://b#y"/>'
            b"</Cell></map></Alignment></rdf:RDF>"
        )
        track, errors = load_track(tmp_path)
        assert [case.name for case in track] == ["ok"]
        assert len(errors) == 1 and "broken" in errors[0]

    def test_empty_directory(self, tmp_path):
        track, errors = load_track(tmp_path)
        assert len(track) == 0 and not errors


class TestEvaluateTrack:
    def test_missing_system_counts_as_all_misses(self):
        track, _ = load_track(TRACK_DIR)
        results, aggregate = evaluate_track(track, {}, "micro")
        for r in results:
            assert r.counts.tp == 0 and r.counts.fp == 0
            assert r.counts.fn == {"conference": 32, "instruments": 6}[r.name]
        assert aggregate.f1 == 0.0

    def test_perfect_systems(self):
        track, _ = load_track(TRACK_DIR)
        systems = {case.name: case.load_reference() for case in track}
        results, aggregate = evaluate_track(track, systems, "macro")
        assert aggregate == Metrics(1.0, 1.0, 1.0)
        assert all(r.metrics.f1 == 1.0 for r in results)
