import pytest

from ontomatch.alignment import Alignment, Correspondence
from ontomatch.candidates import high_recall_match
from ontomatch.negatives import (
    Label,
    SamplingConfig,
    add_negatives_one_one,
    add_negatives_random_absolute,
    add_negatives_random_share,
    add_negatives_via_matcher,
    round_half_up,
    sample_reference,
)
from ontomatch.rdf import Iri, parse_turtle


def onto(prefix: str, names: list[str]):
    header = f"@prefix ex: <http://{prefix}#> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
    return parse_turtle((header + "\n".join(f"ex:{n} a owl:Class ." for n in names)).encode())


O1 = onto("left", [f"LeftThing{i}" for i in range(8)])
O2 = onto("right", [f"RightThing{i}" for i in range(8)])


def cells(n: int, conf: float = 1.0) -> Alignment:
    return Alignment(
        Correspondence(Iri(f"http://left#LeftThing{i}"), Iri(f"http://right#RightThing{i}"), confidence=conf)
        for i in range(n)
    )


def split(examples):
    pos = {e.correspondence for e in examples if e.label is Label.POSITIVE}
    neg = {e.correspondence for e in examples if e.label is Label.NEGATIVE}
    return pos, neg


class TestRounding:
    def test_half_up(self):
        assert round_half_up(3.5) == 4
        assert round_half_up(3.4) == 3
        assert round_half_up(2.0) == 2


class TestSampleReference:
    def test_fraction_of_ten(self):
        sampled = sample_reference(cells(10), SamplingConfig(fraction=0.2, seed=1))
        assert len(sampled) == 2

    def test_full_fraction_is_identity(self):
        reference = cells(10)
        assert sample_reference(reference, SamplingConfig(fraction=1.0, seed=1)) == reference

    def test_deterministic_and_seed_sensitive(self):
        reference = Alignment(
            Correspondence(Iri(f"http://left#a{i}"), Iri(f"http://right#b{i}")) for i in range(100)
        )
        first = sample_reference(reference, SamplingConfig(fraction=0.3, seed=9))
        second = sample_reference(reference, SamplingConfig(fraction=0.3, seed=9))
        other = sample_reference(reference, SamplingConfig(fraction=0.3, seed=10))
        assert first == second
        assert first != other

    def test_minimum_size_one(self):
        assert len(sample_reference(cells(3), SamplingConfig(fraction=0.01, seed=0))) == 1

    def test_absolute_count_overrides_fraction(self):
        assert len(sample_reference(cells(10), SamplingConfig(fraction=0.2, seed=0, absolute_count=7))) == 7

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            sample_reference(Alignment(), SamplingConfig(fraction=0.5, seed=0))

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            SamplingConfig(fraction=0.0)
        with pytest.raises(ValueError):
            SamplingConfig(fraction=1.2)


class TestRandomAbsolute:
    def test_count_zero_gives_positives_only(self):
        examples = add_negatives_random_absolute(cells(3), O1, O2, 0, seed=4)
        pos, neg = split(examples)
        assert len(pos) == 3 and not neg

    def test_exact_count_disjoint_from_positives(self):
        positives = cells(3)
        examples = add_negatives_random_absolute(positives, O1, O2, 5, seed=4)
        pos, neg = split(examples)
        assert len(neg) == 5
        assert all(c not in positives for c in neg)

    def test_pigeonhole_error(self):
        with pytest.raises(ValueError, match="distinct non-positive"):
            add_negatives_random_absolute(cells(3), O1, O2, 8 * 8 - 3 + 1, seed=4)

    def test_near_exhaustion_still_exact(self):
        examples = add_negatives_random_absolute(cells(3), O1, O2, 8 * 8 - 3, seed=4)
        _, neg = split(examples)
        assert len(neg) == 8 * 8 - 3

    def test_deterministic(self):
        a = add_negatives_random_absolute(cells(3), O1, O2, 5, seed=4)
        b = add_negatives_random_absolute(cells(3), O1, O2, 5, seed=4)
        assert a == b


class TestRandomShare:
    def test_share_one(self):
        _, neg = split(add_negatives_random_share(cells(8), O1, O2, 1.0, seed=2))
        assert len(neg) == 8

    def test_share_zero(self):
        _, neg = split(add_negatives_random_share(cells(5), O1, O2, 0.0, seed=2))
        assert not neg

    def test_share_rounds_half_up(self):
        _, neg = split(add_negatives_random_share(cells(7), O1, O2, 0.5, seed=2))
        assert len(neg) == 4

    def test_deterministic(self):
        assert add_negatives_random_share(cells(5), O1, O2, 0.8, seed=6) == add_negatives_random_share(
            cells(5), O1, O2, 0.8, seed=6
        )


class TestOneOne:
    def test_two_negatives_per_positive(self):
        positives = cells(1)
        pos, neg = split(add_negatives_one_one(positives, O1, O2, seed=3))
        assert len(pos) == 1 and len(neg) == 2
        positive = next(iter(pos))
        for n in neg:
            shared = (n.source == positive.source) + (n.target == positive.target)
            assert shared == 1

    def test_structural_check_on_fixture(self):
        positives = cells(5)
        keys = {(c.source, c.target) for c in positives}
        sources = {c.source for c in positives}
        targets = {c.target for c in positives}
        _, neg = split(add_negatives_one_one(positives, O1, O2, seed=3))
        for n in neg:
            assert (n.source, n.target) not in keys
            # one endpoint is taken from a positive, the corrupted one never recreates a key
            assert n.source in sources or n.target in targets
        assert len(neg) == 10

    def test_empty_positives(self):
        assert add_negatives_one_one(Alignment(), O1, O2, seed=3) == set()

    def test_deterministic(self):
        first = add_negatives_one_one(cells(4), O1, O2, seed=8)
        second = add_negatives_one_one(cells(4), O1, O2, seed=8)
        assert first == second
        assert first != add_negatives_one_one(cells(4), O1, O2, seed=9)

    def test_too_small_ontology(self):
        tiny2 = onto("right", ["RightThing0"])
        with pytest.raises(ValueError, match="distinct partner"):
            add_negatives_one_one(cells(1), O1, tiny2, seed=3)


class TestViaMatcher:
    def test_labels(self):
        ref = Alignment(
            [
                Correspondence(Iri("http://a#a"), Iri("http://b#x")),
                Correspondence(Iri("http://a#b"), Iri("http://b#w")),
            ]
        )
        candidates = Alignment(
            [
                Correspondence(Iri("http://a#a"), Iri("http://b#x"), confidence=0.9),  # in ref
                Correspondence(Iri("http://a#a"), Iri("http://b#z"), confidence=0.8),  # one endpoint
                Correspondence(Iri("http://a#q"), Iri("http://b#z"), confidence=0.7),  # neither
                Correspondence(Iri("http://a#a"), Iri("http://b#w"), confidence=0.6),  # both, not the cell
            ]
        )
        examples = add_negatives_via_matcher(candidates, ref)
        pos, neg = split(examples)
        assert pos == {Correspondence(Iri("http://a#a"), Iri("http://b#x"))}
        assert neg == {Correspondence(Iri("http://a#a"), Iri("http://b#z"))}

    def test_fixture_counts(self, conference_source, conference_target, conference_reference):
        candidates = high_recall_match(conference_source, conference_target)
        sampled = sample_reference(conference_reference, SamplingConfig(fraction=0.2, seed=11))
        examples = add_negatives_via_matcher(candidates, sampled)
        pos, neg = split(examples)
        assert pos == {c for c in candidates if c in sampled}
        known = sampled.elements()
        for n in neg:
            assert ((n.source in known) + (n.target in known)) == 1

    def test_no_example_carries_both_labels(self, conference_source, conference_target, conference_reference):
        candidates = high_recall_match(conference_source, conference_target)
        sampled = sample_reference(conference_reference, SamplingConfig(fraction=0.3, seed=5))
        examples = add_negatives_via_matcher(candidates, sampled)
        pos, neg = split(examples)
        assert not pos & neg
