"""Alignment evaluation: confusion counts, P/R/F1, micro and macro
aggregation, and track loading.

Confidences are ignored here; system and reference cells compare by
(source, target, relation) key only.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .alignment import Alignment, AlignmentFormatError, parse_alignment_xml
from .rdf import Ontology, ParseError, parse_ntriples, parse_turtle


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "Metrics":
        denominator = precision + recall
        f1 = 2 * precision * recall / denominator if denominator > 0 else 0.0
        return cls(precision, recall, f1)

    @classmethod
    def from_counts(cls, c: ConfusionCounts) -> "Metrics":
        precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
        recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
        return cls.from_pr(precision, recall)


def confusion(system: Alignment, reference: Alignment) -> ConfusionCounts:
    """Counts against a reference treated as complete."""
    system_keys = system.keys()
    reference_keys = reference.keys()
    tp = len(system_keys & reference_keys)
    return ConfusionCounts(tp, len(system_keys) - tp, len(reference_keys) - tp)


def metrics(c: ConfusionCounts) -> Metrics:
    return Metrics.from_counts(c)


def micro_average(results: list[ConfusionCounts]) -> Metrics:
    """Sum the counts across test cases, then compute the metrics once."""
    if not results:
        raise ValueError("micro average of an empty result list")
    total = ConfusionCounts()
    for c in results:
        total = total + c
    return metrics(total)


def macro_average(results: list[Metrics]) -> Metrics:
    """Unweighted mean of per-test-case precision, recall, and F1.

    F1 is averaged directly, not recomputed from the averaged precision
    and recall.
    """
    if not results:
        raise ValueError("macro average of an empty result list")
    n = len(results)
    return Metrics(
        sum(m.precision for m in results) / n,
        sum(m.recall for m in results) / n,
        sum(m.f1 for m in results) / n,
    )


@dataclass(frozen=True)
class TestCase:
    name: str
    source_path: Path
    target_path: Path
    reference_path: Path

    def load_source(self) -> Ontology:
        return _load_ontology(self.source_path)

    def load_target(self) -> Ontology:
        return _load_ontology(self.target_path)

    def load_reference(self) -> Alignment:
        return parse_alignment_xml(self.reference_path.read_bytes())


@dataclass(frozen=True)
class Track:
    name: str
    test_cases: tuple[TestCase, ...]

    def __iter__(self):
        return iter(self.test_cases)

    def __len__(self):
        return len(self.test_cases)


def _load_ontology(path: Path) -> Ontology:
    data = path.read_bytes()
    if path.suffix == ".nt":
        return parse_ntriples(data)
    return parse_turtle(data)


def _find_ontology_file(directory: Path, stem: str) -> Path | None:
    for suffix in (".ttl", ".nt"):
        candidate = directory / f"{stem}{suffix}"
        if candidate.is_file():
            return candidate
    return None


def load_track(directory: Path | str) -> tuple[Track, list[str]]:
    """Discover test cases under ``<track>/<testcase>/{source.ttl,
    target.ttl, reference.xml}``.

    Returns the track plus a list of per-test-case problems (missing
    files, references that do not parse); broken test cases are left out
    of the track.
    """
    directory = Path(directory)
    cases: list[TestCase] = []
    errors: list[str] = []
    for sub in sorted(p for p in directory.iterdir() if p.is_dir()):
        source = _find_ontology_file(sub, "source")
        target = _find_ontology_file(sub, "target")
        reference = sub / "reference.xml"
        missing = [
            name
            for name, path in (("source", source), ("target", target), ("reference.xml", reference if reference.is_file() else None))
            if path is None
        ]
        if missing:
            errors.append(f"{sub.name}: missing {', '.join(missing)}")
            continue
        case = TestCase(sub.name, source, target, reference)
        try:
            case.load_reference()
        except (AlignmentFormatError, ParseError, OSError) as exc:
            errors.append(f"{sub.name}: reference does not parse: {exc}")
            continue
        cases.append(case)
    return Track(directory.name, tuple(cases)), errors


@dataclass(frozen=True)
class TestCaseResult:
    name: str
    counts: ConfusionCounts
    metrics: Metrics


def evaluate_track(
    track: Track, system_alignments: dict[str, Alignment], aggregation: str = "micro"
) -> tuple[list[TestCaseResult], Metrics]:
    """Score one system alignment per test case against its reference.

    Test cases without a system alignment count as (0, 0, |reference|).
    aggregation is "micro" or "macro".
    """
    if aggregation not in ("micro", "macro"):
        raise ValueError(f"unknown aggregation {aggregation!r}")
    results: list[TestCaseResult] = []
    for case in track:
        reference = case.load_reference()
        system = system_alignments.get(case.name)
        if system is None:
            counts = ConfusionCounts(0, 0, len(reference))
        else:
            counts = confusion(system, reference)
        results.append(TestCaseResult(case.name, counts, metrics(counts)))
    if aggregation == "micro":
        aggregate = micro_average([r.counts for r in results])
    else:
        aggregate = macro_average([r.metrics for r in results])
    return results, aggregate
