"""The four-stage match pipeline and its run report.

Stages: token-overlap candidate generation, confidence rewriting by the
configured scorer, threshold cut (fixed or searched on a sampled
reference), and optional one-to-one extraction. Every stage's output is
a subset of the candidate key set, so sizes fall monotonically through
the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

from .alignment import Alignment
from .bridge import Scorer, ScorerEndpoint, SerializationMode, lexical_score, remote_score
from .candidates import high_recall_match
from .extract import ExtractorKind
from .filters import find_best_threshold, max_weight_bipartite, scoring_filter, threshold_cut
from .negatives import SamplingConfig, sample_reference
from .rdf import Ontology


@dataclass(frozen=True)
class FixedThreshold:
    value: float


@dataclass(frozen=True)
class SearchThreshold:
    fraction: float = 1.0
    seed: int = 0
    incomplete: bool = True


@dataclass(frozen=True)
class PipelineConfig:
    extractor: ExtractorKind = ExtractorKind.SET
    mode: SerializationMode = SerializationMode.MULTI_TEXT
    scorer: str = "lexical"  # "lexical" or "remote"
    endpoint: ScorerEndpoint | None = None
    threshold: FixedThreshold | SearchThreshold = FixedThreshold(0.0)
    one_to_one: bool = True
    seed: int = 42

    def make_scorer(self) -> Scorer:
        if self.scorer == "lexical":
            return lexical_score
        if self.scorer == "remote":
            if self.endpoint is None:
                raise ValueError("remote scorer needs an endpoint")
            return partial(remote_score, self.endpoint)
        raise ValueError(f"unknown scorer {self.scorer!r}")


@dataclass
class MatchResult:
    alignment: Alignment
    stages: list[tuple[str, int]] = field(default_factory=list)
    threshold: float = 0.0
    training_f1: float | None = None
    candidates: Alignment | None = None


def run_match(
    o1: Ontology, o2: Ontology, config: PipelineConfig, reference: Alignment | None = None
) -> MatchResult:
    """Run the full pipeline on a pair of ontologies.

    A reference is required (and only consulted) when the threshold is
    searched; the search sees the sampled subset, never the full gold
    standard.
    """
    candidates = high_recall_match(o1, o2, config.extractor)
    result = MatchResult(alignment=candidates, candidates=candidates)
    result.stages.append(("candidates", len(candidates)))

    scored = scoring_filter(candidates, o1, o2, config.extractor, config.mode, config.make_scorer())
    result.stages.append(("scored", len(scored)))

    if isinstance(config.threshold, SearchThreshold):
        if reference is None:
            raise ValueError("threshold search requires a reference alignment")
        sampled = sample_reference(
            reference, SamplingConfig(config.threshold.fraction, config.threshold.seed)
        )
        search = find_best_threshold(scored, sampled, complete=not config.threshold.incomplete)
        result.threshold = search.threshold
        result.training_f1 = search.achieved_metric
    else:
        result.threshold = config.threshold.value
    after_cut = threshold_cut(scored, result.threshold)
    result.stages.append(("threshold", len(after_cut)))

    final = max_weight_bipartite(after_cut) if config.one_to_one else after_cut
    if config.one_to_one:
        result.stages.append(("one_to_one", len(final)))
    result.alignment = final
    return result
