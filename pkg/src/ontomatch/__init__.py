"""Ontology matching toolkit.

Pipeline: token-overlap candidate generation, confidence scoring through
a pluggable pair scorer (built-in lexical, or a remote HTTP service),
threshold search and cut, and exact max-weight one-to-one extraction,
with OAEI-style evaluation and training-data generation around it.
"""

from .alignment import Alignment, Correspondence, Relation, is_one_to_one, merge
from .bridge import (
    ScorerEndpoint,
    SerializationMode,
    apply_scores,
    build_pairs,
    lexical_score,
    remote_score,
)
from .candidates import high_recall_match, tokenize
from .evaluation import ConfusionCounts, Metrics, confusion, macro_average, metrics, micro_average
from .extract import (
    ExtractorKind,
    TextSet,
    extract,
    extract_for_transformers,
    extract_set,
    extract_short_and_long,
    normalize,
)
from .filters import find_best_threshold, max_weight_bipartite, scoring_filter, threshold_cut
from .negatives import (
    Label,
    LabeledCorrespondence,
    SamplingConfig,
    add_negatives_one_one,
    add_negatives_random_absolute,
    add_negatives_random_share,
    add_negatives_via_matcher,
    sample_reference,
)
from .pipeline import FixedThreshold, PipelineConfig, SearchThreshold, run_match
from .rdf import BlankNode, Iri, Literal, Ontology, Triple, fragment, parse_ntriples, parse_turtle

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "BlankNode",
    "ConfusionCounts",
    "Correspondence",
    "ExtractorKind",
    "FixedThreshold",
    "Iri",
    "Label",
    "LabeledCorrespondence",
    "Literal",
    "Metrics",
    "Ontology",
    "PipelineConfig",
    "Relation",
    "SamplingConfig",
    "ScorerEndpoint",
    "SearchThreshold",
    "SerializationMode",
    "TextSet",
    "Triple",
    "add_negatives_one_one",
    "add_negatives_random_absolute",
    "add_negatives_random_share",
    "add_negatives_via_matcher",
    "apply_scores",
    "build_pairs",
    "confusion",
    "extract",
    "extract_for_transformers",
    "extract_set",
    "extract_short_and_long",
    "find_best_threshold",
    "fragment",
    "high_recall_match",
    "is_one_to_one",
    "lexical_score",
    "macro_average",
    "max_weight_bipartite",
    "merge",
    "metrics",
    "micro_average",
    "normalize",
    "parse_ntriples",
    "parse_turtle",
    "remote_score",
    "run_match",
    "sample_reference",
    "scoring_filter",
    "threshold_cut",
    "tokenize",
]
