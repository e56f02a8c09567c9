"""Alignment post-processing filters.

A filter never adds correspondences: it rewrites confidences (scoring
filter), removes cells below a threshold, or extracts the best
one-to-one sub-alignment. Threshold search works against complete
references and against incomplete ones sampled from a partial gold
standard.
"""

from __future__ import annotations

from dataclasses import dataclass

from .alignment import Alignment, Correspondence
from .bipartite import max_weight_matching
from .bridge import Scorer, SerializationMode, apply_scores, build_pairs
from .evaluation import ConfusionCounts, Metrics, metrics
from .extract import ExtractorKind
from .rdf import Ontology


@dataclass(frozen=True)
class ThresholdSearchResult:
    threshold: float
    achieved_metric: float
    metric_kind: str = "F1"


def scoring_filter(
    a: Alignment,
    o1: Ontology,
    o2: Ontology,
    extractor: ExtractorKind,
    mode: SerializationMode,
    scorer: Scorer,
) -> Alignment:
    """Rewrite every confidence with the scorer's verdict on the pair's
    textual descriptions. The key set never changes."""
    records, _ = build_pairs(a, o1, o2, extractor, mode)
    scores = scorer(records)
    return apply_scores(a, records, scores)


def _incomplete_counts(kept: list[Correspondence], cut: list[Correspondence], reference: Alignment) -> ConfusionCounts:
    """Counting for a reference known to be incomplete.

    Only cells with at least one endpoint in the reference are decidable:
    a kept cell is a TP when the reference contains it and an FP when
    exactly one endpoint occurs anywhere in the reference; a cut cell is
    an FN only when the reference contains it. Everything else is
    ignored.
    """
    known = reference.elements()
    tp = fp = fn = 0
    for cell in kept:
        if cell in reference:
            tp += 1
        elif (cell.source in known) + (cell.target in known) == 1:
            fp += 1
    for cell in cut:
        if cell in reference:
            fn += 1
    return ConfusionCounts(tp, fp, fn)


def evaluate_threshold(a: Alignment, reference: Alignment, threshold: float, complete: bool = True) -> Metrics:
    """Metrics of {c in a : conf(c) >= t} against the reference, under
    complete or incomplete counting."""
    kept = [c for c in a if c.confidence >= threshold]
    if complete:
        kept_keys = {c.key for c in kept}
        tp = sum(1 for c in reference if c.key in kept_keys)
        counts = ConfusionCounts(tp, len(kept) - tp, len(reference) - tp)
    else:
        cut = [c for c in a if c.confidence < threshold]
        counts = _incomplete_counts(kept, cut, reference)
    return metrics(counts)


def find_best_threshold(a: Alignment, reference: Alignment, complete: bool = True) -> ThresholdSearchResult:
    """Best F1 threshold over all observed confidences plus zero.

    Ties break toward the larger threshold (the stronger filter). The
    reference may be incomplete; set complete=False to restrict counting
    to decidable cells.
    """
    if len(reference) == 0:
        raise ValueError("threshold search needs a non-empty reference")
    candidates = sorted({c.confidence for c in a} | {0.0}, reverse=True)
    best: ThresholdSearchResult | None = None
    for t in candidates:
        m = evaluate_threshold(a, reference, t, complete)
        if best is None or m.f1 > best.achieved_metric:
            best = ThresholdSearchResult(t, m.f1)
    assert best is not None
    return best


def threshold_cut(a: Alignment, threshold: float) -> Alignment:
    """Keep the cells with confidence >= threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold {threshold} outside [0, 1]")
    return Alignment(c for c in a if c.confidence >= threshold)


def max_weight_bipartite(a: Alignment) -> Alignment:
    """One-to-one sub-alignment of maximum total confidence (exact)."""
    chosen = max_weight_matching([(c.source, c.target, c.confidence) for c in a])
    keep = set(chosen)
    return Alignment(c for c in a if (c.source, c.target) in keep)
