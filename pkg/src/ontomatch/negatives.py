"""Training-set construction: reference sampling and negative generation.

All generators take an explicit seed and are deterministic for a fixed
seed. Counts derived from fractions round half up.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

from .alignment import Alignment, Correspondence
from .candidates import matchable_resources
from .rdf import Iri, Ontology


class Label(enum.Enum):
    POSITIVE = 1
    NEGATIVE = 0


@dataclass(frozen=True)
class LabeledCorrespondence:
    correspondence: Correspondence
    label: Label


@dataclass(frozen=True)
class SamplingConfig:
    fraction: float = 1.0
    seed: int = 0
    absolute_count: int | None = None

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction {self.fraction} outside (0, 1]")
        if self.absolute_count is not None and self.absolute_count < 0:
            raise ValueError("absolute_count must be non-negative")


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def sample_reference(reference: Alignment, cfg: SamplingConfig) -> Alignment:
    """Uniform random subset of the reference, at least one cell.

    absolute_count, when set, overrides the fraction-derived size (clamped
    to the reference size).
    """
    if len(reference) == 0:
        raise ValueError("cannot sample from an empty reference")
    cells = reference.sorted_cells()
    if cfg.absolute_count is not None:
        size = min(cfg.absolute_count, len(cells))
    else:
        size = max(1, min(len(cells), round_half_up(cfg.fraction * len(cells))))
    rng = random.Random(cfg.seed)
    return Alignment(rng.sample(cells, size))


def _element_pools(o1: Ontology, o2: Ontology) -> tuple[list[Iri], list[Iri]]:
    return (
        sorted(matchable_resources(o1), key=lambda r: r.value),
        sorted(matchable_resources(o2), key=lambda r: r.value),
    )


def _positives(alignment: Alignment) -> list[LabeledCorrespondence]:
    return [LabeledCorrespondence(c, Label.POSITIVE) for c in alignment.sorted_cells()]


def add_negatives_random_absolute(
    positives: Alignment, o1: Ontology, o2: Ontology, count: int, seed: int = 0
) -> set[LabeledCorrespondence]:
    """Positives plus exactly `count` random negatives.

    Negatives are uniform over (e1 in o1, e2 in o2) pairs that are not
    positive keys, without duplicates. Raises ValueError when fewer than
    `count` distinct non-positive pairs exist.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    pool1, pool2 = _element_pools(o1, o2)
    positive_keys = {(c.source, c.target) for c in positives}
    set1, set2 = set(pool1), set(pool2)
    blocked = sum(1 for s, t in positive_keys if s in set1 and t in set2)
    available = len(pool1) * len(pool2) - blocked
    if count > available:
        raise ValueError(f"requested {count} negatives but only {available} distinct non-positive pairs exist")
    rng = random.Random(seed)
    out = set(_positives(positives))
    chosen: set[tuple[Iri, Iri]] = set()
    # rejection sampling; fall back to full enumeration when the pair space is tight
    if count > available // 2:
        pairs = [(s, t) for s in pool1 for t in pool2 if (s, t) not in positive_keys]
        picked = rng.sample(pairs, count)
        for s, t in picked:
            out.add(LabeledCorrespondence(Correspondence(s, t), Label.NEGATIVE))
        return out
    while len(chosen) < count:
        pair = (rng.choice(pool1), rng.choice(pool2))
        if pair in positive_keys or pair in chosen:
            continue
        chosen.add(pair)
        out.add(LabeledCorrespondence(Correspondence(*pair), Label.NEGATIVE))
    return out


def add_negatives_random_share(
    positives: Alignment, o1: Ontology, o2: Ontology, share: float, seed: int = 0
) -> set[LabeledCorrespondence]:
    """Like the absolute variant with count = round(share * |positives|)."""
    if share < 0:
        raise ValueError("share must be non-negative")
    return add_negatives_random_absolute(positives, o1, o2, round_half_up(share * len(positives)), seed)


def add_negatives_one_one(
    positives: Alignment, o1: Ontology, o2: Ontology, seed: int = 0
) -> set[LabeledCorrespondence]:
    """Two negatives per positive under the one-to-one assumption: corrupt
    the target once and the source once, never colliding with a positive key."""
    pool1, pool2 = _element_pools(o1, o2)
    positive_keys = {(c.source, c.target) for c in positives}
    rng = random.Random(seed)
    out = set(_positives(positives))
    for cell in positives.sorted_cells():
        targets = [t for t in pool2 if t != cell.target and (cell.source, t) not in positive_keys]
        sources = [s for s in pool1 if s != cell.source and (s, cell.target) not in positive_keys]
        if not targets or not sources:
            raise ValueError(f"no distinct partner available to corrupt {cell.source.value}")
        out.add(LabeledCorrespondence(Correspondence(cell.source, rng.choice(targets)), Label.NEGATIVE))
        out.add(LabeledCorrespondence(Correspondence(rng.choice(sources), cell.target), Label.NEGATIVE))
    return out


def add_negatives_via_matcher(
    candidates: Alignment, sampled_reference: Alignment
) -> set[LabeledCorrespondence]:
    """Label candidates against a (possibly incomplete) reference.

    A candidate is POSITIVE when the full correspondence is in the
    reference and NEGATIVE when exactly one of its endpoints occurs
    anywhere in the reference; candidates touching the reference not at
    all are undecidable and excluded from the training data.
    """
    known = sampled_reference.elements()
    out: set[LabeledCorrespondence] = set()
    for cell in candidates.sorted_cells():
        if cell in sampled_reference:
            out.add(LabeledCorrespondence(cell, Label.POSITIVE))
            continue
        endpoints_known = (cell.source in known) + (cell.target in known)
        if endpoints_known == 1:
            out.add(LabeledCorrespondence(cell, Label.NEGATIVE))
    return out
