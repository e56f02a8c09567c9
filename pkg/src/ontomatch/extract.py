"""Textual descriptions of resources.

Three extraction strategies over the same candidate pool, ordered from
most permissive to most aggressive containment filtering. All of them
return the original strings found in the ontology; normalization is only
used for deduplication and containment checks.
"""

from __future__ import annotations

import enum
import re
from typing import Iterator

from .rdf import BlankNode, Iri, Literal, Ontology, fragment

LABEL_LIKE_FRAGMENTS = frozenset(
    {"label", "name", "comment", "description", "abstract", "preflabel", "altlabel", "hiddenlabel"}
)
SHORT_TEXT_FRAGMENTS = frozenset({"label", "name", "preflabel", "altlabel", "hiddenlabel"})

_CAMEL_LOWER_UPPER = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_CAMEL_ACRONYM = re.compile(r"(?<=[A-Z])(?=[A-Z][a-z])")
_DIGIT_LETTER = re.compile(r"(?<=[0-9])(?=[A-Za-z])|(?<=[A-Za-z])(?=[0-9])")


class ExtractorKind(enum.Enum):
    SET = "set"
    SHORT_AND_LONG = "short-long"
    FOR_TRANSFORMERS = "transformers"


def normalize(s: str) -> str:
    """Case/boundary-insensitive comparison form.

    camelCase and digit/letter boundaries become spaces, every
    non-alphanumeric character becomes a space, the rest is lowercased,
    and whitespace is collapsed. Idempotent.
    """
    s = _CAMEL_LOWER_UPPER.sub(" ", s)
    s = _CAMEL_ACRONYM.sub(" ", s)
    s = _DIGIT_LETTER.sub(" ", s)
    s = s.lower()
    s = "".join(ch if ch.isalnum() else " " for ch in s)
    return " ".join(s.split())


class TextSet:
    """Insertion-ordered set of strings, duplicate-free by normalized form.

    Members whose normalized form is empty are rejected on insert.
    """

    def __init__(self, texts: Iterator[str] | list[str] = ()):
        self._texts: list[str] = []
        self._normalized: dict[str, int] = {}
        for t in texts:
            self.add(t)

    def add(self, text: str) -> bool:
        norm = normalize(text)
        if not norm or norm in self._normalized:
            return False
        self._normalized[norm] = len(self._texts)
        self._texts.append(text)
        return True

    @property
    def texts(self) -> tuple[str, ...]:
        return tuple(self._texts)

    @property
    def normalized(self) -> frozenset[str]:
        return frozenset(self._normalized)

    def __len__(self) -> int:
        return len(self._texts)

    def __iter__(self) -> Iterator[str]:
        return iter(self._texts)

    def __contains__(self, text: str) -> bool:
        return normalize(text) in self._normalized

    def __repr__(self) -> str:
        return f"TextSet({self._texts!r})"


def label_like(predicate: Iri, ontology: Ontology) -> bool:
    """Does this predicate attach human-readable text to its subject?

    True for fragments label/name/comment/description/abstract and the
    skos prefLabel/altLabel/hiddenLabel family (matched case-insensitively
    by fragment), plus every declared annotation property.
    """
    if fragment(predicate).lower() in LABEL_LIKE_FRAGMENTS:
        return True
    return predicate in ontology.annotation_properties


_SHORT = "short"
_LONG = "long"


def _predicate_group(predicate: Iri) -> str:
    return _SHORT if fragment(predicate).lower() in SHORT_TEXT_FRAGMENTS else _LONG


def _candidate_pool(ontology: Ontology, resource: Iri) -> list[tuple[str, str]]:
    """Ordered (text, group) pool shared by all extractors.

    Order: URI fragment, label-like literals, the longest literal on the
    resource, then label-like literals of resources reached through one
    level of annotation-property links.
    """
    pool: list[tuple[str, str]] = []
    frag = fragment(resource)
    norm_frag = normalize(frag)
    if norm_frag and not norm_frag.replace(" ", "").isdigit():
        pool.append((frag, _SHORT))

    triples = ontology.subject_triples(resource)
    for t in triples:
        if isinstance(t.object, Literal) and label_like(t.predicate, ontology):
            pool.append((t.object.lexical, _predicate_group(t.predicate)))

    longest: tuple[str, str] | None = None
    for t in triples:
        if isinstance(t.object, Literal):
            if longest is None or len(t.object.lexical) > len(longest[0]):
                longest = (t.object.lexical, _predicate_group(t.predicate))
    if longest is not None:
        pool.append(longest)

    annotation = ontology.annotation_properties
    for t in triples:
        if t.predicate in annotation and isinstance(t.object, (Iri, BlankNode)):
            for t2 in ontology.subject_triples(t.object):
                if isinstance(t2.object, Literal) and label_like(t2.predicate, ontology):
                    pool.append((t2.object.lexical, _LONG))
    return pool


def _dedup(pool: list[tuple[str, str]]) -> list[tuple[str, str, str]]:
    """Drop pool entries whose normalized form was already seen; the first
    occurrence keeps its group. Returns (text, group, normalized) rows."""
    seen: set[str] = set()
    out: list[tuple[str, str, str]] = []
    for text, group in pool:
        norm = normalize(text)
        if not norm or norm in seen:
            continue
        seen.add(norm)
        out.append((text, group, norm))
    return out


def _contained(inner: str, outer: str) -> bool:
    """Token-boundary containment of normalized strings: "cat" is inside
    "domestic cat" but not inside "category"."""
    return inner != outer and f" {inner} " in f" {outer} "


def extract_set(ontology: Ontology, resource: Iri) -> TextSet:
    """All candidate texts, deduplicated by normalized form only."""
    return TextSet(text for text, _, _ in _dedup(_candidate_pool(ontology, resource)))


def extract_short_and_long(ontology: Ontology, resource: Iri) -> TextSet:
    """Containment-filtered texts, with short (label-like) and long
    (comment-like) texts filtered independently so one of each survives."""
    rows = _dedup(_candidate_pool(ontology, resource))
    out = TextSet()
    for text, group, norm in rows:
        group_norms = [n for _, g, n in rows if g == group]
        if any(_contained(norm, other) for other in group_norms):
            continue
        out.add(text)
    return out


def extract_for_transformers(ontology: Ontology, resource: Iri) -> TextSet:
    """Most aggressive reduction: containment filtering across the whole
    pool, so a label that reappears inside a comment is dropped."""
    rows = _dedup(_candidate_pool(ontology, resource))
    all_norms = [norm for _, _, norm in rows]
    out = TextSet()
    for text, _, norm in rows:
        if any(_contained(norm, other) for other in all_norms):
            continue
        out.add(text)
    return out


_EXTRACTORS = {
    ExtractorKind.SET: extract_set,
    ExtractorKind.SHORT_AND_LONG: extract_short_and_long,
    ExtractorKind.FOR_TRANSFORMERS: extract_for_transformers,
}


def extract(kind: ExtractorKind, ontology: Ontology, resource: Iri) -> TextSet:
    return _EXTRACTORS[kind](ontology, resource)
