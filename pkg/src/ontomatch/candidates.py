"""High-recall candidate generation via a token inverted index.

Every cross-ontology pair of resources sharing at least one non-trivial
token becomes a candidate, scored by Jaccard similarity of the two token
sets. The inverted index is an optimization only: the candidate set is
identical to a brute-force cross-product filter.
"""

from __future__ import annotations

from .alignment import Alignment, Correspondence
from .extract import ExtractorKind, extract, normalize
from .rdf import Iri, Ontology, OWL_NS, RDF_NS, RDFS_NS, SKOS_NS

# The 25 most common English words; all function words, none of them
# useful as a match signal.
STOPWORDS = frozenset(
    "the be to of and a in that have i it for not on with he as you do at this but his by from".split()
)

VOCABULARY_NAMESPACES = (RDF_NS, RDFS_NS, OWL_NS, SKOS_NS)


def tokenize(s: str) -> frozenset[str]:
    """Normalized tokens minus stopwords and single characters."""
    return frozenset(
        tok for tok in normalize(s).split() if len(tok) > 1 and tok not in STOPWORDS
    )


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a or not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def matchable_resources(ontology: Ontology) -> list[Iri]:
    """IRI subjects eligible as correspondence endpoints, in
    first-appearance order. Blank nodes and the rdf/rdfs/owl/skos
    vocabulary namespaces are excluded."""
    out = []
    for s in ontology.subjects():
        if isinstance(s, Iri) and not s.value.startswith(VOCABULARY_NAMESPACES):
            out.append(s)
    return out


def resource_tokens(ontology: Ontology, resource: Iri, extractor: ExtractorKind) -> frozenset[str]:
    """Union of the tokens of every extracted text of the resource."""
    tokens: set[str] = set()
    for text in extract(extractor, ontology, resource):
        tokens |= tokenize(text)
    return frozenset(tokens)


class TokenIndex:
    """Inverted index token -> resources whose texts contain the token."""

    def __init__(self, ontology: Ontology, extractor: ExtractorKind):
        self.tokens: dict[Iri, frozenset[str]] = {}
        self.by_token: dict[str, list[Iri]] = {}
        for resource in matchable_resources(ontology):
            toks = resource_tokens(ontology, resource, extractor)
            if not toks:
                continue
            self.tokens[resource] = toks
            for tok in sorted(toks):
                self.by_token.setdefault(tok, []).append(resource)

    def candidates(self, tokens: frozenset[str]) -> list[Iri]:
        """Resources sharing at least one token, first-hit order, no duplicates."""
        hit: dict[Iri, None] = {}
        for tok in sorted(tokens):
            for resource in self.by_token.get(tok, ()):
                hit.setdefault(resource, None)
        return list(hit)


def high_recall_match(o1: Ontology, o2: Ontology, extractor: ExtractorKind = ExtractorKind.SET) -> Alignment:
    """Candidate alignment: all pairs with overlapping token sets,
    confidence = Jaccard similarity of the token sets."""
    index = TokenIndex(o2, extractor)
    alignment = Alignment()
    for left in matchable_resources(o1):
        left_tokens = resource_tokens(o1, left, extractor)
        if not left_tokens:
            continue
        for right in index.candidates(left_tokens):
            alignment.add(
                Correspondence(left, right, confidence=jaccard(left_tokens, index.tokens[right]))
            )
    return alignment
