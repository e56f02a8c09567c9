"""Correspondences, alignments, and the alignment XML interchange format."""

from __future__ import annotations

import enum
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable, Iterator
from xml.sax.saxutils import escape, quoteattr

from .rdf import Iri

_RDF_RESOURCE = "{http://www.w3.org/1999/02/22-rdf-syntax-ns#}resource"


class AlignmentFormatError(ValueError):
    pass


class Relation(enum.Enum):
    EQUIVALENCE = "="


@dataclass(frozen=True)
class Correspondence:
    """A scored pair of entities. Identity is (source, target, relation);
    confidence is an attribute, not part of identity."""

    source: Iri
    target: Iri
    relation: Relation = Relation.EQUIVALENCE
    confidence: float = field(default=1.0, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def key(self) -> tuple[Iri, Iri, Relation]:
        return (self.source, self.target, self.relation)

    def with_confidence(self, confidence: float) -> "Correspondence":
        return Correspondence(self.source, self.target, self.relation, confidence)


CellKey = tuple[Iri, Iri, Relation]


class Alignment:
    """A set of correspondences keyed by (source, target, relation).

    Re-adding an existing key replaces the stored confidence
    (last-write-wins), so filters can rewrite confidences in place.
    """

    def __init__(self, cells: Iterable[Correspondence] = ()):
        self._cells: dict[CellKey, Correspondence] = {}
        for c in cells:
            self.add(c)

    def add(self, cell: Correspondence):
        self._cells[cell.key] = cell

    def get(self, source: Iri, target: Iri, relation: Relation = Relation.EQUIVALENCE) -> Correspondence | None:
        return self._cells.get((source, target, relation))

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self) -> Iterator[Correspondence]:
        return iter(self._cells.values())

    def __contains__(self, item) -> bool:
        if isinstance(item, Correspondence):
            return item.key in self._cells
        return item in self._cells

    def __eq__(self, other) -> bool:
        if not isinstance(other, Alignment):
            return NotImplemented
        if self._cells.keys() != other._cells.keys():
            return False
        return all(other._cells[k].confidence == c.confidence for k, c in self._cells.items())

    def keys(self) -> set[CellKey]:
        return set(self._cells)

    def sources(self) -> set[Iri]:
        return {c.source for c in self}

    def targets(self) -> set[Iri]:
        return {c.target for c in self}

    def elements(self) -> set[Iri]:
        """Every IRI appearing as a source or target of any cell."""
        return self.sources() | self.targets()

    def sorted_cells(self) -> list[Correspondence]:
        return sorted(self, key=lambda c: (c.source.value, c.target.value))

    def __repr__(self) -> str:
        return f"Alignment({len(self)} cells)"


def merge(a: Alignment, b: Alignment) -> Alignment:
    """Union by cell key; on collision the confidence from b wins."""
    out = Alignment(a)
    for cell in b:
        out.add(cell)
    return out


def is_one_to_one(a: Alignment) -> bool:
    """True iff no source and no target participates in two cells."""
    seen_sources: set[Iri] = set()
    seen_targets: set[Iri] = set()
    for c in a:
        if c.source in seen_sources or c.target in seen_targets:
            return False
        seen_sources.add(c.source)
        seen_targets.add(c.target)
    return True


def _local_tag(element: ET.Element) -> str:
    tag = element.tag
    return tag.rsplit("}", 1)[1] if "}" in tag else tag


def _resource_attribute(element: ET.Element) -> str | None:
    value = element.get(_RDF_RESOURCE)
    if value is not None:
        return value
    for name, val in element.attrib.items():
        if name.rsplit("}", 1)[-1] == "resource":
            return val
    return None


def parse_alignment_xml(data: bytes | str) -> Alignment:
    """Parse the alignment XML subset: one Correspondence per Cell.

    A missing measure defaults to 1.0. Raises AlignmentFormatError on
    malformed XML, measures outside [0, 1], or relations other than "=".
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise AlignmentFormatError(f"malformed XML: {exc}") from None
    alignment = Alignment()
    for cell in root.iter():
        if _local_tag(cell) != "Cell":
            continue
        entity1 = entity2 = None
        relation_text = None
        measure_text = None
        for child in cell:
            tag = _local_tag(child)
            if tag == "entity1":
                entity1 = _resource_attribute(child)
            elif tag == "entity2":
                entity2 = _resource_attribute(child)
            elif tag == "relation":
                relation_text = (child.text or "").strip()
            elif tag == "measure":
                measure_text = (child.text or "").strip()
        if entity1 is None or entity2 is None:
            raise AlignmentFormatError("Cell without entity1/entity2 rdf:resource")
        if relation_text is not None and relation_text != "=":
            raise AlignmentFormatError(f"unsupported relation {relation_text!r}")
        if measure_text is None or measure_text == "":
            confidence = 1.0
        else:
            try:
                confidence = float(measure_text)
            except ValueError:
                raise AlignmentFormatError(f"non-numeric measure {measure_text!r}") from None
            if not 0.0 <= confidence <= 1.0:
                raise AlignmentFormatError(f"measure {confidence} outside [0, 1]")
        alignment.add(Correspondence(Iri(entity1), Iri(entity2), Relation.EQUIVALENCE, confidence))
    return alignment


def serialize_alignment_xml(a: Alignment) -> bytes:
    """Deterministic alignment XML: cells sorted by (source, target),
    measures printed with full round-trip precision."""
    lines = [
        '<?xml version="1.0" encoding="utf-8"?>',
        '<rdf:RDF xmlns="http://knowledgeweb.semanticweb.org/heterogeneity/alignment"',
        '         xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"',
        '         xmlns:xsd="http://www.w3.org/2001/XMLSchema#">',
        "<Alignment>",
        "<xml>yes</xml>",
        "<level>0</level>",
        "<type>11</type>",
    ]
    for cell in a.sorted_cells():
        lines.extend(
            [
                "<map><Cell>",
                f"  <entity1 rdf:resource={quoteattr(cell.source.value)}/>",
                f"  <entity2 rdf:resource={quoteattr(cell.target.value)}/>",
                f"  <relation>{escape(cell.relation.value)}</relation>",
                f'  <measure rdf:datatype="xsd:float">{cell.confidence!r}</measure>',
                "</Cell></map>",
            ]
        )
    lines.extend(["</Alignment>", "</rdf:RDF>", ""])
    return "\n".join(lines).encode("utf-8")
