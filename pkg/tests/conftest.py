import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ontomatch.alignment import Alignment, parse_alignment_xml
from ontomatch.rdf import Iri, Literal, Ontology, Triple, parse_turtle

FIXTURES = Path(__file__).parent / "fixtures"
TRACK_DIR = FIXTURES / "track"
CONFERENCE = TRACK_DIR / "conference"


def iri(value: str) -> Iri:
    return Iri(value if ":" in value else f"http://test.example/x#{value}")


def triple(s: str, p: str, o) -> Triple:
    obj = o if isinstance(o, (Iri, Literal)) else (o if not isinstance(o, str) else iri(o))
    return Triple(iri(s), iri(p), obj)


def lit(lexical: str, lang=None, datatype=None) -> Literal:
    return Literal(lexical, lang, datatype)


@pytest.fixture(scope="session")
def conference_source() -> Ontology:
    return parse_turtle((CONFERENCE / "source.ttl").read_bytes())


@pytest.fixture(scope="session")
def conference_target() -> Ontology:
    return parse_turtle((CONFERENCE / "target.ttl").read_bytes())


@pytest.fixture(scope="session")
def conference_reference() -> Alignment:
    return parse_alignment_xml((CONFERENCE / "reference.xml").read_bytes())
