"""RDF term model plus N-Triples and Turtle-subset parsers.

The parsers cover what the toolkit's fixtures and ingested tracks need:
N-Triples, and a Turtle subset with @prefix, ``a``, predicate lists (;),
object lists (,), language tags, typed literals, and blank-node property
lists. Parsing is deterministic: the same bytes always yield the same
triple set and the same blank-node ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
SKOS_NS = "http://www.w3.org/2004/02/skos/core#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"


class ParseError(ValueError):
    """Syntax or encoding error, attributed to a line (and column if known)."""

    def __init__(self, message: str, line: int, column: int | None = None):
        self.line = line
        self.column = column
        at = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{at}: {message}")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("IRI must be non-empty")
        if ":" not in self.value:
            raise ValueError(f"not an absolute IRI (no scheme separator): {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    id: str

    def __str__(self) -> str:
        return f"_:{self.id}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    lang: str | None = None
    datatype: Iri | None = None

    def __post_init__(self):
        if self.lang is not None and self.datatype is not None:
            raise ValueError("literal cannot carry both a language tag and a datatype")

    def __str__(self) -> str:
        return self.lexical


Term = Union[Iri, BlankNode, Literal]
Subject = Union[Iri, BlankNode]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term


RDF_TYPE = Iri(RDF_NS + "type")
OWL_ANNOTATION_PROPERTY = Iri(OWL_NS + "AnnotationProperty")


def fragment(iri: Iri) -> str:
    """Local part of an IRI: after the last '#', else after the last '/', else the whole IRI.

    The scheme colon is not a separator, so e.g. ``urn:x`` returns itself.
    """
    value = iri.value
    if "#" in value:
        return value.rsplit("#", 1)[1]
    if "/" in value:
        return value.rsplit("/", 1)[1]
    return value


class Ontology:
    """Immutable, indexed triple set.

    Duplicate statements are collapsed; both indexes cover every triple.
    Safe to share between any number of concurrent readers once built.
    """

    def __init__(self, triples: Iterable[Triple] = ()):
        seen: set[Triple] = set()
        ordered: list[Triple] = []
        for t in triples:
            if t not in seen:
                seen.add(t)
                ordered.append(t)
        self._triples: tuple[Triple, ...] = tuple(ordered)
        by_subject: dict[Subject, list[Triple]] = {}
        by_predicate: dict[Iri, list[Triple]] = {}
        for t in self._triples:
            by_subject.setdefault(t.subject, []).append(t)
            by_predicate.setdefault(t.predicate, []).append(t)
        self._by_subject = {s: tuple(ts) for s, ts in by_subject.items()}
        self._by_predicate = {p: tuple(ts) for p, ts in by_predicate.items()}
        self._annotation_properties = frozenset(
            t.subject
            for t in self._by_predicate.get(RDF_TYPE, ())
            if t.object == OWL_ANNOTATION_PROPERTY and isinstance(t.subject, Iri)
        )

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    @property
    def annotation_properties(self) -> frozenset[Iri]:
        """All subjects declared rdf:type owl:AnnotationProperty."""
        return self._annotation_properties

    def subject_triples(self, subject: Subject) -> tuple[Triple, ...]:
        return self._by_subject.get(subject, ())

    def predicate_triples(self, predicate: Iri) -> tuple[Triple, ...]:
        return self._by_predicate.get(predicate, ())

    def subjects(self) -> Iterator[Subject]:
        """Distinct subjects in first-appearance order."""
        return iter(self._by_subject)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._by_subject.get(triple.subject, ())


def annotation_properties(ontology: Ontology) -> frozenset[Iri]:
    return ontology.annotation_properties


# --- shared string machinery ------------------------------------------------

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8: {exc.reason}", line=1) from None
    return data


def _unescape(raw: str, line: int, column: int) -> str:
    if "\\" not in raw:
        return raw
    out: list[str] = []
    i = 0
    n = len(raw)
    while i < n:
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= n:
            raise ParseError("dangling escape at end of string", line, column + i)
        esc = raw[i + 1]
        if esc in _ECHAR:
            out.append(_ECHAR[esc])
            i += 2
        elif esc == "u" or esc == "U":
            width = 4 if esc == "u" else 8
            hexpart = raw[i + 2 : i + 2 + width]
            if len(hexpart) < width:
                raise ParseError(f"truncated \\{esc} escape", line, column + i)
            try:
                out.append(chr(int(hexpart, 16)))
            except ValueError:
                raise ParseError(f"bad \\{esc} escape: {hexpart!r}", line, column + i) from None
            i += 2 + width
        else:
            raise ParseError(f"unknown escape \\{esc}", line, column + i)
    return "".join(out)


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


# --- N-Triples ---------------------------------------------------------------


class _LineScanner:
    """Cursor over one N-Triples statement line."""

    def __init__(self, text: str, lineno: int):
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.lineno, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def read_iri(self) -> Iri:
        self.expect("<")
        end = self.text.find(">", self.pos)
        if end == -1:
            raise self.error("unterminated IRI")
        raw = self.text[self.pos : end]
        value = _unescape(raw, self.lineno, self.pos + 1)
        self.pos = end + 1
        try:
            return Iri(value)
        except ValueError as exc:
            raise self.error(str(exc)) from None

    def read_blank(self) -> BlankNode:
        self.expect("_")
        self.expect(":")
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] in "_-"):
            self.pos += 1
        if self.pos == start:
            raise self.error("empty blank node label")
        return BlankNode(self.text[start : self.pos])

    def read_literal(self) -> Literal:
        self.expect('"')
        # find the closing unescaped quote
        i = self.pos
        while True:
            i = self.text.find('"', i)
            if i == -1:
                raise self.error("unterminated literal")
            backslashes = 0
            j = i - 1
            while j >= 0 and self.text[j] == "\\":
                backslashes += 1
                j -= 1
            if backslashes % 2 == 0:
                break
            i += 1
        lexical = _unescape(self.text[self.pos : i], self.lineno, self.pos + 1)
        self.pos = i + 1
        if self.peek() == "@":
            self.pos += 1
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "-"):
                self.pos += 1
            if self.pos == start:
                raise self.error("empty language tag")
            return Literal(lexical, lang=self.text[start : self.pos])
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            return Literal(lexical, datatype=self.read_iri())
        return Literal(lexical)

    def read_term(self) -> Term:
        ch = self.peek()
        if ch == "<":
            return self.read_iri()
        if ch == "_":
            return self.read_blank()
        if ch == '"':
            return self.read_literal()
        raise self.error(f"unexpected character {ch!r}")


def parse_ntriples(data: bytes | str) -> Ontology:
    """Parse UTF-8 N-Triples into an Ontology, one statement per line.

    Blank node labels are preserved as document-scoped ids. Duplicate
    statements collapse to one triple. Raises ParseError with the
    offending line number.
    """
    text = _decode(data)
    triples: list[Triple] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        scanner = _LineScanner(line, lineno)
        subject = scanner.read_term()
        if isinstance(subject, Literal):
            raise ParseError("literal is not a valid subject", lineno, 1)
        scanner.skip_ws()
        if scanner.peek() != "<":
            raise scanner.error("predicate must be an IRI")
        predicate = scanner.read_iri()
        scanner.skip_ws()
        obj = scanner.read_term()
        scanner.skip_ws()
        scanner.expect(".")
        scanner.skip_ws()
        if not scanner.at_end() and not scanner.text[scanner.pos :].startswith("#"):
            raise scanner.error("trailing content after '.'")
        triples.append(Triple(subject, predicate, obj))
    return Ontology(triples)


# --- Turtle subset -----------------------------------------------------------

_PN_LOCAL_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.%")


class _TurtleParser:
    """Recursive-descent parser for the supported Turtle subset.

    Supported: @prefix, prefixed names, <iri>, `a`, ';' predicate lists,
    ',' object lists, quoted literals with @lang or ^^datatype, labeled
    blank nodes, and [ ... ] blank-node property lists. Anonymous blank
    nodes get deterministic ids genid0, genid1, ... in encounter order.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []
        self._anon = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.text):
                if self.text[self.pos] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in " \t\r\n":
                self._advance()
            elif ch == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def expect(self, ch: str):
        self.skip_ws()
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}, found {self.peek()!r}")
        self._advance()

    def parse(self) -> Ontology:
        while not self.at_end():
            if self.text.startswith("@prefix", self.pos):
                self._parse_prefix()
            else:
                self._parse_triples()
                self.expect(".")
        return Ontology(self.triples)

    def _parse_prefix(self):
        self._advance(len("@prefix"))
        self.skip_ws()
        start = self.pos
        while self.peek() not in (":", "") and not self.peek().isspace():
            self._advance()
        name = self.text[start : self.pos]
        self.expect(":")
        self.skip_ws()
        iri = self._parse_iriref()
        self.prefixes[name] = iri.value
        self.expect(".")

    def _parse_iriref(self) -> Iri:
        if self.peek() != "<":
            raise self.error("expected '<'")
        line, col = self.line, self.col
        self._advance()
        start = self.pos
        while self.peek() not in (">", ""):
            if self.peek() == "\n":
                raise self.error("newline inside IRI")
            self._advance()
        if self.peek() != ">":
            raise ParseError("unterminated IRI", line, col)
        raw = self.text[start : self.pos]
        self._advance()
        try:
            return Iri(_unescape(raw, line, col))
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from None

    def _parse_prefixed_name(self) -> Iri:
        line, col = self.line, self.col
        start = self.pos
        while self.peek() not in (":", "") and (self.peek().isalnum() or self.peek() in "_-"):
            self._advance()
        prefix = self.text[start : self.pos]
        if self.peek() != ":":
            raise ParseError(f"expected prefixed name, found {prefix!r}", line, col)
        self._advance()
        start = self.pos
        while self.peek() in _PN_LOCAL_CHARS:
            self._advance()
        local = self.text[start : self.pos]
        # a trailing dot belongs to the statement terminator, not the name
        while local.endswith("."):
            local = local[:-1]
            self.pos -= 1
            self.col -= 1
        if prefix not in self.prefixes:
            raise ParseError(f"unknown prefix {prefix!r}", line, col)
        return Iri(self.prefixes[prefix] + local)

    def _parse_blank_label(self) -> BlankNode:
        self._advance(2)  # "_:"
        start = self.pos
        while self.peek().isalnum() or self.peek() in "_-":
            self._advance()
        label = self.text[start : self.pos]
        if not label:
            raise self.error("empty blank node label")
        return BlankNode(label)

    def _parse_literal(self) -> Literal:
        line, col = self.line, self.col
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            ch = self.peek()
            if ch == "":
                raise ParseError("unterminated literal", line, col)
            if ch == "\\":
                nxt = self.text[self.pos + 1 : self.pos + 2]
                if nxt in _ECHAR:
                    out.append(_ECHAR[nxt])
                    self._advance(2)
                elif nxt in ("u", "U"):
                    width = 4 if nxt == "u" else 8
                    hexpart = self.text[self.pos + 2 : self.pos + 2 + width]
                    if len(hexpart) < width:
                        raise self.error(f"truncated \\{nxt} escape")
                    try:
                        out.append(chr(int(hexpart, 16)))
                    except ValueError:
                        raise self.error(f"bad \\{nxt} escape") from None
                    self._advance(2 + width)
                else:
                    raise self.error(f"unknown escape \\{nxt}")
                continue
            if ch == '"':
                self._advance()
                break
            out.append(ch)
            self._advance()
        lexical = "".join(out)
        if self.peek() == "@":
            self._advance()
            start = self.pos
            while self.peek().isalnum() or self.peek() == "-":
                self._advance()
            tag = self.text[start : self.pos]
            if not tag:
                raise self.error("empty language tag")
            return Literal(lexical, lang=tag)
        if self.text.startswith("^^", self.pos):
            self._advance(2)
            self.skip_ws()
            return Literal(lexical, datatype=self._parse_iri())
        return Literal(lexical)

    def _parse_iri(self) -> Iri:
        if self.peek() == "<":
            return self._parse_iriref()
        return self._parse_prefixed_name()

    def _fresh_blank(self) -> BlankNode:
        node = BlankNode(f"genid{self._anon}")
        self._anon += 1
        return node

    def _parse_property_list_node(self) -> BlankNode:
        self.expect("[")
        node = self._fresh_blank()
        self.skip_ws()
        if self.peek() != "]":
            self._parse_predicate_object_list(node)
        self.expect("]")
        return node

    def _parse_subject(self) -> Subject:
        self.skip_ws()
        ch = self.peek()
        if ch == "[":
            return self._parse_property_list_node()
        if ch == "_" and self.text.startswith("_:", self.pos):
            return self._parse_blank_label()
        return self._parse_iri()

    def _parse_verb(self) -> Iri:
        self.skip_ws()
        if self.peek() == "a":
            after = self.text[self.pos + 1 : self.pos + 2]
            if after == "" or after.isspace() or after in "<[\"_":
                self._advance()
                return RDF_TYPE
        return self._parse_iri()

    def _parse_object(self) -> Term:
        self.skip_ws()
        ch = self.peek()
        if ch == '"':
            return self._parse_literal()
        if ch == "[":
            return self._parse_property_list_node()
        if ch == "_" and self.text.startswith("_:", self.pos):
            return self._parse_blank_label()
        if ch == "":
            raise self.error("expected object")
        return self._parse_iri()

    def _parse_predicate_object_list(self, subject: Subject):
        while True:
            predicate = self._parse_verb()
            while True:
                obj = self._parse_object()
                self.triples.append(Triple(subject, predicate, obj))
                self.skip_ws()
                if self.peek() == ",":
                    self._advance()
                    continue
                break
            self.skip_ws()
            if self.peek() == ";":
                while self.peek() == ";":
                    self._advance()
                    self.skip_ws()
                # ';' may trail directly before the statement end
                if self.peek() in (".", "]", ""):
                    return
                continue
            return

    def _parse_triples(self):
        self.skip_ws()
        if self.peek() == "[":
            subject = self._parse_property_list_node()
            self.skip_ws()
            # a bare [ ... ] statement needs no further predicate-object list
            if self.peek() == ".":
                return
            self._parse_predicate_object_list(subject)
            return
        subject = self._parse_subject()
        self._parse_predicate_object_list(subject)


def parse_turtle(data: bytes | str) -> Ontology:
    """Parse the supported Turtle subset into an Ontology.

    Raises ParseError with line and column for syntax errors and for
    prefixed names whose prefix was never declared.
    """
    return _TurtleParser(_decode(data)).parse()


def serialize_ntriples(ontology: Ontology) -> bytes:
    """Canonical N-Triples rendering: one sorted statement per line.

    The output is also valid Turtle, so parse_turtle(serialize(o)) and
    parse_ntriples(serialize(o)) both reproduce the triple set.
    """

    def term(t: Term) -> str:
        if isinstance(t, Iri):
            return f"<{t.value}>"
        if isinstance(t, BlankNode):
            return f"_:{t.id}"
        body = f'"{_escape_literal(t.lexical)}"'
        if t.lang is not None:
            return f"{body}@{t.lang}"
        if t.datatype is not None:
            return f"{body}^^<{t.datatype.value}>"
        return body

    lines = sorted(f"{term(t.subject)} {term(t.predicate)} {term(t.object)} ." for t in ontology)
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")
