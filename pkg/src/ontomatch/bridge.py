"""The scorer boundary: text-pair records, CSV wire formats, scorers.

An alignment turns into scoreable records (one per text combination, or
one per correspondence with concatenated texts), crosses the boundary as
RFC 4180 CSV, and the returned scores are applied as confidences.
Scorers are callables from records to scores; the built-in lexical
scorer keeps the toolkit self-sufficient, the remote scorer talks to a
pair-scoring HTTP service.

Wire protocol of a scoring service:
  GET  /health  -> 200, body "ok"
  POST /score   -> request body ``pair_id,text_left,text_right`` CSV
                   (text/csv; charset=utf-8), response ``pair_id,score``
                   CSV; 400 on malformed CSV, 503 while no model is loaded.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import ceil, isfinite
from typing import Callable, Iterable, Sequence

import requests

from .alignment import Alignment, Correspondence
from .candidates import jaccard, tokenize
from .extract import ExtractorKind, extract
from .negatives import Label, LabeledCorrespondence
from .rdf import Iri, Ontology
import enum

log = logging.getLogger(__name__)

PAIR_HEADER = ["pair_id", "text_left", "text_right"]
SCORE_HEADER = ["pair_id", "score"]
TRAINING_HEADER = ["text_left", "text_right", "label"]


class CsvFormatError(ValueError):
    pass


class ScorerProtocolError(RuntimeError):
    pass


class SerializationMode(enum.Enum):
    MULTI_TEXT = "multi"
    SINGLE_TEXT = "single"


@dataclass(frozen=True)
class TextPairRecord:
    pair_id: str
    source: Iri
    target: Iri
    left: str
    right: str


@dataclass(frozen=True)
class ScoreRecord:
    pair_id: str
    score: float

    def __post_init__(self):
        if not (isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise ValueError(f"score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class ScorerEndpoint:
    base_url: str
    timeout: float = 120.0
    batch_size: int = 1000
    max_in_flight: int = 1

    def url(self, path: str) -> str:
        return self.base_url.rstrip("/") + path


Scorer = Callable[[Sequence[TextPairRecord]], list[ScoreRecord]]


def build_pairs(
    a: Alignment,
    o1: Ontology,
    o2: Ontology,
    extractor: ExtractorKind = ExtractorKind.SET,
    mode: SerializationMode = SerializationMode.MULTI_TEXT,
) -> tuple[list[TextPairRecord], list[Correspondence]]:
    """Scoreable records for every correspondence, in deterministic order.

    MULTI_TEXT emits one record per (left text x right text) combination;
    SINGLE_TEXT emits one record per correspondence with each side's texts
    joined by single spaces. Correspondences with an empty text set on
    either side are skipped and returned alongside the records.
    """
    records: list[TextPairRecord] = []
    skipped: list[Correspondence] = []
    texts_cache: dict[tuple[int, Iri], tuple[str, ...]] = {}

    def texts_of(ontology: Ontology, side: int, resource: Iri) -> tuple[str, ...]:
        key = (side, resource)
        if key not in texts_cache:
            texts_cache[key] = extract(extractor, ontology, resource).texts
        return texts_cache[key]

    n = 0
    for cell in a.sorted_cells():
        left_texts = texts_of(o1, 1, cell.source)
        right_texts = texts_of(o2, 2, cell.target)
        if not left_texts or not right_texts:
            skipped.append(cell)
            continue
        if mode is SerializationMode.SINGLE_TEXT:
            records.append(
                TextPairRecord(f"p{n}", cell.source, cell.target, " ".join(left_texts), " ".join(right_texts))
            )
            n += 1
        else:
            for lt in left_texts:
                for rt in right_texts:
                    records.append(TextPairRecord(f"p{n}", cell.source, cell.target, lt, rt))
                    n += 1
    if skipped:
        log.warning("%d correspondences skipped for lack of textual description", len(skipped))
    return records, skipped


def _write_rows(header: list[str], rows: Iterable[Sequence[str]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _read_rows(data: bytes | str, header: list[str]) -> list[list[str]]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CsvFormatError(f"invalid UTF-8: {exc.reason}") from None
    reader = csv.reader(io.StringIO(data, newline=""))
    rows = [row for row in reader]
    if not rows:
        raise CsvFormatError(f"missing header row, expected {','.join(header)}")
    if rows[0] != header:
        raise CsvFormatError(f"bad header {rows[0]!r}, expected {header!r}")
    body = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"row {i}: expected {len(header)} fields, found {len(row)}")
        body.append(row)
    return body


def write_pairs_csv(records: Sequence[TextPairRecord]) -> bytes:
    return _write_rows(PAIR_HEADER, ((r.pair_id, r.left, r.right) for r in records))


def read_pairs_csv(data: bytes | str) -> list[tuple[str, str, str]]:
    """Rows of a request CSV as (pair_id, text_left, text_right)."""
    return [tuple(row) for row in _read_rows(data, PAIR_HEADER)]


def write_scores_csv(scores: Sequence[ScoreRecord]) -> bytes:
    return _write_rows(SCORE_HEADER, ((s.pair_id, repr(s.score)) for s in scores))


def read_scores_csv(data: bytes | str) -> list[ScoreRecord]:
    """Parse a response CSV; scores must be finite numbers in [0, 1]."""
    out = []
    for pair_id, text in _read_rows(data, SCORE_HEADER):
        try:
            value = float(text)
        except ValueError:
            raise CsvFormatError(f"non-numeric score {text!r} for {pair_id!r}") from None
        if not (isfinite(value) and 0.0 <= value <= 1.0):
            raise CsvFormatError(f"score {value} for {pair_id!r} outside [0, 1]")
        out.append(ScoreRecord(pair_id, value))
    return out


def write_training_csv(
    examples: Iterable[LabeledCorrespondence],
    o1: Ontology,
    o2: Ontology,
    extractor: ExtractorKind = ExtractorKind.SET,
) -> tuple[bytes, list[Correspondence]]:
    """Labeled examples as ``text_left,text_right,label`` CSV (label 1/0).

    Each side is the single-text serialization of the endpoint's texts.
    Examples without text on either side are skipped and returned.
    """
    rows: list[tuple[str, str, str]] = []
    skipped: list[Correspondence] = []
    ordered = sorted(
        examples,
        key=lambda ex: (ex.correspondence.source.value, ex.correspondence.target.value, ex.label.value),
    )
    for ex in ordered:
        cell = ex.correspondence
        left = " ".join(extract(extractor, o1, cell.source).texts)
        right = " ".join(extract(extractor, o2, cell.target).texts)
        if not left or not right:
            skipped.append(cell)
            continue
        rows.append((left, right, str(ex.label.value)))
    return _write_rows(TRAINING_HEADER, rows), skipped


def read_training_csv(data: bytes | str) -> list[tuple[str, str, int]]:
    out = []
    for left, right, label in _read_rows(data, TRAINING_HEADER):
        if label not in ("0", "1"):
            raise CsvFormatError(f"label must be 0 or 1, found {label!r}")
        out.append((left, right, int(label)))
    return out


def apply_scores(
    a: Alignment, records: Sequence[TextPairRecord], scores: Sequence[ScoreRecord]
) -> Alignment:
    """Rewrite confidences from scores: each correspondence takes the
    maximum score over its records. Cells without any scored record keep
    their prior confidence. Never adds or removes correspondences."""
    key_by_pair = {r.pair_id: (r.source, r.target) for r in records}
    best: dict[tuple[Iri, Iri], float] = {}
    for s in scores:
        key = key_by_pair.get(s.pair_id)
        if key is None:
            log.warning("score for unknown pair_id %r ignored", s.pair_id)
            continue
        if key not in best or s.score > best[key]:
            best[key] = s.score
    out = Alignment()
    unscored = 0
    for cell in a:
        score = best.get((cell.source, cell.target))
        if score is None:
            unscored += 1
            out.add(cell)
        else:
            out.add(cell.with_confidence(score))
    if unscored:
        log.warning("%d correspondences kept their prior confidence (no scored record)", unscored)
    return out


def lexical_score(records: Sequence[TextPairRecord]) -> list[ScoreRecord]:
    """Token-overlap scorer: Jaccard similarity of the two token sets."""
    return [ScoreRecord(r.pair_id, jaccard(tokenize(r.left), tokenize(r.right))) for r in records]


def _post_batch(endpoint: ScorerEndpoint, batch: Sequence[TextPairRecord]) -> list[ScoreRecord]:
    try:
        response = requests.post(
            endpoint.url("/score"),
            data=write_pairs_csv(batch),
            headers={"Content-Type": "text/csv; charset=utf-8"},
            timeout=endpoint.timeout,
        )
    except requests.RequestException as exc:
        raise ScorerProtocolError(f"scoring request failed: {exc}") from None
    if response.status_code != 200:
        raise ScorerProtocolError(f"/score returned status {response.status_code}: {response.text[:200]}")
    try:
        return read_scores_csv(response.content)
    except CsvFormatError as exc:
        raise ScorerProtocolError(f"malformed score response: {exc}") from None


def check_health(endpoint: ScorerEndpoint):
    try:
        response = requests.get(endpoint.url("/health"), timeout=endpoint.timeout)
    except requests.RequestException as exc:
        raise ScorerProtocolError(f"health check failed: {exc}") from None
    if response.status_code != 200 or response.text.strip() != "ok":
        raise ScorerProtocolError(
            f"unhealthy endpoint: status {response.status_code}, body {response.text[:80]!r}"
        )


def remote_score(endpoint: ScorerEndpoint, records: Sequence[TextPairRecord]) -> list[ScoreRecord]:
    """Score records against a remote service in batches.

    Every request pair_id must be answered exactly once across all
    batches; duplicates and missing ids are protocol errors. Batches may
    be sent concurrently (endpoint.max_in_flight); results are
    deterministic regardless of response order because scores are keyed
    by pair_id.
    """
    if not records:
        return []
    check_health(endpoint)
    batches = [
        records[i * endpoint.batch_size : (i + 1) * endpoint.batch_size]
        for i in range(ceil(len(records) / endpoint.batch_size))
    ]
    if endpoint.max_in_flight > 1:
        with ThreadPoolExecutor(max_workers=endpoint.max_in_flight) as pool:
            results = list(pool.map(lambda b: _post_batch(endpoint, b), batches))
    else:
        results = [_post_batch(endpoint, b) for b in batches]
    by_id: dict[str, ScoreRecord] = {}
    for batch_scores in results:
        for s in batch_scores:
            if s.pair_id in by_id:
                raise ScorerProtocolError(f"pair_id {s.pair_id!r} answered more than once")
            by_id[s.pair_id] = s
    missing = [r.pair_id for r in records if r.pair_id not in by_id]
    if missing:
        raise ScorerProtocolError(f"{len(missing)} pair_ids unanswered: {missing[:10]}")
    return [by_id[r.pair_id] for r in records]


def request_finetune(
    endpoint: ScorerEndpoint,
    training_csv: bytes,
    *,
    epochs: int | None = None,
    learning_rate: float | None = None,
    seed: int | None = None,
    batch_size: int | None = None,
) -> dict:
    """Send a ``text_left,text_right,label`` CSV to the service's
    /finetune route. All hyperparameters are optional query parameters;
    the service falls back to its training defaults. Returns the JSON
    body, a dict with the final training ``loss`` and the served
    ``model_id``."""
    params = {
        name: value
        for name, value in (
            ("epochs", epochs),
            ("learning_rate", learning_rate),
            ("seed", seed),
            ("batch_size", batch_size),
        )
        if value is not None
    }
    try:
        response = requests.post(
            endpoint.url("/finetune"),
            data=training_csv,
            params=params,
            headers={"Content-Type": "text/csv; charset=utf-8"},
            timeout=endpoint.timeout,
        )
    except requests.RequestException as exc:
        raise ScorerProtocolError(f"finetune request failed: {exc}") from None
    if response.status_code != 200:
        raise ScorerProtocolError(f"/finetune returned status {response.status_code}: {response.text[:200]}")
    try:
        payload = response.json()
    except ValueError:
        raise ScorerProtocolError("finetune response is not JSON") from None
    if "loss" not in payload or "model_id" not in payload:
        raise ScorerProtocolError(f"finetune response lacks loss/model_id: {payload!r}")
    return payload


def verify_endpoint(endpoint: ScorerEndpoint) -> list[str]:
    """Protocol conformance probe; returns a list of problems (empty = conforms).

    Checks the health route, the echo shape of /score on a tiny batch
    (every request id answered exactly once, scores inside [0, 1]), the
    empty-request edge case, and the 400 response to malformed CSV.
    """
    problems: list[str] = []
    try:
        check_health(endpoint)
    except ScorerProtocolError as exc:
        return [str(exc)]

    probe = [
        TextPairRecord("probe-a", Iri("urn:probe:1"), Iri("urn:probe:2"), "first sample text", "first sample text"),
        TextPairRecord("probe-b", Iri("urn:probe:3"), Iri("urn:probe:4"), "second, with \"quotes\"", "unrelated\nmultiline"),
    ]
    try:
        scores = remote_score(ScorerEndpoint(endpoint.base_url, endpoint.timeout, batch_size=1), probe)
        if [s.pair_id for s in scores] != [r.pair_id for r in probe]:
            problems.append("response ids do not match request ids")
    except ScorerProtocolError as exc:
        problems.append(f"/score round-trip failed: {exc}")

    try:
        empty = _post_batch(endpoint, [])
        if empty:
            problems.append("header-only request must yield a header-only response")
    except ScorerProtocolError as exc:
        problems.append(f"empty request failed: {exc}")

    try:
        response = requests.post(
            endpoint.url("/score"),
            data=b"this is not a csv header",
            headers={"Content-Type": "text/csv; charset=utf-8"},
            timeout=endpoint.timeout,
        )
        if response.status_code != 400:
            problems.append(f"malformed CSV must yield 400, got {response.status_code}")
    except requests.RequestException as exc:
        problems.append(f"malformed-CSV probe failed: {exc}")
    return problems
