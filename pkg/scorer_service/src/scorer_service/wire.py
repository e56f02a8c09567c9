"""CSV wire formats of the scoring protocol, service side.

Requests carry ``pair_id,text_left,text_right`` rows, responses carry
``pair_id,score``, training data carries ``text_left,text_right,label``
with label in {0,1}. RFC 4180, UTF-8.
"""

from __future__ import annotations

import csv
import io

PAIR_HEADER = ["pair_id", "text_left", "text_right"]
SCORE_HEADER = ["pair_id", "score"]
TRAINING_HEADER = ["text_left", "text_right", "label"]


class WireFormatError(ValueError):
    pass


def _read(data: bytes | str, header: list[str]) -> list[list[str]]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WireFormatError(f"invalid UTF-8: {exc.reason}") from None
    rows = list(csv.reader(io.StringIO(data, newline="")))
    if not rows or rows[0] != header:
        raise WireFormatError(f"expected header {','.join(header)}")
    body = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise WireFormatError(f"row {i}: expected {len(header)} fields, found {len(row)}")
        body.append(row)
    return body


def read_pairs_csv(data: bytes | str) -> list[tuple[str, str, str]]:
    return [tuple(row) for row in _read(data, PAIR_HEADER)]


def read_training_csv(data: bytes | str) -> list[tuple[str, str, int]]:
    out = []
    for left, right, label in _read(data, TRAINING_HEADER):
        if label not in ("0", "1"):
            raise WireFormatError(f"label must be 0 or 1, found {label!r}")
        out.append((left, right, int(label)))
    return out


def write_scores_csv(scores: list[tuple[str, float]]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(SCORE_HEADER)
    writer.writerows((pair_id, repr(score)) for pair_id, score in scores)
    return buf.getvalue().encode("utf-8")
