"""Sequence-pair classifier: hashed-token transformer encoder.

Words are lowercased, split on non-alphanumerics, and hashed (md5, so
stable across processes) into a fixed bucket vocabulary. A pair is
encoded as [CLS] left [SEP] right [SEP] with segment embeddings; the
classification head reads the CLS position. Pairs longer than the
maximum sequence length are truncated token by token from whichever
side is currently longer.

The encoder deliberately carries no positional encoding: textual
descriptions of ontology resources compare as token sets, and a
permutation-invariant encoder learns that relation far faster than one
that first has to unlearn word order.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import asdict, dataclass

import torch
from torch import nn

PAD_ID = 0
CLS_ID = 1
SEP_ID = 2
_RESERVED = 3

_SPLIT = re.compile(r"[^0-9a-z]+")


@dataclass(frozen=True)
class ModelConfig:
    vocab_buckets: int = 2048
    dim: int = 64
    heads: int = 4
    layers: int = 2
    feedforward: int = 128
    max_len: int = 64
    dropout: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        return cls(**data)


def tokenize(text: str) -> list[str]:
    return [t for t in _SPLIT.split(text.lower()) if t]


def token_ids(text: str, buckets: int) -> list[int]:
    ids = []
    for token in tokenize(text):
        digest = hashlib.md5(token.encode("utf-8")).digest()
        ids.append(_RESERVED + int.from_bytes(digest[:4], "big") % buckets)
    return ids


def encode_pair(left: str, right: str, config: ModelConfig) -> tuple[list[int], list[int], bool]:
    """Token ids and segment ids for one pair; the flag reports whether
    truncation was necessary."""
    a = token_ids(left, config.vocab_buckets)
    b = token_ids(right, config.vocab_buckets)
    budget = config.max_len - 3  # CLS + 2 SEP
    truncated = len(a) + len(b) > budget
    while len(a) + len(b) > budget:
        if len(a) >= len(b):
            a.pop()
        else:
            b.pop()
    ids = [CLS_ID] + a + [SEP_ID] + b + [SEP_ID]
    segments = [0] * (len(a) + 2) + [1] * (len(b) + 1)
    return ids, segments, truncated


def collate(encoded: list[tuple[list[int], list[int]]]) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Pad a batch to its longest sequence; returns ids, segments, pad mask."""
    width = max(len(ids) for ids, _ in encoded)
    ids = torch.full((len(encoded), width), PAD_ID, dtype=torch.long)
    segments = torch.zeros((len(encoded), width), dtype=torch.long)
    padding = torch.ones((len(encoded), width), dtype=torch.bool)
    for i, (row_ids, row_segments) in enumerate(encoded):
        n = len(row_ids)
        ids[i, :n] = torch.tensor(row_ids, dtype=torch.long)
        segments[i, :n] = torch.tensor(row_segments, dtype=torch.long)
        padding[i, :n] = False
    return ids, segments, padding


class PairClassifier(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        vocab = config.vocab_buckets + _RESERVED
        self.token_embedding = nn.Embedding(vocab, config.dim, padding_idx=PAD_ID)
        self.segment_embedding = nn.Embedding(2, config.dim)
        layer = nn.TransformerEncoderLayer(
            d_model=config.dim,
            nhead=config.heads,
            dim_feedforward=config.feedforward,
            dropout=config.dropout,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=config.layers)
        self.norm = nn.LayerNorm(config.dim)
        self.head = nn.Linear(config.dim, 2)

    def reinitialize_head(self, seed: int):
        """Fresh random weights for the classification layer only. Models
        are usually trained on generic objectives; the final linear layer
        starts from scratch, and its initialization seed matters."""
        generator = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            weight = torch.empty_like(self.head.weight)
            nn.init.normal_(weight, std=0.02, generator=generator)
            self.head.weight.copy_(weight)
            self.head.bias.zero_()

    def forward(self, ids: torch.Tensor, segments: torch.Tensor, padding: torch.Tensor) -> torch.Tensor:
        x = self.token_embedding(ids) + self.segment_embedding(segments)
        x = self.norm(x)
        x = self.encoder(x, src_key_padding_mask=padding)
        return self.head(x[:, 0])

    @torch.no_grad()
    def score_pairs(self, pairs: list[tuple[str, str]], batch_size: int = 64) -> tuple[list[float], int]:
        """Positive-class probability per pair, plus how many pairs were
        truncated to fit the maximum sequence length.

        Batches are formed over the deduplicated encodings in canonical
        order, so a pair's score depends only on its content, never on
        request order or batch neighbors (padding width changes the
        floating-point path otherwise)."""
        self.eval()
        truncated = 0
        keys: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        unique: dict[tuple[tuple[int, ...], tuple[int, ...]], float] = {}
        for left, right in pairs:
            ids, segments, was_truncated = encode_pair(left, right, self.config)
            truncated += was_truncated
            keys.append((tuple(ids), tuple(segments)))
            unique.setdefault(keys[-1], 0.0)
        ordered = sorted(unique, key=lambda k: (len(k[0]), k))
        for start in range(0, len(ordered), batch_size):
            chunk = ordered[start : start + batch_size]
            logits = self(*collate([(list(ids), list(segments)) for ids, segments in chunk]))
            for key, score in zip(chunk, torch.softmax(logits, dim=1)[:, 1].tolist()):
                unique[key] = score
        return [unique[key] for key in keys], truncated

    def clone(self) -> "PairClassifier":
        twin = PairClassifier(self.config)
        twin.load_state_dict({k: v.clone() for k, v in self.state_dict().items()})
        return twin
