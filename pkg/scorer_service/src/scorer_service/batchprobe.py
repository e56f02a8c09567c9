"""Maximal-batch-size probe.

Tries one training step at batch size 4 and keeps doubling while the
step survives, so only powers of two are considered. The resulting
search space is every power of two from 4 up to the probed maximum,
capped at 64.
"""

from __future__ import annotations

from typing import Callable

import torch
from torch import nn

from .model import PairClassifier, collate, encode_pair

BATCH_CAP = 64


def _default_try_step(model: PairClassifier, sample: tuple[str, str, int], batch_size: int):
    probe = model.clone()
    left, right, label = sample
    ids, segments, _ = encode_pair(left, right, probe.config)
    batch = collate([(ids, segments)] * batch_size)
    labels = torch.full((batch_size,), label, dtype=torch.long)
    optimizer = torch.optim.AdamW(probe.parameters(), lr=1e-5)
    probe.train()
    optimizer.zero_grad()
    loss = nn.CrossEntropyLoss()(probe(*batch), labels)
    loss.backward()
    optimizer.step()


def _is_out_of_memory(exc: BaseException) -> bool:
    return isinstance(exc, MemoryError) or (
        isinstance(exc, RuntimeError) and "out of memory" in str(exc).lower()
    )


def probe_batch_size(
    model: PairClassifier,
    sample: tuple[str, str, int],
    try_step: Callable[[PairClassifier, tuple[str, str, int], int], None] | None = None,
) -> int:
    """Largest power of two >= 4 that trains one step without exhausting
    memory, capped at 64. Raises if even batch size 4 fails."""
    try_step = try_step or _default_try_step
    size = 4
    try:
        try_step(model, sample, size)
    except BaseException as exc:  # noqa: BLE001 - memory failures vary by backend
        if _is_out_of_memory(exc):
            raise RuntimeError("even batch size 4 does not fit in memory") from exc
        raise
    while size < BATCH_CAP:
        try:
            try_step(model, sample, size * 2)
        except BaseException as exc:  # noqa: BLE001
            if _is_out_of_memory(exc):
                return size
            raise
        size *= 2
    return size


def batch_size_space(maximum: int) -> list[int]:
    return [b for b in (4, 8, 16, 32, 64) if b <= maximum]
