"""Fine-tuning and model-selection objectives."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass

import torch
from torch import nn

from .model import PairClassifier, collate, encode_pair


@dataclass(frozen=True)
class TrainingDefaults:
    epochs: int = 3
    learning_rate: float = 5e-5


DEFAULTS = TrainingDefaults()


class Objective(enum.Enum):
    LOSS = "loss"
    ACCURACY = "accuracy"
    F1 = "f1"
    RECALL = "recall"
    PRECISION = "precision"
    AUC = "auc"


def auc(scores: list[float], labels: list[int]) -> float:
    """Rank-statistic AUC with average ranks on ties: the probability
    that a random positive outscores a random negative."""
    positives = sum(1 for y in labels if y == 1)
    negatives = len(labels) - positives
    if positives == 0 or negatives == 0:
        raise ValueError("AUC needs both classes present")
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        average_rank = (i + j) / 2 + 1  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = average_rank
        i = j + 1
    rank_sum = sum(r for r, y in zip(ranks, labels) if y == 1)
    u = rank_sum - positives * (positives + 1) / 2
    return u / (positives * negatives)


def evaluate_objective(objective: Objective, scores: list[float], labels: list[int]) -> float:
    if objective is Objective.AUC:
        return auc(scores, labels)
    if objective is Objective.LOSS:
        eps = 1e-7
        total = 0.0
        for s, y in zip(scores, labels):
            p = min(max(s, eps), 1 - eps)
            total += -math.log(p) if y == 1 else -math.log(1 - p)
        return total / len(scores)
    predicted = [1 if s >= 0.5 else 0 for s in scores]
    tp = sum(1 for p, y in zip(predicted, labels) if p == 1 and y == 1)
    fp = sum(1 for p, y in zip(predicted, labels) if p == 1 and y == 0)
    fn = sum(1 for p, y in zip(predicted, labels) if p == 0 and y == 1)
    if objective is Objective.ACCURACY:
        return sum(1 for p, y in zip(predicted, labels) if p == y) / len(labels)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if objective is Objective.PRECISION:
        return precision
    if objective is Objective.RECALL:
        return recall
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


def is_better(objective: Objective, candidate: float, incumbent: float | None) -> bool:
    if incumbent is None:
        return True
    if objective is Objective.LOSS:
        return candidate < incumbent
    return candidate > incumbent


def stratified_split(
    examples: list[tuple[str, str, int]], validation_fraction: float, seed: int
) -> tuple[list[tuple[str, str, int]], list[tuple[str, str, int]]]:
    """Label-stratified train/validation split, at least one validation
    example per class."""
    rng = random.Random(seed)
    train: list[tuple[str, str, int]] = []
    validation: list[tuple[str, str, int]] = []
    for label in (0, 1):
        group = [e for e in examples if e[2] == label]
        rng.shuffle(group)
        take = max(1, round(validation_fraction * len(group))) if group else 0
        validation.extend(group[:take])
        train.extend(group[take:])
    return train, validation


def _batches(n: int, batch_size: int):
    for start in range(0, n, batch_size):
        yield range(start, min(start + batch_size, n))


def train_epochs(
    model: PairClassifier,
    examples: list[tuple[str, str, int]],
    *,
    epochs: int,
    learning_rate: float,
    batch_size: int,
    seed: int,
    weight_decay: float = 0.0,
    optimizer: torch.optim.Optimizer | None = None,
) -> tuple[float, torch.optim.Optimizer]:
    """Train in place for the given epochs; returns the mean loss of the
    final epoch and the optimizer (so callers can continue training)."""
    torch.manual_seed(seed)
    torch.set_num_threads(1)
    encoded = [(encode_pair(left, right, model.config)[:2], label) for left, right, label in examples]
    if optimizer is None:
        optimizer = torch.optim.AdamW(model.parameters(), lr=learning_rate, weight_decay=weight_decay)
    else:
        for group in optimizer.param_groups:
            group["lr"] = learning_rate
            group["weight_decay"] = weight_decay
    loss_fn = nn.CrossEntropyLoss()
    order = list(range(len(encoded)))
    shuffle_rng = random.Random(seed)
    final_epoch_loss = 0.0
    model.train()
    for _ in range(epochs):
        shuffle_rng.shuffle(order)
        total = 0.0
        steps = 0
        for batch in _batches(len(order), batch_size):
            rows = [encoded[order[i]] for i in batch]
            ids, segments, padding = collate([pair for pair, _ in rows])
            labels = torch.tensor([label for _, label in rows], dtype=torch.long)
            optimizer.zero_grad()
            loss = loss_fn(model(ids, segments, padding), labels)
            loss.backward()
            optimizer.step()
            total += loss.item()
            steps += 1
        final_epoch_loss = total / max(steps, 1)
    return final_epoch_loss, optimizer


def finetune(
    base: PairClassifier,
    examples: list[tuple[str, str, int]],
    *,
    epochs: int = DEFAULTS.epochs,
    learning_rate: float = DEFAULTS.learning_rate,
    batch_size: int = 16,
    seed: int = 1,
    reinit_head: bool = False,
) -> tuple[PairClassifier, float]:
    """Train a copy of the base model on labeled pairs.

    The base model already carries a trained pair-classification head,
    so fine-tuning continues from it by default; set reinit_head to
    restart the head from a seed-determined initialization instead. The
    seed also fixes the shuffling order. Deterministic for a fixed seed
    within one environment. Returns the trained model and the final
    epoch's mean training loss.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    labels = {label for _, _, label in examples}
    if labels != {0, 1}:
        raise ValueError("training data must contain both labels")
    model = base.clone()
    if reinit_head:
        model.reinitialize_head(seed)
    loss, _ = train_epochs(
        model, examples, epochs=epochs, learning_rate=learning_rate, batch_size=batch_size, seed=seed
    )
    return model, loss


def score_examples(model: PairClassifier, examples: list[tuple[str, str, int]]) -> tuple[list[float], list[int]]:
    scores, _ = model.score_pairs([(left, right) for left, right, _ in examples])
    return scores, [label for _, _, label in examples]
