"""Synthetic paraphrase corpus and base-model pretraining.

There is no model hub in this environment, so the served "pretrained"
model is produced here: a seeded training run on generated paraphrase
data (positives are reworded variants of the same sentence, negatives
are unrelated sentences). The run is deterministic, so every
environment derives the same base behavior from the same seed.
"""

from __future__ import annotations

import random

from .model import ModelConfig, PairClassifier
from .training import train_epochs

_WORDS = (
    "system network model data graph node edge label text word token "
    "match pair score filter index search train test value weight "
    "paper review author committee member session chair talk poster "
    "student fee dinner break travel award city venue music guitar "
    "piano animal cat dog bird fish tree river stone cloud light "
    "table chair window door engine wheel signal wire board card "
    "garden bridge tower market street harbor forest meadow valley hill"
).split()

PRETRAIN_SEED = 7


def _sentence(rng: random.Random, minimum: int = 2) -> list[str]:
    return rng.sample(_WORDS, rng.randrange(minimum, 9))


def _paraphrase(words: list[str], rng: random.Random) -> list[str]:
    variant = words[:]
    rng.shuffle(variant)
    roll = rng.random()
    if roll < 0.2:
        return words[:]  # exact repetition
    if roll < 0.5:
        variant.insert(rng.randrange(len(variant) + 1), rng.choice(_WORDS))
    elif len(variant) > 2:
        variant.pop()
    return variant


def paraphrase_pairs(count: int, seed: int) -> list[tuple[str, str, int]]:
    """Balanced labeled pairs, `count` of each class, deterministic per seed.

    Positives are reworded/contained variants of one sentence (including
    short two-word labels); negatives are unrelated sentences, a third of
    them hard cases sharing exactly one word with the left side.
    """
    rng = random.Random(seed)
    examples: list[tuple[str, str, int]] = []
    for _ in range(count):
        words = _sentence(rng)
        examples.append((" ".join(words), " ".join(_paraphrase(words, rng)), 1))
    for _ in range(count):
        left = _sentence(rng)
        right = _sentence(rng)
        if rng.random() < 0.5:
            # hard negative: exactly one word of the left side leaks through,
            # frequently in a short right side as label-like texts are
            limit = rng.randrange(1, 4) if rng.random() < 0.5 else max(1, len(right) - 1)
            right = [w for w in right if w not in left][:limit]
            right.insert(rng.randrange(len(right) + 1), rng.choice(left))
        examples.append((" ".join(left), " ".join(right), 0))
    rng.shuffle(examples)
    return examples


def pretrain_base(config: ModelConfig | None = None, seed: int = PRETRAIN_SEED) -> PairClassifier:
    """Train the base pair classifier from scratch on synthetic
    paraphrase data. Takes under a minute on one CPU thread; the result
    is cached by the model store, so it normally runs once per store."""
    config = config or ModelConfig()
    import torch

    torch.manual_seed(seed)
    model = PairClassifier(config)
    examples = paraphrase_pairs(3000, seed)
    train_epochs(
        model,
        examples,
        epochs=16,
        learning_rate=1e-3,
        batch_size=32,
        seed=seed,
    )
    return model
