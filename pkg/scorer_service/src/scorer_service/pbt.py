"""Population-based hyperparameter search.

A population of trials trains in lockstep, one epoch at a time. After
every epoch each trial is evaluated on the validation split; the bottom
quartile replaces its weights with a copy of a top-quartile trial
(exploit) and perturbs its learning rate, batch size, and weight decay
(explore: multiplied or divided by 1.2, or resampled from the search
space with probability 0.25). Trials keep their individually sampled
epoch budget, and a copied trial continues training the copied weights
for its own remaining epochs. The best checkpoint ever observed is
returned, so the best objective in the log never decreases.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .batchprobe import BATCH_CAP, batch_size_space
from .model import PairClassifier
from .training import Objective, evaluate_objective, is_better, score_examples, train_epochs

RESAMPLE_PROBABILITY = 0.25
PERTURBATION_FACTOR = 1.2


@dataclass(frozen=True)
class HyperparameterSpace:
    learning_rate_bounds: tuple[float, float] = (1e-6, 1e-4)
    epoch_choices: tuple[int, ...] = (1, 2, 3, 4, 5)
    seed_bounds: tuple[int, int] = (1, 40)
    max_batch_size: int = BATCH_CAP
    weight_decay_bounds: tuple[float, float] = (0.0, 0.3)

    @property
    def batch_sizes(self) -> list[int]:
        return batch_size_space(self.max_batch_size)

    def sample_learning_rate(self, rng: random.Random) -> float:
        low, high = self.learning_rate_bounds
        return math.exp(rng.uniform(math.log(low), math.log(high)))

    def sample(self, rng: random.Random) -> dict:
        return {
            "learning_rate": self.sample_learning_rate(rng),
            "epochs": rng.choice(self.epoch_choices),
            "seed": rng.randint(*self.seed_bounds),
            "batch_size": rng.choice(self.batch_sizes),
            "weight_decay": 0.0,
        }

    def contains(self, params: dict) -> bool:
        low, high = self.learning_rate_bounds
        wd_low, wd_high = self.weight_decay_bounds
        return (
            low <= params["learning_rate"] <= high
            and params["epochs"] in self.epoch_choices
            and self.seed_bounds[0] <= params["seed"] <= self.seed_bounds[1]
            and params["batch_size"] in self.batch_sizes
            and wd_low <= params["weight_decay"] <= wd_high
        )


@dataclass
class _Trial:
    index: int
    params: dict
    model: PairClassifier
    optimizer: object | None = None
    objective_value: float | None = None
    trained_epochs: int = 0

    @property
    def budget(self) -> int:
        return self.params["epochs"]


@dataclass
class PbtResult:
    best_model: PairClassifier
    best_objective: float
    best_trial: int
    log: list[dict] = field(default_factory=list)


def _perturb(trial: _Trial, space: HyperparameterSpace, rng: random.Random) -> list[dict]:
    events = []
    params = trial.params
    low, high = space.learning_rate_bounds
    if rng.random() < RESAMPLE_PROBABILITY:
        params["learning_rate"] = space.sample_learning_rate(rng)
        events.append({"kind": "explore", "trial": trial.index, "param": "learning_rate", "how": "resample"})
    else:
        factor = PERTURBATION_FACTOR if rng.random() < 0.5 else 1 / PERTURBATION_FACTOR
        params["learning_rate"] = min(high, max(low, params["learning_rate"] * factor))
        events.append({"kind": "explore", "trial": trial.index, "param": "learning_rate", "how": f"x{factor:.3f}"})

    sizes = space.batch_sizes
    old_batch = params["batch_size"]
    if rng.random() < RESAMPLE_PROBABILITY:
        params["batch_size"] = rng.choice(sizes)
        events.append({"kind": "explore", "trial": trial.index, "param": "batch_size", "how": "resample"})
    else:
        at = sizes.index(params["batch_size"])
        at = min(len(sizes) - 1, at + 1) if rng.random() < 0.5 else max(0, at - 1)
        params["batch_size"] = sizes[at]
        events.append({"kind": "explore", "trial": trial.index, "param": "batch_size", "how": "step"})
    if params["batch_size"] != old_batch:
        # optimizer moments are scale-bound to the old batch size
        trial.optimizer = None
        events.append({"kind": "optimizer_reset", "trial": trial.index, "reason": "batch_size change"})

    wd_low, wd_high = space.weight_decay_bounds
    if rng.random() < RESAMPLE_PROBABILITY:
        params["weight_decay"] = rng.uniform(wd_low, wd_high)
        events.append({"kind": "explore", "trial": trial.index, "param": "weight_decay", "how": "resample"})
    else:
        factor = PERTURBATION_FACTOR if rng.random() < 0.5 else 1 / PERTURBATION_FACTOR
        params["weight_decay"] = min(wd_high, max(wd_low, params["weight_decay"] * factor))
        events.append({"kind": "explore", "trial": trial.index, "param": "weight_decay", "how": f"x{factor:.3f}"})
    return events


def pbt_search(
    base: PairClassifier,
    train: list[tuple[str, str, int]],
    validation: list[tuple[str, str, int]],
    space: HyperparameterSpace | None = None,
    population: int = 12,
    objective: Objective = Objective.AUC,
    seed: int = 0,
) -> PbtResult:
    """Search hyperparameters by exploit/explore over a trial population.

    Every trial starts from the base weights with its own head-init seed.
    Returns the best checkpoint by the objective (lowest for LOSS,
    highest otherwise) and a log with per-epoch results and every
    exploit/explore event.
    """
    if population < 2:
        raise ValueError("population must be >= 2")
    if not validation:
        raise ValueError("validation split is empty")
    if not train:
        raise ValueError("training split is empty")
    space = space or HyperparameterSpace()
    rng = random.Random(seed)

    trials: list[_Trial] = []
    for index in range(population):
        params = space.sample(rng)
        # every trial continues from the base weights; the sampled seed
        # governs its shuffling order (the head is already task-trained)
        trials.append(_Trial(index, params, base.clone()))

    result = PbtResult(best_model=base, best_objective=float("nan"), best_trial=-1)
    incumbent: float | None = None
    max_budget = max(t.budget for t in trials)
    quartile = population // 4

    for epoch in range(1, max_budget + 1):
        for trial in trials:
            if trial.budget >= epoch:
                _, optimizer = train_epochs(
                    trial.model,
                    train,
                    epochs=1,
                    learning_rate=trial.params["learning_rate"],
                    batch_size=trial.params["batch_size"],
                    seed=trial.params["seed"] * 1009 + epoch,
                    weight_decay=trial.params["weight_decay"],
                    optimizer=trial.optimizer,
                )
                trial.optimizer = optimizer
                trial.trained_epochs = epoch

        for trial in trials:
            scores, labels = score_examples(trial.model, validation)
            trial.objective_value = evaluate_objective(objective, scores, labels)
            if is_better(objective, trial.objective_value, incumbent):
                incumbent = trial.objective_value
                result.best_model = trial.model.clone()
                result.best_objective = incumbent
                result.best_trial = trial.index

        events: list[dict] = []
        if quartile >= 1:
            ranked = sorted(
                trials, key=lambda t: t.objective_value, reverse=objective is not Objective.LOSS
            )
            top = ranked[:quartile]
            survivors = [t for t in ranked[-quartile:] if t.budget > epoch]
            for trial in survivors:
                source = rng.choice(top)
                if source is trial:
                    continue
                trial.model = source.model.clone()
                trial.optimizer = None
                events.append(
                    {"kind": "exploit", "trial": trial.index, "copied_from": source.index, "epoch": epoch}
                )
                events.extend(_perturb(trial, space, rng))
                assert space.contains(trial.params)

        result.log.append(
            {
                "epoch": epoch,
                "population": len(trials),
                "best_objective": incumbent,
                "results": [
                    {
                        "trial": t.index,
                        "objective": t.objective_value,
                        "trained_epochs": t.trained_epochs,
                        **{k: t.params[k] for k in ("learning_rate", "batch_size", "weight_decay", "epochs", "seed")},
                    }
                    for t in trials
                ],
                "events": events,
            }
        )
    return result
