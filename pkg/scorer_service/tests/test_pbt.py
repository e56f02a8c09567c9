import pytest

from scorer_service.pbt import HyperparameterSpace, pbt_search
from scorer_service.synthetic import paraphrase_pairs
from scorer_service.training import Objective, stratified_split


def toy_splits(count=25, seed=3):
    examples = paraphrase_pairs(count, seed)
    return stratified_split(examples, 0.2, seed=0)


class TestSpace:
    def test_samples_stay_in_space(self):
        import random

        space = HyperparameterSpace()
        rng = random.Random(0)
        for _ in range(200):
            assert space.contains(space.sample(rng))

    def test_batch_cap_shrinks_choices(self):
        space = HyperparameterSpace(max_batch_size=16)
        assert space.batch_sizes == [4, 8, 16]


@pytest.fixture(scope="module")
def result(base_model):
    train, validation = toy_splits()
    return pbt_search(base_model, train, validation, population=6, seed=1)


class TestPbtSearch:
    def test_population_size_invariant(self, result):
        for entry in result.log:
            assert entry["population"] == 6
            assert len(entry["results"]) == 6

    def test_hyperparameters_stay_in_space(self, result):
        space = HyperparameterSpace()
        for entry in result.log:
            for row in entry["results"]:
                assert space.contains(
                    {k: row[k] for k in ("learning_rate", "epochs", "seed", "batch_size", "weight_decay")}
                )

    def test_best_objective_is_monotone(self, result):
        best = [entry["best_objective"] for entry in result.log]
        assert all(b >= a for a, b in zip(best, best[1:]))

    def test_exploit_events_logged_with_sources(self, result):
        events = [e for entry in result.log for e in entry["events"]]
        for event in events:
            if event["kind"] == "exploit":
                assert event["copied_from"] != event["trial"]

    def test_separable_data_reaches_perfect_auc(self, result):
        assert result.best_objective == 1.0

    def test_deterministic(self, base_model):
        train, validation = toy_splits(12, 5)
        a = pbt_search(base_model, train, validation, population=4, seed=9)
        b = pbt_search(base_model, train, validation, population=4, seed=9)
        assert a.best_objective == b.best_objective
        assert a.log == b.log

    def test_population_below_two_rejected(self, base_model):
        train, validation = toy_splits()
        with pytest.raises(ValueError, match="population"):
            pbt_search(base_model, train, validation, population=1)

    def test_empty_validation_rejected(self, base_model):
        train, _ = toy_splits()
        with pytest.raises(ValueError, match="validation"):
            pbt_search(base_model, train, [], population=4)

    def test_loss_objective_minimizes(self, base_model):
        train, validation = toy_splits(12, 5)
        result = pbt_search(base_model, train, validation, population=4, objective=Objective.LOSS, seed=2)
        best = [entry["best_objective"] for entry in result.log]
        assert all(b <= a for a, b in zip(best, best[1:]))
