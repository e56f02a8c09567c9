import pytest

from scorer_service.batchprobe import BATCH_CAP, batch_size_space, probe_batch_size


SAMPLE = ("alpha beta gamma", "gamma beta alpha", 1)


def failing_above(limit):
    def try_step(model, sample, batch_size):
        if batch_size > limit:
            raise MemoryError(f"simulated out of memory at {batch_size}")

    return try_step


class TestProbe:
    def test_cpu_reaches_the_cap(self, base_model):
        assert probe_batch_size(base_model, SAMPLE) == BATCH_CAP

    def test_simulated_sixteen_limit(self, base_model):
        assert probe_batch_size(base_model, SAMPLE, try_step=failing_above(16)) == 16
        assert batch_size_space(16) == [4, 8, 16]

    def test_failure_at_four_is_an_error(self, base_model):
        with pytest.raises(RuntimeError, match="batch size 4"):
            probe_batch_size(base_model, SAMPLE, try_step=failing_above(2))

    def test_cap_at_sixty_four_even_if_more_fits(self, base_model):
        assert probe_batch_size(base_model, SAMPLE, try_step=failing_above(10_000)) == 64
        assert batch_size_space(64) == [4, 8, 16, 32, 64]

    def test_unrelated_errors_propagate(self, base_model):
        def broken(model, sample, batch_size):
            raise RuntimeError("shape mismatch somewhere")

        with pytest.raises(RuntimeError, match="shape mismatch"):
            probe_batch_size(base_model, SAMPLE, try_step=broken)
