"""Tests for seed substreams and the task runner."""

import numpy as np
import pytest

from hypsurf.utils.parallel import chunk_sizes, run_tasks, substream


class TestSubstream:
    def test_reproducible(self):
        assert substream(7, 3).integers(1_000_000) == substream(7, 3).integers(1_000_000)

    def test_tasks_are_independent_streams(self):
        a = substream(7, 0).random(5)
        b = substream(7, 1).random(5)
        assert not np.allclose(a, b)


class TestChunkSizes:
    def test_remainder_chunk(self):
        assert chunk_sizes(10, 4) == [4, 4, 2]

    def test_exact_multiple(self):
        assert chunk_sizes(8, 4) == [4, 4]

    def test_no_trials(self):
        assert chunk_sizes(0, 4) == []

    def test_default_from_settings(self):
        assert chunk_sizes(250_000) == [100_000, 100_000, 50_000]

    def test_negative(self):
        with pytest.raises(ValueError):
            chunk_sizes(-1, 4)


class TestRunTasks:
    def test_serial(self):
        assert run_tasks(lambda x: x * x, range(5)) == [0, 1, 4, 9, 16]

    def test_threads_keep_task_order(self):
        assert run_tasks(lambda x: x + 1, range(20), threads=4) == list(range(1, 21))

    def test_empty(self):
        assert run_tasks(lambda x: x, [], threads=3) == []
