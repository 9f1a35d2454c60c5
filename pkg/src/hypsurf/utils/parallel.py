"""Seed substreams and the worker pool for Monte-Carlo tasks.

Task k of a run with master seed s draws from
``default_rng(SeedSequence(s, spawn_key=(k,)))``. Task boundaries depend
only on (trials, chunk_size), so aggregates do not depend on the thread
count.
"""

from __future__ import annotations

import sys
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np
from pathos.pools import ThreadPool
from tqdm import tqdm

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService

logger = configure_logging(__name__)

T = TypeVar("T")
R = TypeVar("R")


def substream(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(k),)))


def chunk_sizes(trials: int, chunk_size: Optional[int] = None) -> list[int]:
    chunk_size = SettingsService().chunk_size if chunk_size is None else chunk_size
    if trials < 0:
        raise ValueError(f"trials must be >= 0, got {trials}")
    full, rest = divmod(trials, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_tasks(
    fn: Callable[[T], R],
    tasks: Sequence[T] | Iterable[T],
    threads: int = 1,
    desc: Optional[str] = None,
) -> list[R]:
    """Apply ``fn`` to every task and return the results in task order."""
    tasks = list(tasks)
    show = desc is not None and sys.stderr.isatty()
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tqdm(tasks, desc=desc, disable=not show, leave=False)]

    pool = ThreadPool(nodes=threads)
    try:
        results = list(
            tqdm(pool.imap(fn, tasks), total=len(tasks), desc=desc, disable=not show, leave=False)
        )
    finally:
        pool.close()
        pool.join()
        pool.clear()
    logger.debug(f"run_tasks: {len(tasks)} tasks on {threads} threads")
    return results
