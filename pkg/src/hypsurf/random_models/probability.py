"""
Birthday problem with a transverse map, and the coupon collector.

Both experiments split their trials into chunks whose sizes depend only on
(trials, chunk_size, row width); chunk k draws from substream k of the seed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.errors import InvalidParameter
from hypsurf.utils.parallel import chunk_sizes, run_tasks, substream

logger = configure_logging(__name__)

EXACT_MAX_OUTCOMES = 1_000_000


class TransverseKind(StrEnum):
    IDENTITY = "identity"
    SHIFT = "shift"
    TABLE = "table"


@dataclass(frozen=True)
class BirthdayConfig:
    """
    ``ell`` uniform draws from n objects; the good set G is the first
    ceil(alpha n) objects and T maps G injectively into the objects.
    ``allow_diagonal`` (None: settings default) lets a draw detect itself
    when T fixes it.
    """
    n: int
    ell: int
    alpha: float = 1.0
    transverse: TransverseKind | str = TransverseKind.SHIFT
    table: Optional[tuple[int, ...]] = None
    trials: int = 100_000
    seed: int = 0
    allow_diagonal: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidParameter(f"n must be >= 1, got {self.n}")
        if self.ell < 1:
            raise InvalidParameter(f"ell must be >= 1, got {self.ell}")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidParameter(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.trials < 1:
            raise InvalidParameter(f"trials must be >= 1, got {self.trials}")
        kind = TransverseKind(self.transverse)
        object.__setattr__(self, "transverse", kind)
        if kind is TransverseKind.TABLE:
            if self.table is None or len(self.table) != self.good_size:
                raise InvalidParameter(f"a table transverse map needs {self.good_size} entries")
            if len(set(self.table)) != len(self.table):
                raise InvalidParameter("transverse table is not injective")
            if any(not 0 <= x < self.n for x in self.table):
                raise InvalidParameter(f"transverse table leaves the objects 0..{self.n - 1}")

    @property
    def good_size(self) -> int:
        return math.ceil(self.alpha * self.n)

    @property
    def diagonal(self) -> bool:
        return SettingsService().allow_diagonal if self.allow_diagonal is None else self.allow_diagonal

    def transverse_map(self) -> np.ndarray:
        """T as an array over all objects, -1 outside G."""
        tmap = np.full(self.n, -1, dtype=np.int64)
        good = np.arange(self.good_size)
        if self.transverse is TransverseKind.IDENTITY:
            tmap[good] = good
        elif self.transverse is TransverseKind.SHIFT:
            tmap[good] = (good + 1) % self.n
        else:
            tmap[good] = np.asarray(self.table, dtype=np.int64)
        return tmap

    def poisson_estimate(self) -> float:
        """exp(-alpha ell (ell - 1) / n), the collision-free probability for large n."""
        return math.exp(-self.good_size * self.ell * (self.ell - 1) / (self.n * self.n))


def _detected(draws: np.ndarray, tmap: np.ndarray, n: int, diagonal: bool) -> np.ndarray:
    """Per row of ``draws``: some i, j with x_i in G and x_j = T(x_i)."""
    rows, ell = draws.shape
    offset = (np.arange(rows, dtype=np.int64) * n)[:, None]
    keys = np.sort(draws, axis=1) + offset
    flat = keys.ravel()
    target = tmap[draws]
    query = target + offset
    lo = np.searchsorted(flat, query, side="left")
    hi = np.searchsorted(flat, query, side="right")
    hits = hi - lo
    need = np.where((target == draws) & (not diagonal), 2, 1)
    return np.any((target >= 0) & (hits >= need), axis=1)


def birthday_mc(cfg: BirthdayConfig, threads: int = 1, chunk_size: Optional[int] = None) -> tuple[float, float]:
    """Monte-Carlo probability that no draw detects a transverse partner, and its standard error."""
    chunk_size = SettingsService().chunk_size if chunk_size is None else chunk_size
    rows_per_chunk = max(1, chunk_size // cfg.ell)
    tmap = cfg.transverse_map()
    diagonal = cfg.diagonal
    chunks = list(enumerate(chunk_sizes(cfg.trials, rows_per_chunk)))

    def task(item):
        k, m = item
        draws = substream(cfg.seed, k).integers(cfg.n, size=(m, cfg.ell))
        return int((~_detected(draws, tmap, cfg.n, diagonal)).sum())

    misses = sum(run_tasks(task, chunks, threads=threads, desc="birthday"))
    p = misses / cfg.trials
    stderr = math.sqrt(p * (1.0 - p) / cfg.trials)
    logger.info(f"birthday n={cfg.n} ell={cfg.ell} T={cfg.transverse}: p_hat={p:.6f} +- {stderr:.2e}")
    return p, stderr


def birthday_exact(cfg: BirthdayConfig) -> Fraction:
    """The same probability by enumerating all n**ell outcomes."""
    outcomes = cfg.n ** cfg.ell
    if outcomes > EXACT_MAX_OUTCOMES:
        raise InvalidParameter(f"{outcomes} outcomes exceeds the enumeration cap {EXACT_MAX_OUTCOMES}")
    draws = np.array(list(itertools.product(range(cfg.n), repeat=cfg.ell)), dtype=np.int64)
    detected = _detected(draws, cfg.transverse_map(), cfg.n, cfg.diagonal)
    return Fraction(int((~detected).sum()), outcomes)


def sweep_ell(n: int, c: float) -> int:
    return max(1, math.ceil(c * math.sqrt(n)))


@dataclass(frozen=True)
class BirthdayRow:
    c: float
    ell: int
    p_hat: float
    stderr: float
    poisson: float


def birthday_sweep(
    n: int,
    c_values: Sequence[float],
    trials: int,
    seed: int,
    alpha: float = 1.0,
    transverse: TransverseKind | str = TransverseKind.SHIFT,
    threads: int = 1,
) -> list[BirthdayRow]:
    """birthday_mc at ell = ceil(c sqrt(n)); sweep point i uses master seed substream i."""
    rows = []
    for i, c in enumerate(c_values):
        seed_i = int(substream(seed, i).integers(2**63))
        cfg = BirthdayConfig(
            n=n, ell=sweep_ell(n, c), alpha=alpha, transverse=transverse, trials=trials, seed=seed_i
        )
        p, se = birthday_mc(cfg, threads=threads)
        rows.append(BirthdayRow(c=float(c), ell=cfg.ell, p_hat=p, stderr=se, poisson=cfg.poisson_estimate()))
    return rows


def harmonic_expectation(n: int) -> float:
    """n * H_n, the expected coupon-collector cover time."""
    return n * math.fsum(1.0 / k for k in range(1, n + 1))


def cover_time_variance(n: int) -> float:
    """Variance of the coupon-collector cover time: sum over k of (1 - p_k) / p_k^2, p_k = (n - k) / n."""
    return math.fsum((k / n) / ((n - k) / n) ** 2 for k in range(n))


def coupon_collector_mc(
    n: int, trials: int, seed: int, threads: int = 1, chunk_size: Optional[int] = None
) -> tuple[float, float]:
    """
    Mean first time all n objects have been drawn, with its standard error.

    The wait for the (k+1)-th new object is geometric with success
    probability (n - k) / n, so a cover time is a sum of n geometrics.
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    chunk_size = SettingsService().chunk_size if chunk_size is None else chunk_size
    probs = (n - np.arange(n)) / n
    chunks = list(enumerate(chunk_sizes(trials, max(1, chunk_size // n))))

    def task(item):
        k, m = item
        times = substream(seed, k).geometric(probs, size=(m, n)).sum(axis=1)
        return float(times.sum()), float(np.square(times, dtype=np.float64).sum())

    parts = run_tasks(task, chunks, threads=threads, desc="coupon")
    total = math.fsum(s for s, _ in parts)
    total_sq = math.fsum(q for _, q in parts)
    mean = total / trials
    var = (total_sq - trials * mean * mean) / (trials - 1) if trials > 1 else 0.0
    stderr = math.sqrt(max(var, 0.0) / trials)
    logger.info(f"coupon n={n}: mean {mean:.4f} +- {stderr:.4f} (n H_n = {harmonic_expectation(n):.4f})")
    return mean, stderr


@dataclass(frozen=True)
class CouponRow:
    n: int
    mean: float
    stderr: float
    expected: float


def coupon_sweep(n_values: Sequence[int], trials: int, seed: int, threads: int = 1) -> list[CouponRow]:
    rows = []
    for i, n in enumerate(n_values):
        seed_i = int(substream(seed, i).integers(2**63))
        mean, se = coupon_collector_mc(int(n), trials, seed_i, threads=threads)
        rows.append(CouponRow(n=int(n), mean=mean, stderr=se, expected=harmonic_expectation(int(n))))
    return rows
