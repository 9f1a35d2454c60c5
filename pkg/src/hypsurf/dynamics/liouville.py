"""
Liouville sampling and Monte-Carlo mixing estimates.

Points are drawn uniformly for the hyperbolic area by rejection from the
bounding box of the fundamental polygon (x uniform, y with density y^-2),
directions uniformly. Trials are split into chunks whose boundaries depend
only on (trials, chunk_size); chunk k draws from substream k of the seed, so
hit counts do not depend on the thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.core import batch
from hypsurf.core.hyp import Mat2, UnitTangent
from hypsurf.dynamics.flowbox import FlowBox, is_embedded, mu_hat
from hypsurf.errors import InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.utils.parallel import chunk_sizes, run_tasks, substream

logger = configure_logging(__name__)


def bounding_box_area(surface: SurfaceGroup) -> float:
    x0, x1, y0, y1 = surface.root.domain.bounding_box
    return (x1 - x0) * (1.0 / y0 - 1.0 / y1)


def sample_points(surface: SurfaceGroup, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    """``n`` area-uniform points of the root polygon and the number of proposals used."""
    poly = surface.root.domain
    x0, x1, y0, y1 = poly.bounding_box
    accept = poly.area() / bounding_box_area(surface)
    out: list[np.ndarray] = []
    got = attempts = 0
    while got < n:
        m = int(math.ceil(1.2 * (n - got) / accept)) + 16
        x = rng.uniform(x0, x1, size=m)
        u = rng.random(size=m)
        y = 1.0 / (1.0 / y0 - u * (1.0 / y0 - 1.0 / y1))
        z = x + 1j * y
        inside = poly.contains(z)
        kept = z[inside][: n - got]
        if len(kept) < n - got:
            attempts += m
        else:
            # proposals up to and including the last accepted one
            attempts += int(np.flatnonzero(inside)[n - got - 1]) + 1
        out.append(kept)
        got += len(kept)
    return np.concatenate(out) if out else np.empty(0, dtype=complex), attempts


def liouville_samples(surface: SurfaceGroup, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` Liouville-distributed frames, shape (n, 4)."""
    z, _ = sample_points(surface, n, rng)
    theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
    frames = batch.frames_at(z, theta)
    if surface.is_cover:
        sheet = rng.integers(surface.degree, size=n)
        frames = batch.mul(surface.tile_matrices[sheet], frames)
    return frames


def liouville_sample(surface: SurfaceGroup, rng: np.random.Generator) -> UnitTangent:
    return UnitTangent(Mat2.from_array(liouville_samples(surface, 1, rng)[0]))


@dataclass(frozen=True)
class MixingEstimate:
    t: float
    estimate: float
    stderr: float
    trials: int
    target: float = 0.0
    kappa_fit: Optional[float] = None


def _stderr(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials) if trials else 0.0


def fit_decay_rate(ts: Sequence[float], estimates: Sequence[float], target: float) -> Optional[float]:
    """Negated least-squares slope of log|estimate - target| over points where it is positive."""
    ts = np.asarray(ts, dtype=float)
    gap = np.abs(np.asarray(estimates, dtype=float) - target)
    mask = gap > 0.0
    if mask.sum() < 2 or np.ptp(ts[mask]) == 0.0:
        return None
    slope, _ = np.polyfit(ts[mask], np.log(gap[mask]), 1)
    return float(-slope)


def _joint_hits(frames: np.ndarray, boxes: Sequence[FlowBox], times: Sequence[float]) -> int:
    """Count frames v with g_{times[i]} v in boxes[i] for every i."""
    alive = frames
    for box, t in zip(boxes, times):
        if len(alive) == 0:
            return 0
        moved = batch.flow(alive, t) if t else alive
        alive = alive[box.contains_many(moved)]
    return len(alive)


def _require_embedded(boxes: Sequence[FlowBox]) -> None:
    for box in boxes:
        if not is_embedded(box):
            raise InvalidParameter(
                f"flow box of widths ({box.eta1}, {box.eta2}, {box.eta3}) is not embedded"
            )


def mixing_curve(
    surface: SurfaceGroup,
    b1: FlowBox,
    b2: FlowBox,
    t_grid: Sequence[float],
    trials: int,
    seed: int,
    threads: int = 1,
    chunk_size: Optional[int] = None,
) -> list[MixingEstimate]:
    """
    Fraction of Liouville samples v with v in b1 and g_t v in b2, per t.

    ``kappa_fit`` (shared by every row) is the fitted decay rate of
    |estimate - mu(b1) mu(b2)| along the grid.
    """
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    _require_embedded((b1, b2))
    grid = [float(t) for t in t_grid]
    chunks = list(enumerate(chunk_sizes(trials, chunk_size)))

    def task(item):
        k, n = item
        frames = liouville_samples(surface, n, substream(seed, k))
        start = frames[b1.contains_many(frames)]
        if len(start) == 0:
            return [0] * len(grid)
        return [int(b2.contains_many(batch.flow(start, t)).sum()) for t in grid]

    per_chunk = run_tasks(task, chunks, threads=threads, desc="mixing")
    hits = np.sum(np.array(per_chunk, dtype=np.int64).reshape(len(chunks), len(grid)), axis=0)
    target = mu_hat(b1) * mu_hat(b2)
    estimates = hits / trials
    kappa = fit_decay_rate(grid, estimates, target)
    out = [
        MixingEstimate(
            t=t,
            estimate=float(p),
            stderr=_stderr(float(p), trials),
            trials=trials,
            target=target,
            kappa_fit=kappa,
        )
        for t, p in zip(grid, estimates)
    ]
    logger.info(f"mixing curve: {len(grid)} times, {trials} trials, kappa_fit={kappa}")
    return out


def multiple_mixing(
    surface: SurfaceGroup,
    boxes: Sequence[FlowBox],
    t: float,
    trials: int,
    seed: int,
    threads: int = 1,
    chunk_size: Optional[int] = None,
) -> MixingEstimate:
    """Fraction of samples v with g_{i t} v in boxes[i] for i = 0..k-1."""
    if trials < 1:
        raise InvalidParameter(f"trials must be >= 1, got {trials}")
    if len(boxes) < 2:
        raise InvalidParameter("multiple mixing needs at least two boxes")
    _require_embedded(boxes)
    times = [i * float(t) for i in range(len(boxes))]
    chunks = list(enumerate(chunk_sizes(trials, chunk_size)))

    def task(item):
        k, n = item
        return _joint_hits(liouville_samples(surface, n, substream(seed, k)), boxes, times)

    hits = sum(run_tasks(task, chunks, threads=threads, desc="multiple mixing"))
    p = hits / trials
    return MixingEstimate(
        t=float(t),
        estimate=p,
        stderr=_stderr(p, trials),
        trials=trials,
        target=math.prod(mu_hat(b) for b in boxes),
    )


def box_fraction(
    surface: SurfaceGroup, box: FlowBox, trials: int, seed: int, chunk_size: Optional[int] = None
) -> tuple[float, float]:
    """Monte-Carlo measure of one box with its standard error."""
    hits = 0
    for k, n in enumerate(chunk_sizes(trials, chunk_size)):
        hits += int(box.contains_many(liouville_samples(surface, n, substream(seed, k))).sum())
    p = hits / trials
    return p, _stderr(p, trials)
