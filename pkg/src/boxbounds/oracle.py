"""Independent ground-truth engines used to validate screening and bounding.

Three routes that share no code with the screened pipeline: the unpruned
2^N - 1 term inclusion-exclusion sum, an exact cell decomposition of space
along all box boundaries, and seeded Monte Carlo sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb, fsum, inf, sqrt
from typing import NamedTuple, Sequence

import numpy as np

from .errors import InputError
from .geometry import Box, require_same_dimension
from .measure import ProductMeasure

IE_MAX_EVENTS = 20
CELL_MAX_EVENTS = 12
CELL_MAX_DIM = 3
_MC_CHUNK = 1 << 19


@dataclass(frozen=True)
class CountDistribution:
    """Distribution of the number of events that occur: p[i] = P(count = i)."""

    p: tuple[float, ...]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.p)
        object.__setattr__(self, "p", p)
        if not p:
            raise InputError("count distribution needs at least p_0")
        if any(v < -1e-12 for v in p):
            raise InputError("count distribution has a negative entry")
        total = fsum(p)
        if abs(total - 1.0) > 1e-12:
            raise InputError(f"count distribution sums to {total!r}, not 1")

    @property
    def n_events(self) -> int:
        return len(self.p) - 1

    def union(self) -> float:
        return fsum(self.p[1:])

    def at_least(self, r: int) -> float:
        if not 0 <= r <= self.n_events + 1:
            raise InputError(f"r={r} out of range")
        return fsum(self.p[r:])

    def exactly(self, r: int) -> float:
        if not 0 <= r <= self.n_events:
            raise InputError(f"r={r} out of range")
        return self.p[r]

    def binomial_moment(self, k: int) -> float:
        """E of (count choose k); equals 1 for k = 0."""
        return fsum(comb(i, k) * v for i, v in enumerate(self.p))


class MonteCarloResult(NamedTuple):
    estimate: float
    standard_error: float


def _check_dimensions(boxes: Sequence[Box], measure: ProductMeasure) -> None:
    dim = require_same_dimension(boxes)
    if boxes and dim != measure.dimension:
        raise InputError(f"boxes have dimension {dim}, measure has {measure.dimension}")


def full_inclusion_exclusion_union(
    boxes: Sequence[Box], measure: ProductMeasure
) -> float:
    """Union probability from the unpruned inclusion-exclusion formula.

    Visits every one of the 2^N - 1 index subsets; empty intersections
    contribute zero through their clamped probability, with no screening
    anywhere.  Capped at 20 events.
    """
    n_boxes = len(boxes)
    if n_boxes > IE_MAX_EVENTS:
        raise InputError(f"event count {n_boxes} above the 2^N cap ({IE_MAX_EVENTS})")
    _check_dimensions(boxes, measure)
    if n_boxes == 0:
        return 0.0
    dim = boxes[0].dimension
    terms: list[float] = []

    def visit(start: int, lower, upper, positive: bool) -> None:
        for j in range(start, n_boxes):
            box = boxes[j]
            new_lower = tuple(map(max, lower, box.lower))
            new_upper = tuple(map(min, upper, box.upper))
            p = measure.rect_probability(new_lower, new_upper)
            terms.append(p if positive else -p)
            visit(j + 1, new_lower, new_upper, not positive)

    visit(0, (-inf,) * dim, (inf,) * dim, True)
    return fsum(terms)


def exact_count_distribution(
    boxes: Sequence[Box], measure: ProductMeasure
) -> CountDistribution:
    """Exact occurrence-count distribution by cell decomposition.

    Space is cut along every box boundary per axis; each resulting cell is
    either inside or outside each box, so its whole mass goes to one
    coverage count.  Exact for product measures.  Capped at 12 events and
    3 dimensions (the grid has (2N+1)^n cells).
    """
    n_boxes = len(boxes)
    if n_boxes > CELL_MAX_EVENTS:
        raise InputError(f"event count {n_boxes} above the cell cap ({CELL_MAX_EVENTS})")
    _check_dimensions(boxes, measure)
    if n_boxes == 0:
        return CountDistribution((1.0,))
    dim = boxes[0].dimension
    if dim > CELL_MAX_DIM:
        raise InputError(f"dimension {dim} above the cell cap ({CELL_MAX_DIM})")

    axes = []
    for k in range(dim):
        cuts = sorted({box.lower[k] for box in boxes} | {box.upper[k] for box in boxes})
        points = [-inf, *cuts, inf]
        cells = []
        for lo, hi in zip(points, points[1:]):
            prob = measure.interval_probability(k, lo, hi)
            if prob == 0.0:
                continue
            mask = 0
            for i, box in enumerate(boxes):
                if box.lower[k] <= lo and hi <= box.upper[k]:
                    mask |= 1 << i
            cells.append((prob, mask))
        axes.append(cells)

    buckets: list[list[float]] = [[] for _ in range(n_boxes + 1)]
    all_covered = (1 << n_boxes) - 1
    for cell in product(*axes):
        mask = all_covered
        prob = 1.0
        for axis_prob, axis_mask in cell:
            prob *= axis_prob
            mask &= axis_mask
        buckets[mask.bit_count()].append(prob)
    return CountDistribution(tuple(fsum(bucket) for bucket in buckets))


def monte_carlo_union(
    boxes: Sequence[Box], measure: ProductMeasure, samples: int, seed: int
) -> MonteCarloResult:
    """Hit-or-miss estimate of the union probability.

    Points come from per-coordinate inverse transform over a PCG64 stream
    (numpy default_rng), so a fixed seed reproduces the estimate exactly
    across platforms.  standard_error is sqrt(est (1 - est) / samples).
    """
    if samples < 1:
        raise InputError("samples must be at least 1")
    _check_dimensions(boxes, measure)
    if not boxes:
        return MonteCarloResult(0.0, 0.0)
    rng = np.random.default_rng(seed)
    lowers = np.array([box.lower for box in boxes])
    uppers = np.array([box.upper for box in boxes])
    hits = 0
    remaining = samples
    while remaining:
        size = min(remaining, _MC_CHUNK)
        points = measure.sample(rng, size)
        inside = np.logical_and(
            points[:, None, :] >= lowers[None, :, :],
            points[:, None, :] <= uppers[None, :, :],
        ).all(axis=2)
        hits += int(inside.any(axis=1).sum())
        remaining -= size
    estimate = hits / samples
    return MonteCarloResult(estimate, sqrt(estimate * (1.0 - estimate) / samples))
