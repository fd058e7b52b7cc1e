"""Shared fixtures and independent test-side oracles."""

from itertools import combinations
from math import comb, floor, fsum

import numpy as np

from boxbounds.geometry import Box, meet_vertices, vertex_pair_nonempty
from boxbounds.measure import ProductMeasure
from boxbounds.screening import MomentVector


def example1():
    """Five rectangles under the uniform measure on [0, 10]^2."""
    boxes = [
        Box("A1", (5, 6), (9, 9)),
        Box("A2", (2, 4), (6, 7)),
        Box("A3", (1, 3), (4, 8)),
        Box("A4", (3, 2), (7, 10)),
        Box("A5", (0, 1), (10, 5)),
    ]
    return boxes, ProductMeasure.uniform((0, 0), (10, 10))


def example2():
    """Seven boxes under the uniform measure on [0, 5]^3."""
    boxes = [
        Box("A1", (0, 0, 0), (2, 2, 2)),
        Box("A2", (3, 1, 3), (5, 3, 5)),
        Box("A3", (1, 3, 3), (3, 5, 5)),
        Box("A4", (4, 4, 4), (5, 5, 5)),
        Box("A5", (2, 2, 2), (3, 3, 4)),
        Box("A6", (1, 4, 1), (2, 5, 2)),
        Box("A7", (4, 1, 4), (5, 2, 5)),
    ]
    return boxes, ProductMeasure.uniform((0, 0, 0), (5, 5, 5))


def random_instance(rng, max_events=10, max_dim=3, min_events=1):
    """Random boxes under a uniform measure on [0, 6]^dim.

    Half the instances use integer corners on the 0..6 grid, which
    produces shared boundaries, touching faces and degenerate boxes; the
    other half use continuous corners.
    """
    dim = int(rng.integers(1, max_dim + 1))
    n_events = int(rng.integers(min_events, max_events + 1))
    on_grid = bool(rng.integers(0, 2))
    boxes = []
    for i in range(n_events):
        if on_grid:
            corners = rng.integers(0, 7, size=(2, dim)).astype(float)
        else:
            corners = rng.uniform(0.0, 6.0, size=(2, dim))
        lower = np.minimum(corners[0], corners[1])
        upper = np.maximum(corners[0], corners[1])
        boxes.append(Box(f"A{i + 1}", tuple(lower), tuple(upper)))
    return boxes, ProductMeasure.uniform((0.0,) * dim, (6.0,) * dim)


def brute_force_tuples(boxes, mode, order):
    """All index tuples of the given order passing the vertex test,
    enumerated directly over combinations with no graph involved."""
    survivors = []
    for indices in combinations(range(len(boxes)), order):
        lower, upper = meet_vertices([boxes[i] for i in indices])
        if vertex_pair_nonempty(lower, upper, mode):
            survivors.append(indices)
    return survivors


def random_count_distribution(rng, n_events):
    """A random occurrence-count distribution p_0..p_N, possibly sparse."""
    weights = rng.random(n_events + 1)
    weights[rng.random(n_events + 1) < 0.3] = 0.0
    if weights.sum() == 0.0:
        weights[int(rng.integers(0, n_events + 1))] = 1.0
    return tuple(float(w) for w in weights / weights.sum())


def moments_from_distribution(p, m):
    """MomentVector computed straight from a count distribution."""
    n_events = len(p) - 1
    s = tuple(fsum(comb(i, k) * p[i] for i in range(n_events + 1)) for k in range(1, m + 1))
    return MomentVector(n_events, s, q=fsum(p[1:]))


def dawson_sankoff_lower(s1, s2):
    """Closed-form m = 2 lower bound on the union probability."""
    if s1 <= 0.0:
        return 0.0
    k = 1 + floor(2.0 * s2 / s1)
    return 2.0 * s1 / (k + 1) - 2.0 * s2 / (k * (k + 1))


def two_moment_upper(s1, s2, n_events):
    """Closed-form m = 2 upper bound on the union probability."""
    return s1 - 2.0 * s2 / n_events


def lp_optimum_by_vertex_enumeration(objective, rows, rhs, sense):
    """LP optimum by checking every basic solution of the equality system.

    Only valid for bounded feasible problems; every vertex has at most
    rank-many nonzero coordinates, so enumerating column subsets finds
    the optimum.
    """
    a = np.asarray(rows, dtype=float)
    b = np.asarray(rhs, dtype=float)
    c = np.asarray(objective, dtype=float)
    n_rows, n_cols = a.shape
    best = None
    for size in range(0, min(n_rows, n_cols) + 1):
        for cols in combinations(range(n_cols), size):
            if size == 0:
                x_sub = np.zeros(0)
                residual = np.linalg.norm(b)
            else:
                sub = a[:, cols]
                x_sub, *_ = np.linalg.lstsq(sub, b, rcond=None)
                residual = np.linalg.norm(sub @ x_sub - b)
            if residual > 1e-8 or (size and x_sub.min() < -1e-9):
                continue
            value = float(c[list(cols)] @ x_sub) if size else 0.0
            if best is None:
                best = value
            elif sense == "min":
                best = min(best, value)
            else:
                best = max(best, value)
    return best
