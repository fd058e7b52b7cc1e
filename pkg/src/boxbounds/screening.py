"""Intersection-graph screening for inclusion-exclusion.

Pairs of events whose boxes fail the vertex comparison test cannot carry
probability, and neither can any tuple containing them.  Building the graph
of surviving pairs and extending its cliques therefore enumerates exactly
the tuples that matter, which prunes the 2^N - 1 term inclusion-exclusion
formula down to the surviving terms (axis-aligned boxes have the Helly
property, so graph cliques and nonempty tuples coincide).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum
from typing import NamedTuple, Sequence

from .errors import InputError
from .geometry import (
    Box,
    EmptinessMode,
    meet_vertices,
    require_same_dimension,
    vertex_pair_nonempty,
)
from .measure import ProductMeasure


@dataclass(frozen=True)
class IntersectionGraph:
    """Vertices are event indices; an edge means the pair survives the test."""

    n_events: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "edges", frozenset((int(i), int(j)) for i, j in self.edges)
        )
        for i, j in self.edges:
            if not (0 <= i < j < self.n_events):
                raise InputError(f"edge ({i}, {j}) out of range for {self.n_events} vertices")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return (min(i, j), max(i, j)) in self.edges

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n_events)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


@dataclass(frozen=True)
class TupleEntry:
    """A surviving index tuple with its intersection box and probability."""

    indices: tuple[int, ...]
    box: Box
    probability: float | None = None


@dataclass(frozen=True)
class TupleLedger:
    """Surviving tuples per order k, each list in lexicographic index order."""

    n_events: int
    orders: dict[int, list[TupleEntry]] = field(default_factory=dict)

    def entries(self, order: int) -> list[TupleEntry]:
        return self.orders.get(order, [])

    @property
    def max_order(self) -> int:
        return max(self.orders, default=0)

    def term_count(self) -> int:
        return sum(len(entries) for entries in self.orders.values())

    def order_sum(self, order: int) -> float:
        """Probability total over the surviving tuples of one order."""
        entries = self.entries(order)
        if any(entry.probability is None for entry in entries):
            raise InputError("ledger was built without a measure; probabilities missing")
        return fsum(entry.probability for entry in entries)


@dataclass(frozen=True)
class MomentVector:
    """Binomial moments S_1..S_m of the occurrence count.

    ``s[k-1]`` holds S_k; S_0 = 1 by convention.  ``q`` carries the exact
    union probability when it is known.
    """

    n_events: int
    s: tuple[float, ...]
    q: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", tuple(float(v) for v in self.s))
        if self.n_events < 0:
            raise InputError("event count must be nonnegative")
        if len(self.s) > self.n_events:
            raise InputError(
                f"got {len(self.s)} moments for {self.n_events} events; "
                f"S_k vanishes identically beyond k = N"
            )

    @property
    def m(self) -> int:
        return len(self.s)

    def s_k(self, k: int) -> float:
        if k == 0:
            return 1.0
        if not 1 <= k <= self.m:
            raise InputError(f"moment S_{k} not available (have 1..{self.m})")
        return self.s[k - 1]


class UnionResult(NamedTuple):
    q: float
    terms_used: int
    terms_full: int


@dataclass(frozen=True)
class TupleVerdict:
    """One verdict-table row: candidate intersection vertices plus yes/no."""

    indices: tuple[int, ...]
    label: str
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    nonempty: bool


def build_graph(boxes: Sequence[Box], mode: EmptinessMode) -> IntersectionGraph:
    """Graph whose edges are the index pairs with nonempty intersection."""
    require_same_dimension(boxes)
    edges = set()
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            lower, upper = meet_vertices([boxes[i], boxes[j]])
            if vertex_pair_nonempty(lower, upper, mode):
                edges.add((i, j))
    return IntersectionGraph(len(boxes), frozenset(edges))


def pair_verdicts(boxes: Sequence[Box], mode: EmptinessMode) -> list[TupleVerdict]:
    """One row per index pair, in lexicographic order, including failures."""
    require_same_dimension(boxes)
    rows = []
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            lower, upper = meet_vertices([boxes[i], boxes[j]])
            rows.append(
                TupleVerdict(
                    indices=(i, j),
                    label=boxes[i].id + boxes[j].id,
                    lower=lower,
                    upper=upper,
                    nonempty=vertex_pair_nonempty(lower, upper, mode),
                )
            )
    return rows


def cliques_by_order(
    graph: IntersectionGraph, max_order: int | None = None
) -> dict[int, list[tuple[int, ...]]]:
    """Cliques of the graph grouped by size, lexicographic within each size.

    Level k is produced by extending level k-1 tuples with a common
    neighbor of larger index, so level k is exactly the k-vertex cliques.
    """
    n = graph.n_events
    cap = n if max_order is None else min(max_order, n)
    out: dict[int, list[tuple[int, ...]]] = {}
    if cap < 1 or n == 0:
        return out
    adj = graph.adjacency()
    frontier = [((v,), {w for w in adj[v] if w > v}) for v in range(n)]
    out[1] = [t for t, _ in frontier]
    k = 1
    while frontier and k < cap:
        new_frontier = []
        for t, cands in frontier:
            for w in sorted(cands):
                new_frontier.append((t + (w,), {u for u in cands & adj[w] if u > w}))
        k += 1
        if not new_frontier:
            break
        out[k] = [t for t, _ in new_frontier]
        frontier = new_frontier
    return out


def count_cliques(graph: IntersectionGraph, order: int) -> int:
    return len(cliques_by_order(graph, order).get(order, []))


def clique_number(graph: IntersectionGraph) -> int:
    return max(cliques_by_order(graph), default=0)


def enumerate_tuples(
    boxes: Sequence[Box],
    graph: IntersectionGraph,
    mode: EmptinessMode,
    max_order: int,
    measure: ProductMeasure | None = None,
) -> TupleLedger:
    """All index tuples of order <= max_order with nonempty intersection.

    Candidates at order k extend surviving (k-1)-tuples by graph neighbors
    common to every member, and each candidate is confirmed with the
    k-wise vertex test; the test is the arbiter.  max_order above the
    event count is clamped.  With a measure given, each entry carries its
    intersection probability.
    """
    n = len(boxes)
    if graph.n_events != n:
        raise InputError(f"graph has {graph.n_events} vertices for {n} boxes")
    dim = require_same_dimension(boxes)
    if measure is not None and n > 0 and dim != measure.dimension:
        raise InputError(
            f"boxes have dimension {dim}, measure has {measure.dimension}"
        )
    cap = min(max_order, n)
    orders: dict[int, list[TupleEntry]] = {}
    if cap < 1:
        return TupleLedger(n, orders)

    adj = graph.adjacency()
    frontier = []
    level = []
    for v, box in enumerate(boxes):
        if not vertex_pair_nonempty(box.lower, box.upper, mode):
            continue  # degenerate event pruned under the strict test
        prob = measure.box_probability(box) if measure is not None else None
        level.append(TupleEntry((v,), box, prob))
        frontier.append(((v,), box.lower, box.upper, {w for w in adj[v] if w > v}))
    if level:
        orders[1] = level

    k = 1
    while frontier and k < cap:
        new_frontier = []
        level = []
        for t, lower, upper, cands in frontier:
            for w in sorted(cands):
                box = boxes[w]
                new_lower = tuple(map(max, lower, box.lower))
                new_upper = tuple(map(min, upper, box.upper))
                if not vertex_pair_nonempty(new_lower, new_upper, mode):
                    continue
                indices = t + (w,)
                joined = Box(
                    "".join(boxes[i].id for i in indices), new_lower, new_upper
                )
                prob = (
                    measure.rect_probability(new_lower, new_upper)
                    if measure is not None
                    else None
                )
                level.append(TupleEntry(indices, joined, prob))
                new_frontier.append(
                    (indices, new_lower, new_upper, {u for u in cands & adj[w] if u > w})
                )
        k += 1
        if level:
            orders[k] = level
        frontier = new_frontier
    return TupleLedger(n, orders)


def _signed_total(ledger: TupleLedger) -> float:
    """Alternating inclusion-exclusion total over the ledger, fully summed
    with fsum in deterministic (order, lexicographic) order."""
    signed = []
    for k in sorted(ledger.orders):
        sign = 1.0 if k % 2 == 1 else -1.0
        for entry in ledger.entries(k):
            if entry.probability is None:
                raise InputError("ledger was built without a measure; probabilities missing")
            signed.append(sign * entry.probability)
    return fsum(signed)


def screened_union(
    boxes: Sequence[Box],
    measure: ProductMeasure,
    mode: EmptinessMode = EmptinessMode.POSITIVE_MEASURE,
) -> UnionResult:
    """Exact union probability via inclusion-exclusion over surviving tuples.

    terms_used counts every retained summand across all orders, singletons
    included; terms_full is the 2^N - 1 of the unpruned formula (an exact
    Python integer, so large N cannot overflow the count).
    """
    if not boxes:
        return UnionResult(0.0, 0, 0)
    graph = build_graph(boxes, mode)
    ledger = enumerate_tuples(boxes, graph, mode, len(boxes), measure=measure)
    return UnionResult(_signed_total(ledger), ledger.term_count(), 2 ** len(boxes) - 1)


def binomial_moments(
    boxes: Sequence[Box],
    measure: ProductMeasure,
    mode: EmptinessMode = EmptinessMode.POSITIVE_MEASURE,
    m: int | None = None,
) -> MomentVector:
    """Binomial moments S_1..S_m from the surviving tuples, plus exact Q.

    S_k sums the intersection probabilities of the surviving k-tuples;
    pruned tuples contribute zero, so the sums are exact.  m defaults to
    the event count and is clamped to it.
    """
    n = len(boxes)
    m = n if m is None else min(m, n)
    if m < 0:
        raise InputError("moment order must be nonnegative")
    if n == 0:
        return MomentVector(0, (), 0.0)
    graph = build_graph(boxes, mode)
    ledger = enumerate_tuples(boxes, graph, mode, n, measure=measure)
    s = tuple(ledger.order_sum(k) for k in range(1, m + 1))
    return MomentVector(n, s, _signed_total(ledger))


def to_dot(graph: IntersectionGraph, labels: Sequence[str] | None = None) -> str:
    """DOT rendering of the graph with vertices labeled by event ids."""
    if labels is None:
        labels = [str(v) for v in range(graph.n_events)]
    if len(labels) != graph.n_events:
        raise InputError(
            f"got {len(labels)} labels for {graph.n_events} vertices"
        )
    lines = ["graph intersections {"]
    for name in labels:
        lines.append(f'  "{name}";')
    for i, j in sorted(graph.edges):
        lines.append(f'  "{labels[i]}" -- "{labels[j]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
