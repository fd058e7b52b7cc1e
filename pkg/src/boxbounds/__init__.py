"""Exact probabilities and sharp LP bounds for Boolean functions of
hyperrectangle events under product measures."""

from .bounding import (
    BooleanSystem,
    BoundPair,
    LpProblem,
    LpResult,
    atleast_r_bounds,
    boolean_lp_bounds,
    boolean_system_from_boxes,
    exactly_r_bounds,
    hunter_worsley_upper,
    pairwise_probabilities,
    q_atleast_bounds,
    q_exactly_bounds,
    solve_lp,
    union_bounds,
)
from .errors import InfeasibleBoundsError, InputError
from .geometry import (
    Box,
    EmptinessMode,
    intersect,
    is_nonempty,
    meet_vertices,
    vertex_pair_nonempty,
)
from .measure import PiecewiseCdf, ProductMeasure, UniformInterval
from .oracle import (
    CountDistribution,
    MonteCarloResult,
    exact_count_distribution,
    full_inclusion_exclusion_union,
    monte_carlo_union,
)
from .screening import (
    IntersectionGraph,
    MomentVector,
    TupleEntry,
    TupleLedger,
    UnionResult,
    binomial_moments,
    build_graph,
    clique_number,
    cliques_by_order,
    count_cliques,
    enumerate_tuples,
    pair_verdicts,
    screened_union,
    to_dot,
)

__version__ = "0.1.0"
