"""Product probability measures with exactly evaluable box probabilities.

Every marginal here is continuous (uniform or piecewise-linear CDF), so the
probability of a box is the product of per-coordinate CDF differences and
can be computed in closed form.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from math import isfinite
from typing import Sequence, Union

import numpy as np

from .errors import InputError
from .geometry import Box


@dataclass(frozen=True)
class UniformInterval:
    """Uniform marginal on [a, b], a < b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (isfinite(self.a) and isfinite(self.b)) or not self.a < self.b:
            raise InputError(f"uniform marginal needs a < b, got [{self.a}, {self.b}]")

    def cdf(self, x: float) -> float:
        if x <= self.a:
            return 0.0
        if x >= self.b:
            return 1.0
        return (x - self.a) / (self.b - self.a)

    def ppf(self, u):
        """Quantile function; accepts scalars or numpy arrays."""
        return self.a + u * (self.b - self.a)


@dataclass(frozen=True)
class PiecewiseCdf:
    """Continuous marginal given by a piecewise-linear CDF.

    ``knots`` must be strictly increasing and ``values`` nondecreasing from
    0 to 1.  Below the first knot the CDF is 0, above the last it is 1.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        knots = tuple(float(v) for v in self.knots)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        if len(knots) != len(values) or len(knots) < 2:
            raise InputError("piecewise CDF needs two or more (knot, value) pairs")
        if not all(isfinite(k) for k in knots):
            raise InputError("piecewise CDF knots must be finite")
        if any(k1 >= k2 for k1, k2 in zip(knots, knots[1:])):
            raise InputError("piecewise CDF knots must be strictly increasing")
        if any(v1 > v2 for v1, v2 in zip(values, values[1:])):
            raise InputError("piecewise CDF values must be nondecreasing")
        if values[0] != 0.0 or values[-1] != 1.0:
            raise InputError("piecewise CDF values must start at 0 and end at 1")

    def cdf(self, x: float) -> float:
        knots, values = self.knots, self.values
        if x <= knots[0]:
            return 0.0
        if x >= knots[-1]:
            return 1.0
        i = bisect_right(knots, x) - 1
        t = (x - knots[i]) / (knots[i + 1] - knots[i])
        return values[i] + t * (values[i + 1] - values[i])

    def ppf(self, u):
        """Generalized inverse; flat CDF segments map to their left edge."""
        u_arr = np.asarray(u, dtype=float)
        values = np.asarray(self.values)
        knots = np.asarray(self.knots)
        idx = np.clip(np.searchsorted(values, u_arr, side="left"), 0, len(values) - 1)
        left = np.maximum(idx - 1, 0)
        dv = values[idx] - values[left]
        safe = np.where(dv > 0.0, dv, 1.0)
        t = np.where(dv > 0.0, (u_arr - values[left]) / safe, 1.0)
        x = knots[left] + t * (knots[idx] - knots[left])
        x = np.where(idx == 0, knots[0], x)
        return x if isinstance(u, np.ndarray) else float(x)


Marginal = Union[UniformInterval, PiecewiseCdf]


@dataclass(frozen=True)
class ProductMeasure:
    """Independent per-coordinate marginals defining a measure on R^n."""

    marginals: tuple[Marginal, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "marginals", tuple(self.marginals))
        if not self.marginals:
            raise InputError("product measure needs at least one marginal")

    @property
    def dimension(self) -> int:
        return len(self.marginals)

    @classmethod
    def uniform(
        cls, lower: Sequence[float], upper: Sequence[float]
    ) -> "ProductMeasure":
        """Uniform measure on the box spanned by lower and upper."""
        if len(lower) != len(upper):
            raise InputError("uniform support vectors disagree in length")
        return cls(tuple(UniformInterval(a, b) for a, b in zip(lower, upper)))

    def interval_probability(self, k: int, lo: float, hi: float) -> float:
        """Probability mass of [lo, hi] on coordinate k, clamped at zero."""
        marginal = self.marginals[k]
        return max(0.0, marginal.cdf(hi) - marginal.cdf(lo))

    def rect_probability(
        self, lower: Sequence[float], upper: Sequence[float]
    ) -> float:
        """Probability of the box with the given vertices.

        Inverted or zero-width coordinates contribute zero, so empty
        candidate intersections come out as probability 0 without any
        special casing.
        """
        if len(lower) != self.dimension or len(upper) != self.dimension:
            raise InputError(
                f"vertex length does not match measure dimension {self.dimension}"
            )
        p = 1.0
        for k in range(self.dimension):
            p *= self.interval_probability(k, lower[k], upper[k])
            if p == 0.0:
                return 0.0
        return p

    def box_probability(self, box: Box) -> float:
        """Probability of the box under this measure."""
        return self.rect_probability(box.lower, box.upper)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """size-by-n array of points drawn by per-coordinate inverse transform."""
        u = rng.random((size, self.dimension))
        cols = [
            np.asarray(marginal.ppf(u[:, k]), dtype=float)
            for k, marginal in enumerate(self.marginals)
        ]
        return np.column_stack(cols)
