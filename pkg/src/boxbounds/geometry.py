"""Axis-aligned boxes and the coordinate-wise vertex comparison test."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import InputError


class EmptinessMode(Enum):
    """Which notion of "empty" a candidate intersection is tested against.

    CLOSED treats boxes as closed point sets, so touching faces still
    intersect.  POSITIVE_MEASURE requires strictly positive width in every
    coordinate; under continuous marginals a shared face carries zero
    probability, so it is screened out.
    """

    CLOSED = "closed"
    POSITIVE_MEASURE = "positive-measure"


@dataclass(frozen=True)
class Box:
    """A hyperrectangle stored as its lower and upper vertex.

    A valid box has lower[k] <= upper[k] in every coordinate; zero-width
    coordinates are allowed and describe degenerate boxes.
    """

    id: str
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper):
            raise InputError(
                f"box {self.id!r}: lower has {len(lower)} coordinates, "
                f"upper has {len(upper)}"
            )
        if not lower:
            raise InputError(f"box {self.id!r}: needs at least one coordinate")
        for k, (lo, hi) in enumerate(zip(lower, upper)):
            if not lo <= hi:  # also rejects NaN
                raise InputError(
                    f"box {self.id!r}: lower {lo!r} exceeds upper {hi!r} "
                    f"in coordinate {k}"
                )

    @property
    def dimension(self) -> int:
        return len(self.lower)


def require_same_dimension(boxes: Sequence[Box]) -> int:
    """Common dimension of the boxes (0 for an empty list)."""
    dims = {box.dimension for box in boxes}
    if len(dims) > 1:
        raise InputError(f"boxes have mixed dimensions {sorted(dims)}")
    return dims.pop() if dims else 0


def meet_vertices(
    boxes: Sequence[Box],
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Candidate intersection vertices: max of lowers, min of uppers.

    No emptiness filtering happens here, so the result may have
    lower > upper in some coordinate.  Useful for rendering verdict tables
    that show the candidate even when it is empty.
    """
    if not boxes:
        raise InputError("meet_vertices: need at least one box")
    n = require_same_dimension(boxes)
    lower = tuple(max(box.lower[k] for box in boxes) for k in range(n))
    upper = tuple(min(box.upper[k] for box in boxes) for k in range(n))
    return lower, upper


def vertex_pair_nonempty(
    lower: Sequence[float], upper: Sequence[float], mode: EmptinessMode
) -> bool:
    """Decide nonemptiness of the box with the given vertices.

    CLOSED asks for lower[k] <= upper[k] everywhere, POSITIVE_MEASURE for
    strict inequality everywhere.
    """
    if mode is EmptinessMode.CLOSED:
        return all(lo <= hi for lo, hi in zip(lower, upper))
    return all(lo < hi for lo, hi in zip(lower, upper))


def intersect(boxes: Sequence[Box]) -> Box | None:
    """Intersection of the boxes, or None when it is empty as a point set.

    The result's id concatenates the input ids in input order.  The result
    may be degenerate (zero width in some coordinate); callers that care
    about positive measure should test it with is_nonempty.
    """
    lower, upper = meet_vertices(boxes)
    if not vertex_pair_nonempty(lower, upper, EmptinessMode.CLOSED):
        return None
    return Box("".join(box.id for box in boxes), lower, upper)


def is_nonempty(box: Box | None, mode: EmptinessMode) -> bool:
    """True when the box is nonempty under the given mode; None counts as empty."""
    if box is None:
        return False
    return vertex_pair_nonempty(box.lower, box.upper, mode)
