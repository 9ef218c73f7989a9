"""Square-lattice geometry primitives.

Walks live on the integer lattice; the physical scale enters only through
the lattice spacing ``delta`` when a geometric predicate needs real
coordinates.  All predicates that can produce an ambiguous answer at
floating-point resolution raise :class:`DegenerateTouch` so the caller can
reject the sample and redraw.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Tolerance for "a lattice point sits exactly on the test curve", measured
# in units of the lattice spacing.
TOUCH_TOL = 1e-12

# The 8 elements of the square-lattice point group as integer matrices.
# Index 0 is the identity; indices 1..7 are the non-trivial elements used
# as pivot moves.
SYMMETRIES = np.array(
    [
        [[1, 0], [0, 1]],     # identity
        [[0, -1], [1, 0]],    # rotation +90
        [[-1, 0], [0, -1]],   # rotation 180
        [[0, 1], [-1, 0]],    # rotation -90
        [[1, 0], [0, -1]],    # reflect in x-axis
        [[-1, 0], [0, 1]],    # reflect in y-axis
        [[0, 1], [1, 0]],     # reflect in diagonal y=x
        [[0, -1], [-1, 0]],   # reflect in diagonal y=-x
    ],
    dtype=np.int64,
)

UNIT_STEPS = np.array([[1, 0], [-1, 0], [0, 1], [0, -1]], dtype=np.int64)


class DegenerateTouch(Exception):
    """A lattice point lies on the test line/curve within tolerance.

    The crossing count is undefined for such configurations; callers
    reject the sample and redraw the continuously distributed offset.
    """


@dataclass(frozen=True)
class LatticePoint:
    x: int
    y: int

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class WalkContext:
    """Physical context of a walk: spacing ``delta`` and step count."""

    delta: float = 1.0
    n_steps: int = 0

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @classmethod
    def scaling(cls, n_steps: int, nu: float = 0.75) -> "WalkContext":
        """Context with the cut-curve convention delta = N**-nu."""
        return cls(delta=float(n_steps) ** (-nu), n_steps=n_steps)


@dataclass(frozen=True)
class Walk:
    """An N-step self-avoiding walk as an (N+1, 2) integer point array."""

    points: np.ndarray
    context: WalkContext = field(default_factory=WalkContext)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        object.__setattr__(self, "points", pts)
        if not is_self_avoiding(pts):
            raise ValueError("points do not form a self-avoiding walk")

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def physical(self) -> np.ndarray:
        return self.points * self.context.delta


@dataclass(frozen=True)
class Bond:
    a: tuple
    b: tuple

    def __post_init__(self):
        dx = abs(self.a[0] - self.b[0])
        dy = abs(self.a[1] - self.b[1])
        if dx + dy != 1:
            raise ValueError(f"bond endpoints {self.a}, {self.b} are not nearest neighbors")

    @property
    def orientation(self) -> str:
        return "h" if self.a[1] == self.b[1] else "v"


@dataclass(frozen=True)
class Line:
    """Infinite line with polar angle ``theta`` through ``point``.

    theta is canonicalized to [0, pi); every quantity built on top of it
    has period pi (or pi/2), so nothing is lost.
    """

    theta: float
    point: tuple = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % math.pi)

    @classmethod
    def through_offset(cls, theta: float, offset: float) -> "Line":
        """Line at angle theta through (0, offset), the paper's L(theta, l)."""
        return cls(theta, (0.0, float(offset)))

    @property
    def normal(self) -> tuple:
        return (-math.sin(self.theta), math.cos(self.theta))

    def signed_distance(self, xy, delta: float = 1.0):
        """Signed distance of physical point(s) ``xy * delta`` from the line."""
        xy = np.asarray(xy, dtype=np.float64) * delta
        nx, ny = self.normal
        px, py = self.point
        return (xy[..., 0] - px) * nx + (xy[..., 1] - py) * ny


def steps_of(points: np.ndarray) -> np.ndarray:
    return np.diff(np.asarray(points, dtype=np.int64), axis=0)


def is_self_avoiding(points) -> bool:
    """True iff the point list is a valid SAW (distinct points).

    Raises ValueError when consecutive points are not nearest neighbors;
    that is malformed input, not a self-intersection.
    """
    pts = np.asarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError("expected an (n, 2) array of lattice points")
    if len(pts) > 1:
        d = np.abs(steps_of(pts)).sum(axis=1)
        if not np.all(d == 1):
            raise ValueError("consecutive points must be nearest neighbors")
    seen = set(map(tuple, pts.tolist()))
    return len(seen) == len(pts)


def apply_symmetry(points: np.ndarray, sym_index: int, pivot) -> np.ndarray:
    """Apply point-group element ``sym_index`` about ``pivot`` to lattice points."""
    pts = np.asarray(points, dtype=np.int64)
    pv = np.asarray(pivot, dtype=np.int64)
    return pv + (pts - pv) @ SYMMETRIES[sym_index].T


def transform_line(line: Line, sym_index: int, pivot=(0.0, 0.0)) -> Line:
    """Image of a line under a point-group element about a physical pivot."""
    m = SYMMETRIES[sym_index]
    pv = np.asarray(pivot, dtype=np.float64)
    p = pv + m @ (np.asarray(line.point, dtype=np.float64) - pv)
    # direction vector of the line, mapped through the symmetry
    d = m @ np.array([math.cos(line.theta), math.sin(line.theta)])
    return Line(math.atan2(d[1], d[0]), tuple(p))


def segment_crosses_line(bond: Bond, line: Line, delta: float = 1.0,
                         tol: float = TOUCH_TOL) -> bool:
    """True iff the closed physical segment of ``bond`` meets ``line``.

    Raises DegenerateTouch when an endpoint is within ``tol * delta`` of
    the line, where the answer is not well defined.
    """
    da = line.signed_distance(np.asarray(bond.a), delta)
    db = line.signed_distance(np.asarray(bond.b), delta)
    if abs(da) <= tol * delta or abs(db) <= tol * delta:
        raise DegenerateTouch(f"bond endpoint on line within tolerance: {bond}")
    return bool(da * db < 0)


def walk_line_crossings(walk, line: Line, delta: float | None = None,
                        tol: float = TOUCH_TOL):
    """Count bonds of ``walk`` crossing ``line``.

    Returns (count, ascending list of crossing bond indices).  Accepts a
    Walk or a raw point array; ``delta`` defaults to the walk context.
    """
    if isinstance(walk, Walk):
        pts = walk.points
        if delta is None:
            delta = walk.context.delta
    else:
        pts = np.asarray(walk, dtype=np.int64)
        if delta is None:
            delta = 1.0
    d = line.signed_distance(pts, delta)
    if np.any(np.abs(d) <= tol * delta):
        raise DegenerateTouch("walk site on line within tolerance")
    cross = d[:-1] * d[1:] < 0
    idx = np.flatnonzero(cross)
    return int(cross.sum()), idx.tolist()
