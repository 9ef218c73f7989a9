"""Pivot-algorithm Markov chain on fixed-length SAWs.

Three ensembles: free walks in the plane, walks confined to the closed
upper half-plane (start pinned at the origin), and walks whose middle
bond is pinned to the vertical bond (0,0)-(0,1).  The production chain
lives in compiled kernels; a slow pure-Python reference implementation
with identical semantics is kept here for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lattice import SYMMETRIES, Walk, WalkContext, apply_symmetry, is_self_avoiding

ENSEMBLES = {"free": kernels.FREE, "halfplane": kernels.HALFPLANE, "midbond": kernels.MIDBOND}

DEFAULT_EQUILIBRATION_FACTOR = 20


@dataclass(frozen=True)
class EnsembleConstraint:
    kind: str  # free | halfplane | midbond

    def __post_init__(self):
        if self.kind not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.kind!r}")

    @property
    def code(self) -> int:
        return ENSEMBLES[self.kind]

    def initial_walk(self, n_steps: int) -> np.ndarray:
        """Straight-rod initial state satisfying the constraint."""
        if self.kind == "midbond":
            if n_steps % 2 != 1:
                raise ValueError("midbond ensemble needs an odd number of steps")
            n = n_steps // 2
            ys = np.arange(-n, n + 2, dtype=np.int64)
            pts = np.zeros((n_steps + 1, 2), dtype=np.int64)
            pts[:, 1] = ys
            return pts
        pts = np.zeros((n_steps + 1, 2), dtype=np.int64)
        pts[:, 0] = np.arange(n_steps + 1, dtype=np.int64)
        return pts

    def satisfied_by(self, points: np.ndarray) -> bool:
        pts = np.asarray(points, dtype=np.int64)
        if self.kind == "halfplane":
            return bool(np.all(pts[:, 1] >= 0)) and tuple(pts[0]) == (0, 0)
        if self.kind == "midbond":
            mid = (len(pts) - 1) // 2
            return tuple(pts[mid]) == (0, 0) and tuple(pts[mid + 1]) == (0, 1)
        return True


@dataclass
class ChainState:
    walk: Walk
    seed: int
    step_counter: int = 0
    accept_counter: int = 0


def _seed_int(seed) -> int:
    """Derive a 32-bit stream seed (SeedSequence handles spawning upstream)."""
    return int(np.random.SeedSequence(seed).generate_state(1, np.uint32)[0])


class PivotChain:
    """Stateful chain around the compiled kernels.

    The compiled RNG state is process-global: interleaving advances of two
    chains in one process is valid MCMC but not stream-reproducible.  The
    production estimators run one chain per (process, seed) and stay
    deterministic.
    """

    def __init__(self, n_steps: int, ensemble: str = "free", seed=None,
                 delta: float = 1.0, initial: np.ndarray | None = None):
        self.constraint = EnsembleConstraint(ensemble)
        self.n_steps = n_steps
        self.delta = delta
        pts = self.constraint.initial_walk(n_steps) if initial is None \
            else np.array(initial, dtype=np.int64)
        if not is_self_avoiding(pts) or not self.constraint.satisfied_by(pts):
            raise ValueError("initial walk violates the ensemble constraint")
        self.pts = pts
        cap = 1
        while cap < 4 * (n_steps + 1):
            cap *= 2
        # interleaved (key, index) pairs, one pair per slot
        self.table = np.empty(2 * cap, dtype=np.int64)
        self.meta = np.array([cap - 1, 0, 0, 0], dtype=np.int64)
        kernels._rebuild(self.pts, self.table, self.meta)
        self.scratch = np.empty_like(self.pts)
        self.seed = _seed_int(seed)
        self._seeded = False
        self.step_counter = 0
        self.accept_counter = 0

    def _state_args(self):
        return (self.pts, self.table, self.meta, self.scratch)

    def _take_seed(self) -> int:
        if self._seeded:
            return -1
        self._seeded = True
        return self.seed

    def advance(self, n_attempts: int) -> int:
        acc = kernels.run_chain(*self._state_args(), n_attempts,
                                self.constraint.code, self._take_seed())
        self.step_counter += n_attempts
        self.accept_counter += acc
        return acc

    def equilibrate(self, n_attempts: int | None = None) -> int:
        if n_attempts is None:
            n_attempts = DEFAULT_EQUILIBRATION_FACTOR * self.n_steps
        return self.advance(n_attempts)

    @property
    def sigma(self) -> int:
        """Accumulated global symmetry of the free-ensemble representation."""
        return int(self.meta[2])

    @property
    def walk(self) -> Walk:
        pts = self.pts
        if self.constraint.kind == "free":
            # fold the global register back in; start at the origin
            pts = (pts - pts[0]) @ SYMMETRIES[self.sigma].T
        return Walk(np.ascontiguousarray(pts), WalkContext(delta=self.delta, n_steps=self.n_steps))

    def samples(self, n_samples: int, stride: int):
        """Yield Walk snapshots separated by ``stride`` attempted pivots."""
        if stride < 1:
            raise ValueError("stride must be >= 1")
        for _ in range(n_samples):
            self.advance(stride)
            yield self.walk


def run_chain(initial, constraint, n_samples: int, stride: int,
              equilibration: int = 0, seed=None, delta: float = 1.0):
    """Stream n_samples walks from the pivot chain (spec-level entry point)."""
    if isinstance(constraint, str):
        constraint = EnsembleConstraint(constraint)
    if isinstance(initial, Walk):
        pts, delta = initial.points, initial.context.delta
    elif isinstance(initial, int):
        pts = None
        n_steps = initial
    else:
        pts = np.asarray(initial, dtype=np.int64)
    if pts is not None:
        n_steps = len(pts) - 1
    chain = PivotChain(n_steps, constraint.kind, seed=seed, delta=delta, initial=pts)
    if equilibration:
        chain.advance(equilibration)
    yield from chain.samples(n_samples, stride)


# ---------------------------------------------------------------------------
# pure-Python reference implementation (oracle for the compiled chain)


def pivot_step(points: np.ndarray, constraint: EnsembleConstraint, rng: np.random.Generator):
    """One reference pivot attempt; returns (points, accepted).

    Same chain as the compiled kernels: a tail pivot at a uniform site in
    0..N-1 with a uniform non-identity symmetry (for the midbond ensemble,
    a tail pivot within either anchored half).  Implemented independently
    with plain sets; the compiled chain's shorter-side/global-register
    optimization for free walks is deliberately absent here.
    """
    pts = np.asarray(points, dtype=np.int64)
    n = len(pts) - 1
    s = int(rng.integers(1, 8))
    if constraint.kind == "midbond":
        i = int(rng.integers(1, n))
        mid = n // 2
        moving = range(0, i) if i <= mid else range(i + 1, n + 1)
    else:
        i = int(rng.integers(0, n))
        moving = range(i + 1, n + 1)
    moving = list(moving)
    fixed = sorted(set(range(n + 1)) - set(moving))

    new_pts = pts.copy()
    new_pts[moving] = apply_symmetry(pts[moving], s, pts[i])
    if constraint.kind == "halfplane" and np.any(new_pts[:, 1] < 0):
        return pts, False
    fixed_set = set(map(tuple, pts[fixed].tolist()))
    moved_set = set(map(tuple, new_pts[moving].tolist()))
    if fixed_set & moved_set:
        return pts, False
    return new_pts, True


# ---------------------------------------------------------------------------
# fast mutual-avoidance check on walk fragments


def naive_self_avoidance_check(frag_a: np.ndarray, frag_b: np.ndarray) -> bool:
    """True iff the two point sets are disjoint (plain set intersection)."""
    a = set(map(tuple, np.asarray(frag_a).tolist()))
    b = set(map(tuple, np.asarray(frag_b).tolist()))
    return not (a & b)


def fast_self_avoidance_check(frag_a: np.ndarray, frag_b: np.ndarray) -> bool:
    """Hierarchical bounding-box disjointness test on two walk fragments.

    Walk fragments are spatially coherent, so halving them keeps the boxes
    tight; disjoint boxes are accepted without any point comparison.
    Bit-exact agreement with the naive set check.
    """
    a = np.asarray(frag_a, dtype=np.int64)
    b = np.asarray(frag_b, dtype=np.int64)

    def rec(a, b):
        if len(a) == 0 or len(b) == 0:
            return True
        if (a[:, 0].max() < b[:, 0].min() or b[:, 0].max() < a[:, 0].min()
                or a[:, 1].max() < b[:, 1].min() or b[:, 1].max() < a[:, 1].min()):
            return True
        if len(a) <= 16 and len(b) <= 16:
            return naive_self_avoidance_check(a, b)
        if len(a) >= len(b):
            h = len(a) // 2
            return rec(a[:h], b) and rec(a[h:], b)
        h = len(b) // 2
        return rec(a, b[:h]) and rec(a, b[h:])

    return rec(a, b)


# ---------------------------------------------------------------------------
# naive O(N)-per-attempt chain, kept as the benchmark baseline


def run_naive_chain(n_steps: int, ensemble: str, n_attempts: int, seed=None):
    """Reference chain doing a from-scratch occupancy check per attempt.

    Returns (points, accepts).  Only used to calibrate the speedup of the
    incremental chain; the two are statistically identical.
    """
    constraint = EnsembleConstraint(ensemble)
    rng = np.random.default_rng(seed)
    pts = constraint.initial_walk(n_steps)
    acc = 0
    for _ in range(n_attempts):
        pts, ok = pivot_step(pts, constraint, rng)
        acc += ok
    return pts, acc
