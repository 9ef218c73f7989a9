"""Exhaustive enumeration of short self-avoiding walks.

Serves as the exact ground truth for the Markov chain: walk counts c_N,
midbond counts d_N, and exact line-survival fractions a_N(l, theta)/c_N.
Everything here is integer-exact; fractions are returned as
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import DegenerateTouch, Line

# Known reference values.
MU_HEXAGONAL = math.sqrt(2.0 + math.sqrt(2.0))
# Numerical estimate for the square lattice (no closed form is known).
MU_SQUARE_ESTIMATE = 2.63815853

DEFAULT_CAP = 16

_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass
class EnumerationResult:
    n_steps: int
    count: int
    accumulator: object = None


def _check_cap(n_steps: int, cap: int):
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if n_steps > cap:
        raise ValueError(
            f"n_steps={n_steps} exceeds cap={cap}; "
            f"at most 4*3^(N-1) = {4 * 3 ** (n_steps - 1)} walks would be visited"
        )


def _dfs(path, occupied, remaining, visitor):
    if remaining == 0:
        if visitor is not None:
            visitor(path)
        return 1
    x, y = path[-1]
    total = 0
    for dx, dy in _STEPS:
        p = (x + dx, y + dy)
        if p in occupied:
            continue
        path.append(p)
        occupied.add(p)
        total += _dfs(path, occupied, remaining - 1, visitor)
        occupied.remove(p)
        path.pop()
    return total


def enumerate_saws(n_steps: int, visitor=None, cap: int = DEFAULT_CAP) -> EnumerationResult:
    """Visit every distinct N-step SAW starting at the origin.

    ``visitor``, if given, is called once per walk with the list of points
    (do not retain the list; copy if needed).  Returns the exact count c_N.
    """
    _check_cap(n_steps, cap)
    count = _dfs([(0, 0)], {(0, 0)}, n_steps, visitor)
    return EnumerationResult(n_steps=n_steps, count=count)


def enumerate_saws_reduced(n_steps: int, cap: int = DEFAULT_CAP) -> EnumerationResult:
    """Symmetry-reduced count: fix the first step east, multiply by 4.

    Rotation by 90 degrees permutes walks by their first step, so the four
    first-step classes have equal size.  Independent of enumerate_saws'
    search order, which is the point of having both.
    """
    _check_cap(n_steps, cap)
    if n_steps == 1:
        return EnumerationResult(1, 4)
    count = _dfs([(0, 0), (1, 0)], {(0, 0), (1, 0)}, n_steps - 1, None)
    return EnumerationResult(n_steps=n_steps, count=4 * count)


def saw_counts(n_max: int, cap: int = DEFAULT_CAP) -> list[int]:
    """c_1..c_{n_max} by a single depth-first sweep."""
    _check_cap(n_max, cap)
    counts = [0] * (n_max + 1)

    def sweep(path, occupied, depth):
        if depth > 0:
            counts[depth] += 1
        if depth == n_max:
            return
        x, y = path[-1]
        for dx, dy in _STEPS:
            p = (x + dx, y + dy)
            if p in occupied:
                continue
            path.append(p)
            occupied.add(p)
            sweep(path, occupied, depth + 1)
            occupied.remove(p)
            path.pop()

    sweep([(0, 0)], {(0, 0)}, 0)
    return counts[1:]


def midbond_count(n_steps: int, cap: int = DEFAULT_CAP) -> int:
    """d_N: walks with N=2n+1 steps whose middle bond is (0,0)-(0,1).

    Counted directly by gluing two independent n-step halves attached to
    (0,0) and (0,1) and keeping the mutually avoiding pairs; serves as a
    cross-check of d_N = c_N / 2.  The generator pins the traversal
    direction, so both orientations of the middle bond contribute a
    factor 2 (walk reversal is the bijection).
    """
    return 2 * sum(1 for _ in enumerate_midbond_walks(n_steps, cap=cap))


def enumerate_midbond_walks(n_steps: int, cap: int = DEFAULT_CAP):
    """Yield point lists of all N=2n+1 step walks pinned at the middle bond.

    The walk is ordered so points[n] = (0,0) and points[n+1] = (0,1).
    """
    if n_steps % 2 != 1:
        raise ValueError("midbond ensemble needs an odd number of steps")
    _check_cap(n_steps, cap)
    n = n_steps // 2

    lowers = []

    def grow(path, occupied, remaining, sink):
        if remaining == 0:
            sink(list(path))
            return
        x, y = path[-1]
        for dx, dy in _STEPS:
            p = (x + dx, y + dy)
            if p in occupied:
                continue
            path.append(p)
            occupied.add(p)
            grow(path, occupied, remaining - 1, sink)
            occupied.remove(p)
            path.pop()

    # lower half grows from (0,0), forbidden to touch (0,1)
    grow([(0, 0)], {(0, 0), (0, 1)}, n, lowers.append)
    uppers = []
    grow([(0, 1)], {(0, 0), (0, 1)}, n, uppers.append)

    for lo in lowers:
        lo_set = set(lo)
        for up in uppers:
            if lo_set.isdisjoint(up[1:]):
                yield lo[::-1] + up


def enumerate_halfplane_walks(n_steps: int, cap: int = DEFAULT_CAP):
    """Yield point lists of all N-step walks from the origin with y >= 0."""
    _check_cap(n_steps, cap)
    out = []

    def grow(path, occupied, remaining):
        if remaining == 0:
            out.append(list(path))
            return
        x, y = path[-1]
        for dx, dy in _STEPS:
            p = (x + dx, y + dy)
            if p[1] < 0 or p in occupied:
                continue
            path.append(p)
            occupied.add(p)
            grow(path, occupied, remaining - 1)
            occupied.remove(p)
            path.pop()

    grow([(0, 0)], {(0, 0)}, n_steps)
    return out


def estimate_mu(counts) -> dict:
    """Connective-constant estimates from a sequence c_1, c_2, ...

    Returns the consecutive ratios c_{N+1}/c_N and the root sequence
    c_N^(1/N).
    """
    counts = list(counts)
    if len(counts) < 2:
        raise ValueError("need at least two consecutive counts")
    ratios = [counts[i + 1] / counts[i] for i in range(len(counts) - 1)]
    roots = [counts[i] ** (1.0 / (i + 1)) for i in range(len(counts))]
    return {"ratios": ratios, "roots": roots}


def exact_line_survival(n_steps: int, thetas, offsets, cap: int = DEFAULT_CAP) -> dict:
    """Exact a_N(l, theta)/c_N over a grid of lines.

    Walks are enumerated from the origin (the paper's ending-at-origin
    walks, reversed).  A grid point whose line passes through a reachable
    lattice site is degenerate and excluded with a ValueError naming it.
    Returns {(l, theta): Fraction(a_N, c_N)}.
    """
    _check_cap(n_steps, cap)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    offsets = np.atleast_1d(np.asarray(offsets, dtype=np.float64))
    lines = [(float(l), float(t), Line.through_offset(t, l))
             for t in thetas for l in offsets]

    survivors = {key[:2]: 0 for key in lines}
    total = 0
    touch_tol = 1e-12

    normals = np.array([ln.normal for _, _, ln in lines])
    points = np.array([ln.point for _, _, ln in lines])

    def visit(path):
        nonlocal total
        total += 1
        pts = np.asarray(path, dtype=np.float64)
        # signed distances of all walk sites to all lines at once
        d = (pts[:, None, :] - points[None, :, :])
        s = d[..., 0] * normals[None, :, 0] + d[..., 1] * normals[None, :, 1]
        if np.any(np.abs(s) <= touch_tol):
            bad = np.flatnonzero(np.any(np.abs(s) <= touch_tol, axis=0))[0]
            l, t = lines[bad][:2]
            raise DegenerateTouch(
                f"line (l={l}, theta={t}) passes through a walk site; exclude it from the grid")
        crossed = np.any(s[:-1, :] * s[1:, :] < 0, axis=0)
        for (l, t, _), c in zip(lines, crossed):
            if not c:
                survivors[(l, t)] += 1

    enumerate_saws(n_steps, visit, cap=cap)
    return {key: Fraction(v, total) for key, v in survivors.items()}
