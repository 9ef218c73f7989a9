"""Random-walk loop measure, lambda-weighted SAWs, and loop erasure.

The rooted loop measure gives a closed nearest-neighbor path of length n
weight 4^{-n}/n.  For a finite domain A the total measure of loops
staying in A is -log det(I - P_A), with P_A the transition matrix of
simple random walk killed on leaving A; truncating the sum over lengths
gives an independent oracle with a rigorous spectral tail bound.

A lambda-weighted SAW gives a walk omega the weight
q(omega) = beta^{|omega|} exp(-(c/2) m_D(omega)), where m_D(omega) is
the measure of loops in D that meet omega.  At c = -2, beta = 1/4 this
reproduces the loop-erased random walk exactly: the endpoint-resolved
partition function equals discrete harmonic measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels

# numerical estimate of the square-lattice connective constant; the
# critical fugacity 1/mu for SAW weights (the RW/LERW case uses exact 1/4)
DEFAULT_BETA_SAW = 1.0 / 2.63815853
BETA_RW = 0.25

# E, W, N, S: order shared with the compiled LERW sampler
DIRECTIONS = ((1, 0), (-1, 0), (0, 1), (0, -1))
DIRECTION_NAMES = ("E", "W", "N", "S")

MAX_DENSE_SITES = 1000
MAX_ENUMERATION_SITES = 26


@dataclass(frozen=True)
class FiniteDomain:
    """A finite connected set of interior sites of the square lattice."""

    sites: tuple  # sorted tuple of (x, y)

    def __post_init__(self):
        sites = tuple(sorted(set(map(tuple, self.sites))))
        object.__setattr__(self, "sites", sites)
        if not sites:
            raise ValueError("domain must contain at least one site")
        if not self._connected():
            raise ValueError("domain interior must be connected")

    def _connected(self) -> bool:
        sset = set(self.sites)
        seen = {self.sites[0]}
        frontier = [self.sites[0]]
        while frontier:
            x, y = frontier.pop()
            for dx, dy in DIRECTIONS:
                p = (x + dx, y + dy)
                if p in sset and p not in seen:
                    seen.add(p)
                    frontier.append(p)
        return len(seen) == len(sset)

    @classmethod
    def rectangle(cls, width: int, height: int, corner=(0, 0)) -> "FiniteDomain":
        x0, y0 = corner
        return cls(tuple((x0 + i, y0 + j)
                         for i in range(width) for j in range(height)))

    @property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.sites)}

    def __len__(self):
        return len(self.sites)

    def __contains__(self, site):
        return tuple(site) in set(self.sites)

    def without(self, removed) -> "FiniteDomain | None":
        """Domain minus a set of sites; None if nothing is left.

        The remainder may be disconnected; it is returned as a plain site
        tuple wrapped per connected component for the loop measure, which
        is additive over components.
        """
        rest = [s for s in self.sites if s not in set(map(tuple, removed))]
        return tuple(rest) if rest else None

    def adjacency(self) -> np.ndarray:
        idx = self.index
        a = np.zeros((len(self.sites), len(self.sites)), dtype=np.int64)
        for s in self.sites:
            for dx, dy in DIRECTIONS:
                t = (s[0] + dx, s[1] + dy)
                if t in idx:
                    a[idx[s], idx[t]] = 1
        return a

    def boundary_edges(self):
        """(site, direction_index) pairs stepping out of the domain."""
        idx = self.index
        out = []
        for s in self.sites:
            for d, (dx, dy) in enumerate(DIRECTIONS):
                if (s[0] + dx, s[1] + dy) not in idx:
                    out.append((s, d))
        return out


@dataclass(frozen=True)
class LoopMeasureValue:
    value: float
    method: str  # 'determinant' | 'truncated_enumeration(L)'
    tail_bound: float | None = None

    def __post_init__(self):
        if self.value < -1e-12:
            raise ValueError("loop measure cannot be negative")


def _adjacency_of(sites) -> np.ndarray:
    idx = {s: i for i, s in enumerate(sites)}
    a = np.zeros((len(sites), len(sites)), dtype=np.int64)
    for s in sites:
        for dx, dy in DIRECTIONS:
            t = (s[0] + dx, s[1] + dy)
            if t in idx:
                a[idx[s], idx[t]] = 1
    return a


def _site_tuple(domain):
    if isinstance(domain, FiniteDomain):
        return domain.sites
    return tuple(sorted(set(map(tuple, domain))))


def loop_measure_in_domain(domain) -> LoopMeasureValue:
    """Total rooted loop measure of loops staying in the domain.

    Computed as -log det(I - P) with P = adjacency/4.  The spectral
    radius of P is < 1 for any proper subdomain, so I - P is never
    singular.  Accepts a FiniteDomain or a bare site collection (which
    may be disconnected; the measure is additive over components).
    """
    sites = _site_tuple(domain)
    if not sites:
        return LoopMeasureValue(0.0, "determinant")
    if len(sites) > MAX_DENSE_SITES:
        raise ValueError("domain too large for dense linear algebra")
    a = _adjacency_of(sites)
    m = np.eye(len(sites)) - a / 4.0
    sign, logdet = np.linalg.slogdet(m)
    assert sign > 0, "I - P must be positive definite on a proper subdomain"
    return LoopMeasureValue(max(-logdet, 0.0), "determinant")


def loop_measure_truncated(domain, max_length: int) -> LoopMeasureValue:
    """Loop measure from lengths <= max_length, with a spectral tail bound.

    The length-n contribution tr(A^n)/(4^n n) is computed in exact
    integer arithmetic; the neglected tail is at most
    n_sites * lam^{L+1} / ((L+1)(1-lam)) with lam an upper bound on the
    spectral radius of P.
    """
    sites = _site_tuple(domain)
    a = _adjacency_of(sites)
    total = Fraction(0)
    power = np.eye(len(sites), dtype=object)
    amat = a.astype(object)
    for n in range(1, max_length + 1):
        power = power @ amat
        total += Fraction(int(np.trace(power)), 4 ** n * n)
    lam = float(np.max(np.abs(np.linalg.eigvalsh(a / 4.0)))) if len(sites) else 0.0
    lam = min(lam + 1e-12, 1.0 - 1e-12)  # guard the rounding of eigvalsh
    tail = len(sites) * lam ** (max_length + 1) / ((max_length + 1) * (1.0 - lam))
    return LoopMeasureValue(float(total), f"truncated_enumeration({max_length})",
                            tail_bound=tail)


def loop_weight_of_walk(domain, walk_sites) -> float:
    """m_D(omega): measure of loops in the domain meeting the walk.

    Difference of the total measures of the domain and of the domain with
    the walk's sites removed.
    """
    sites = _site_tuple(domain)
    removed = set(map(tuple, walk_sites))
    rest = tuple(s for s in sites if s not in removed)
    whole = loop_measure_in_domain(sites).value
    remainder = loop_measure_in_domain(rest).value if rest else 0.0
    return whole - remainder


def loop_erase(path):
    """Chronological loop erasure of a nearest-neighbor path."""
    pts = [tuple(p) for p in path]
    out = []
    pos = {}
    for p in pts:
        if p in pos:
            for q in out[pos[p] + 1:]:
                del pos[q]
            del out[pos[p] + 1:]
        else:
            pos[p] = len(out)
            out.append(p)
    return out


def _green_matrix(domain: FiniteDomain) -> np.ndarray:
    """G = (I - P)^{-1}: expected visits of killed random walk."""
    a = domain.adjacency()
    return np.linalg.inv(np.eye(len(domain)) - a / 4.0)


def discrete_harmonic_measure(domain: FiniteDomain, origin) -> dict:
    """Exit-edge distribution of simple random walk from the origin.

    Returns {(site, direction_index): probability}; the walk exits
    through edge (a, d) with probability G(origin, a)/4.
    """
    origin = tuple(origin)
    idx = domain.index
    if origin not in idx:
        raise ValueError("origin must be an interior site")
    g = _green_matrix(domain)
    row = g[idx[origin]]
    return {(s, d): row[idx[s]] / 4.0 for s, d in domain.boundary_edges()}


def lambda_partition_function(domain: FiniteDomain, c: float, beta: float,
                              origin=(0, 0), endpoint_resolved: bool = False):
    """Z = sum of q(omega) over SAWs from the origin to the boundary.

    A walk visits interior sites omega_0 = origin, ..., omega_k and ends
    with one step out of the domain; its length |omega| = k + 1 counts
    that exit step.  q(omega) = beta^{|omega|} exp(-(c/2) m_D(omega)).

    The loop-measure factor is accumulated along the depth-first search
    by the telescoping identity m_D(omega) = sum_j log G_{D_j}(w_j, w_j)
    with D_j the domain minus the first j sites; each step updates the
    Green matrix by a rank-one (Schur complement) elimination of the new
    site.  With endpoint_resolved=True the return value is
    {(last interior site, direction_index): mass} instead of the total.
    """
    origin = tuple(origin)
    idx = domain.index
    if origin not in idx:
        raise ValueError("origin must be an interior site")
    if len(domain) > MAX_ENUMERATION_SITES:
        raise ValueError("domain too large for exhaustive SAW enumeration")

    g0 = _green_matrix(domain)
    resolved: dict = {}
    total = 0.0
    half_c = 0.5 * c

    def dfs(site, g, log_loop, length, visited):
        nonlocal total
        i = idx[site]
        # factor for occupying `site`, then eliminate it from the domain
        log_loop = log_loop + math.log(g[i, i])
        g = g - np.outer(g[:, i], g[i, :]) / g[i, i]
        for d, (dx, dy) in enumerate(DIRECTIONS):
            nxt = (site[0] + dx, site[1] + dy)
            if nxt not in idx:
                w = beta ** (length + 1) * math.exp(-half_c * log_loop)
                total += w
                if endpoint_resolved:
                    key = (site, d)
                    resolved[key] = resolved.get(key, 0.0) + w
            elif nxt not in visited:
                visited.add(nxt)
                dfs(nxt, g, log_loop, length + 1, visited)
                visited.remove(nxt)

    dfs(origin, g0, 0.0, 0, {origin})
    return resolved if endpoint_resolved else total


def lerw_exit_distribution(domain: FiniteDomain, origin, n_samples: int,
                           seed: int) -> dict:
    """Sampled exit-edge law of loop-erased random walk from the origin.

    Chronological erasure does not move the endpoint, so the exit edge of
    the loop-erased path is the exit edge of the underlying random walk;
    the compiled sampler maintains the erased path incrementally.
    Returns {(site, direction_index): frequency}.
    """
    origin = tuple(origin)
    sites = domain.sites
    xs = [s[0] for s in sites]
    ys = [s[1] for s in sites]
    x0, y0 = min(xs), min(ys)
    grid = np.full((max(xs) - x0 + 1, max(ys) - y0 + 1), -1, dtype=np.int64)
    for i, (x, y) in enumerate(sites):
        grid[x - x0, y - y0] = i
    counts = np.zeros((len(sites), 4), dtype=np.int64)
    kernels.sample_lerw_exits(grid, origin[0] - x0, origin[1] - y0,
                              n_samples, counts, seed)
    return {(s, d): counts[i, d] / n_samples
            for i, s in enumerate(sites) for d in range(4)
            if counts[i, d] > 0}


def cutcurve_weights(walk_points, inner: FiniteDomain, full: FiniteDomain,
                     c: float, beta: float) -> tuple:
    """(q1, q2) of a walk crossing the inner domain's boundary once.

    The walk must cross between ``inner`` and its complement through
    exactly one bond, splitting into an inner piece and an outer piece.
    q1 weighs the loops of the whole ambient domain ``full`` against the
    whole walk; q2 treats the two pieces separately in ``inner`` and in
    full minus inner.  For c = 0 both reduce to beta^{|omega|}.
    """
    pts = [tuple(p) for p in np.asarray(walk_points)]
    inner_set = set(inner.sites)
    full_set = set(full.sites)
    if not set(pts) <= full_set:
        raise ValueError("walk leaves the ambient domain")
    if not inner_set <= full_set:
        raise ValueError("inner domain must sit inside the ambient domain")
    flags = [p in inner_set for p in pts]
    crossings = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
    if crossings != 1:
        raise ValueError(f"walk crosses the boundary {crossings} times, need exactly 1")

    n_steps = len(pts) - 1
    inner_piece = [p for p in pts if p in inner_set]
    outer_piece = [p for p in pts if p not in inner_set]
    outer_domain = full.without(inner.sites)  # may be disconnected; fine
    q_base = beta ** n_steps
    q1 = q_base * math.exp(-0.5 * c * loop_weight_of_walk(full, pts))
    q2 = q_base * math.exp(-0.5 * c * (loop_weight_of_walk(inner, inner_piece)
                                       + loop_weight_of_walk(outer_domain, outer_piece)))
    return q1, q2
