"""Continuum boundary densities and exponent maps.

The scaling-limit prediction for where a conditioned walk meets a cut
curve is a boundary density built from the restriction/SLE partition
function: uniform on the circle (full-plane walk), sin^{5/4} on the
semicircle (half-plane walk, one factor sin^{5/8} per walk arm), in both
cases multiplied by a lattice correction factor l(theta) when one is
supplied.  Angles are radians internally and degrees at the interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

QUAD_TOL = 1e-10

GEOMETRIES = ("disc_center", "halfplane_semicircle")


@dataclass(frozen=True)
class ExponentMap:
    """Central charge and the exponents it determines."""

    central_charge: float
    kappa: float
    b: float
    b_tilde: float
    d_dimension: float


def exponents_from_charge(c: float) -> ExponentMap:
    """Exponent set for central charge c <= 1.

    kappa = (13 - c - sqrt((13-c)^2 - 144)) / 3, the branch in (0, 4];
    b = (6-kappa)/(2 kappa); b_tilde = b (kappa-2)/4; d = 1 + kappa/8.
    """
    if c > 1:
        raise ValueError(f"central charge must be <= 1, got {c}")
    disc = (13.0 - c) ** 2 - 144.0
    kappa = (13.0 - c - math.sqrt(disc)) / 3.0
    b = (6.0 - kappa) / (2.0 * kappa)
    b_tilde = b * (kappa - 2.0) / 4.0
    return ExponentMap(central_charge=c, kappa=kappa, b=b,
                       b_tilde=b_tilde, d_dimension=1.0 + kappa / 8.0)


def periodic_interpolator(theta_deg, values, period: float = 90.0) -> Callable:
    """Linear interpolation of a tabulated periodic function of the angle.

    Input grid in degrees, ascending, covering one period (endpoint
    optional).  Returns f(theta_deg_array) with period wraparound.
    """
    grid = np.asarray(theta_deg, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64)
    if grid.ndim != 1 or grid.shape != vals.shape or len(grid) < 2:
        raise ValueError("need matching 1-d grids with at least two points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("theta grid must be strictly ascending")
    if grid[-1] - grid[0] >= period:
        raise ValueError("grid must cover at most one period")
    # close the period explicitly
    gx = np.concatenate([grid, [grid[0] + period]])
    gv = np.concatenate([vals, [vals[0]]])

    def f(theta):
        t = (np.asarray(theta, dtype=np.float64) - grid[0]) % period + grid[0]
        return np.interp(t, gx, gv)

    # kink locations, exposed so quadratures can split at them
    f.nodes_deg = tuple(float(t) for t in grid)
    f.period_deg = float(period)
    return f


@dataclass(frozen=True)
class BoundaryDensity:
    """Normalized density over a boundary angle range (radians).

    ``breakpoints`` are interior angles where the integrand is not smooth
    (kinks of an interpolated correction table); quadratures split there.
    """

    geometry: str
    unnormalized: Callable
    lo: float
    hi: float
    normalization: float
    breakpoints: tuple = ()

    def density(self, theta):
        """Normalized density in radians^-1 at angle(s) theta (radians)."""
        theta = np.asarray(theta, dtype=np.float64)
        return np.vectorize(self.unnormalized)(theta) / self.normalization


def _segments(lo, hi, breakpoints):
    cuts = sorted(b for b in breakpoints if lo + 1e-12 < b < hi - 1e-12)
    edges = [lo] + cuts + [hi]
    return list(zip(edges[:-1], edges[1:]))


def _piecewise_quad(fn, lo, hi, breakpoints) -> float:
    total = 0.0
    for a, b in _segments(lo, hi, breakpoints):
        val, _ = quad(fn, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
        total += val
    return total


def _normalize(fn, lo, hi, breakpoints=()) -> float:
    val = _piecewise_quad(fn, lo, hi, breakpoints)
    if not val > 0:
        raise ValueError("density does not integrate to a positive value")
    return val


def theoretical_density(geometry: str, correction=None) -> BoundaryDensity:
    """Boundary density for a cut-curve geometry.

    geometry 'disc_center': full-plane walk from the center, density over
    the polar angle in [0, 2pi); proportional to l(theta) (uniform with no
    correction).  'halfplane_semicircle': half-plane walk, density over
    (0, pi); proportional to sin^{5/4}(theta) * l(theta).

    ``correction`` is a callable of the angle in degrees (period 90), or
    None.
    """
    if geometry not in GEOMETRIES:
        raise ValueError(f"unknown geometry {geometry!r}")
    if correction is None:
        corr = lambda deg: 1.0
    else:
        corr = correction

    if geometry == "disc_center":
        lo, hi = 0.0, 2.0 * math.pi
        fn = lambda t: float(corr(math.degrees(t)))
    else:
        lo, hi = 0.0, math.pi
        fn = lambda t: math.sin(t) ** 1.25 * float(corr(math.degrees(t)))

    breaks = ()
    nodes = getattr(correction, "nodes_deg", None)
    if nodes:
        period = getattr(correction, "period_deg", 90.0)
        lo_deg, hi_deg = math.degrees(lo), math.degrees(hi)
        images = set()
        k = 0
        while nodes[0] + k * period < hi_deg:
            for t in nodes:
                u = t + k * period
                if lo_deg < u < hi_deg:
                    images.add(u)
            k += 1
        breaks = tuple(math.radians(u) for u in sorted(images))
    return BoundaryDensity(geometry=geometry, unnormalized=fn, lo=lo, hi=hi,
                           normalization=_normalize(fn, lo, hi, breaks),
                           breakpoints=breaks)


def density_cdf(density: BoundaryDensity, angle, rule: str = "adaptive"):
    """CDF of a boundary density at angle(s) in radians.

    Two independent quadratures are available: 'adaptive'
    (scipy.integrate.quad) and 'gauss' (composite 32-point Gauss-Legendre
    on 64 panels); they agree to ~1e-8 and the pair is used as its own
    cross-check.
    """
    angles = np.atleast_1d(np.asarray(angle, dtype=np.float64))
    if np.any(angles < density.lo - 1e-12) or np.any(angles > density.hi + 1e-12):
        raise ValueError("angle outside the density support")
    out = np.empty_like(angles)
    if rule == "adaptive":
        for i, a in enumerate(angles):
            out[i] = _piecewise_quad(density.unnormalized, density.lo, a,
                                     density.breakpoints) / density.normalization
    elif rule == "gauss":
        nodes, weights = np.polynomial.legendre.leggauss(32)

        def panel(lo, hi):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            return half * np.sum(
                weights * [density.unnormalized(mid + half * x) for x in nodes])

        for i, a in enumerate(angles):
            total = 0.0
            for s_lo, s_hi in _segments(density.lo, a, density.breakpoints):
                if density.breakpoints:
                    # the integrand is smooth within a segment
                    total += panel(s_lo, s_hi)
                else:
                    edges = np.linspace(s_lo, s_hi, 65)
                    total += sum(panel(p, q) for p, q in zip(edges[:-1], edges[1:]))
            out[i] = total / density.normalization
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    out = np.clip(out, 0.0, 1.0)
    return out if np.ndim(angle) else float(out[0])


def conformal_covariance_check(gprime_magnitudes, b: float, base_density=None):
    """Transform a boundary density by the |g'|^b covariance weight.

    ``gprime_magnitudes`` are |g'| sampled on a boundary grid; the
    returned array is the transformed density on the same grid, normalized
    to unit mean (grid-level normalization; callers integrate with their
    own measure).  ``base_density`` defaults to uniform.
    """
    g = np.asarray(gprime_magnitudes, dtype=np.float64)
    if np.any(g <= 0):
        raise ValueError("|g'| must be positive on the boundary")
    base = np.ones_like(g) if base_density is None \
        else np.asarray(base_density, dtype=np.float64)
    if base.shape != g.shape:
        raise ValueError("base density grid mismatch")
    out = g ** b * base
    return out / out.mean()


def halfplane_boundary_reference(x):
    """Unnormalized boundary densities on the positive real axis.

    Returns (x^-2, x^-5/4): harmonic-measure reference and the SAW
    boundary density, both for the half-plane walk rooted at the origin.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("boundary coordinate must be positive")
    return x ** -2.0, x ** -1.25
