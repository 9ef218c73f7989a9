"""The cut-curve ensemble: walks conditioned to cross a circle once.

A fixed-length walk with lattice spacing delta = N^{-nu} starts at the
center of a circle of physical radius R (or, in the half-plane case, at
the center of the upper semicircle, on the boundary).  Retained samples
are those whose path crosses the curve through exactly one bond; the
recorded observable is the polar angle of the geometric intersection
point.  Conditioning is by rejection on the sampled states, so the
chain's uniform stationary law is untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .lattice import DegenerateTouch, Walk
from .pivot import PivotChain

KINDS = ("circle", "semicircle_upper")

DEFAULT_RADIUS = 0.2
DEFAULT_NU = 0.75


@dataclass(frozen=True)
class CutCurve:
    """Circle (or upper semicircle) of physical radius R about the origin."""

    kind: str
    radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown cut curve kind {self.kind!r}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def upper_only(self) -> bool:
        return self.kind == "semicircle_upper"

    @property
    def ensemble(self) -> str:
        return "halfplane" if self.upper_only else "free"


@dataclass(frozen=True)
class CrossingSample:
    """One retained walk: where and how it crossed the curve."""

    angle: float  # degrees; circle in [0,360), semicircle in (0,180)
    bond_orientation: str  # 'h' | 'v'
    chain_id: int
    sample_index: int


@dataclass
class CutCurveRun:
    """Retained samples plus the bookkeeping of the rejection step."""

    samples: list
    n_proposed: int
    n_zero: int
    n_multi: int
    n_degenerate: int
    accept_rate_pivot: float
    config: dict

    @property
    def acceptance_fraction(self) -> float:
        return len(self.samples) / self.n_proposed

    @property
    def angles(self) -> np.ndarray:
        return np.array([s.angle for s in self.samples])


def _segment_circle_hits(a, b, r2, tol):
    """Intersection parameters t in [0,1] of segment a+t(b-a) with x^2+y^2=r2.

    Raises DegenerateTouch when an endpoint sits on the circle or the
    segment is tangent within tolerance.  Independent per-bond oracle for
    the compiled sampler: solves the quadratic directly.
    """
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    da = ax * ax + ay * ay - r2
    db = bx * bx + by * by - r2
    if abs(da) <= tol or abs(db) <= tol:
        raise DegenerateTouch("bond endpoint on the cut curve within tolerance")
    # |d|^2 t^2 + 2 (a.d) t + (|a|^2 - r^2) = 0
    c2 = dx * dx + dy * dy
    c1 = ax * dx + ay * dy
    disc = c1 * c1 - c2 * da
    if disc <= 0:
        if disc > -tol * c2:
            raise DegenerateTouch("bond tangent to the cut curve within tolerance")
        return []
    root = math.sqrt(disc)
    hits = [t for t in ((-c1 - root) / c2, (-c1 + root) / c2) if 0.0 < t < 1.0]
    if da * db < 0 and len(hits) != 1:
        # sign change guarantees exactly one interior root; anything else
        # is a borderline configuration
        raise DegenerateTouch("ambiguous circle crossing within tolerance")
    return hits


def count_curve_crossings(walk, curve: CutCurve, delta: float | None = None,
                          tol: float = 1e-9):
    """Count intersections of a walk's bonds with the cut curve.

    Returns (count, descriptors); each descriptor is a dict with the bond
    index, intersection point, polar angle in degrees, and the bond
    orientation.  A chord bond (enters and leaves the circle between two
    exterior endpoints) contributes two intersections.  For the upper
    semicircle only intersections with y > 0 count; an intersection with
    y ~ 0 is degenerate.  The walk is taken in physical units with the
    curve centered at the walk's first point.
    """
    if isinstance(walk, Walk):
        pts = walk.points
        if delta is None:
            delta = walk.context.delta
    else:
        pts = np.asarray(walk)
        if delta is None:
            delta = 1.0
    phys = (pts - pts[0]) * float(delta)
    r2 = curve.radius ** 2
    out = []
    for j in range(len(phys) - 1):
        a, b = phys[j], phys[j + 1]
        for t in _segment_circle_hits(tuple(a), tuple(b), r2, tol):
            ix, iy = a + t * (b - a)
            if curve.upper_only:
                if abs(iy) <= tol:
                    raise DegenerateTouch("crossing at the semicircle base point")
                if iy < 0:
                    continue
            ang = math.degrees(math.atan2(iy, ix)) % 360.0
            orient = "v" if pts[j + 1][0] == pts[j][0] else "h"
            out.append({"bond": j, "point": (float(ix), float(iy)),
                        "angle": ang, "orientation": orient})
    return len(out), out


def sample_cutcurve(ensemble: str, curve: CutCurve, n_steps: int,
                    n_samples: int, stride: int = 200, seed=None,
                    nu: float = DEFAULT_NU, chain_id: int = 0,
                    equilibration: int | None = None) -> CutCurveRun:
    """Stream the cut-curve ensemble and keep the single-crossing walks.

    ``n_samples`` counts proposed (pre-rejection) walks; the walk's
    lattice spacing is N^{-nu} so the curve radius in lattice units is
    R * N^{nu}.
    """
    if ensemble not in ("free", "halfplane"):
        raise ValueError("cut-curve ensembles are 'free' and 'halfplane'")
    if curve.upper_only != (ensemble == "halfplane"):
        raise ValueError("semicircle goes with the half-plane ensemble, "
                         "the full circle with the free ensemble")
    delta = float(n_steps) ** (-nu)
    r_lat = curve.radius / delta
    chain = PivotChain(n_steps, ensemble, seed=seed, delta=delta)
    chain.equilibrate(equilibration)
    out_angle = np.empty(n_samples, dtype=np.float64)
    out_orient = np.empty(n_samples, dtype=np.int64)
    out_code = np.empty(n_samples, dtype=np.int64)
    acc = kernels.sample_cutcurve(
        *chain._state_args(), chain.constraint.code, n_samples, stride,
        r_lat, curve.upper_only, out_angle, out_orient, out_code,
        chain._take_seed())
    chain.step_counter += n_samples * stride
    chain.accept_counter += acc

    samples = [
        CrossingSample(angle=float(out_angle[i]),
                       bond_orientation="v" if out_orient[i] == 1 else "h",
                       chain_id=chain_id, sample_index=i)
        for i in np.flatnonzero(out_code == kernels.CC_ACCEPT)
    ]
    codes = np.bincount(out_code, minlength=4)
    return CutCurveRun(
        samples=samples,
        n_proposed=n_samples,
        n_zero=int(codes[kernels.CC_ZERO]),
        n_multi=int(codes[kernels.CC_MULTI]),
        n_degenerate=int(codes[kernels.CC_DEGEN]),
        accept_rate_pivot=acc / (n_samples * stride),
        config={"ensemble": ensemble, "kind": curve.kind, "R": curve.radius,
                "n_steps": n_steps, "nu": nu, "delta": delta,
                "stride": stride, "n_samples": n_samples,
                "chain_id": chain_id},
    )
