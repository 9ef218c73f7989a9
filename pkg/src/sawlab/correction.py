"""Monte Carlo estimation of the lattice correction functions.

The survival probabilities behind the correction factor:

* p^v_2(theta): a middle-bond-pinned walk of N steps is hit with a line
  of angle theta through a uniform point of the pinned vertical bond;
  success means the line crosses the walk exactly once, at that bond.
  The success fraction times N^{7/16} converges to a nontrivial periodic
  function of theta (7/16 = 2*rho - gamma + 1).
* p^v_1(theta): a free walk from the origin survives (zero crossings) a
  line through (0, l), l ~ U[0,1); fraction times N^{25/64}.

The lattice correction on the full circle is then
l(theta) = |cos theta| p^v(theta) + |sin theta| p^h(theta) with
p^h(theta) = p^v(theta + 90 deg) by lattice reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .pivot import PivotChain
from .theory import periodic_interpolator

# Fixed exponent rationals for the square-lattice SAW.
RHO = Fraction(25, 64)
GAMMA = Fraction(43, 32)


@dataclass(frozen=True)
class ExponentSet:
    """The exponents entering the correction-function rescalings."""

    rho: Fraction = RHO
    gamma: Fraction = GAMMA
    nu: Fraction = Fraction(3, 4)
    b: Fraction = Fraction(5, 8)
    b_tilde: Fraction = Fraction(5, 48)

    @property
    def p2_exponent(self) -> Fraction:
        # 2*rho - gamma + 1 = 7/16
        return 2 * self.rho - self.gamma + 1

    @property
    def p1_exponent(self) -> Fraction:
        return self.rho


DEFAULT_EXPONENTS = ExponentSet()

LOW_CONFIDENCE_SUCCESSES = 100


@dataclass
class CorrectionTable:
    """Per-angle survival estimates from one chain run.

    theta_grid is in degrees, ascending, inside [0, 90).  batch_fractions
    (n_batches x n_theta) holds the raw per-batch success fractions so
    any derived quantity can propagate errors through the same batches.
    """

    theta_grid: np.ndarray
    p_values: np.ndarray
    p_stderr: np.ndarray
    n_steps: int
    n_samples: int
    exponent_used: float
    n_success: np.ndarray
    batch_fractions: np.ndarray
    which: int  # 1 or 2

    def __post_init__(self):
        if np.any(self.p_values <= 0):
            raise ValueError("p estimates must be positive; increase n_samples")
        if np.any(np.diff(self.theta_grid) <= 0):
            raise ValueError("theta grid must be ascending")

    @property
    def low_confidence(self) -> np.ndarray:
        """Mask of bins with too few successes to trust the stderr."""
        return self.n_success < LOW_CONFIDENCE_SUCCESSES


def _theta_index(grid: np.ndarray, theta: float) -> int:
    j = int(np.argmin(np.abs(grid - theta)))
    if abs(grid[j] - theta) > 1e-9:
        raise ValueError(f"angle {theta} deg not on the table grid")
    return j


def _run_survival(which: int, theta_grid, n_steps: int, n_samples: int,
                  stride: int, seed, n_batches: int,
                  exponents: ExponentSet) -> CorrectionTable:
    grid = np.asarray(theta_grid, dtype=np.float64)
    if np.any(grid < 0) or np.any(grid >= 90):
        raise ValueError("theta grid must lie in [0, 90) degrees")
    if which == 2:
        if n_steps % 2 != 1:
            raise ValueError("the middle-bond ensemble needs an odd step count")
        ensemble, exponent = "midbond", float(exponents.p2_exponent)
    else:
        ensemble, exponent = "free", float(exponents.p1_exponent)

    n_samples = (n_samples // n_batches) * n_batches
    if n_samples < n_batches:
        raise ValueError("need at least one sample per batch")

    rad = np.radians(grid)
    sin_t = np.sin(rad)
    cos_t = np.cos(rad)
    chain = PivotChain(n_steps, ensemble, seed=seed)
    chain.equilibrate()
    success = np.zeros((n_batches, len(grid)), dtype=np.int64)
    acc, redraws = kernels.sample_line_survival(
        *chain._state_args(), chain.constraint.code, n_samples, stride,
        sin_t, cos_t, n_batches, success, chain._take_seed())
    chain.step_counter += n_samples * stride
    chain.accept_counter += acc

    per_batch = n_samples // n_batches
    frac = success / per_batch
    scale = float(n_steps) ** exponent
    p = frac.mean(axis=0) * scale
    stderr = frac.std(axis=0, ddof=1) / math.sqrt(n_batches) * scale
    return CorrectionTable(
        theta_grid=grid, p_values=p, p_stderr=stderr, n_steps=n_steps,
        n_samples=n_samples, exponent_used=exponent,
        n_success=success.sum(axis=0), batch_fractions=frac, which=which)


def estimate_p2(theta_grid, n_steps: int, n_samples: int, stride: int = 4,
                seed=None, n_batches: int = 20,
                exponents: ExponentSet = DEFAULT_EXPONENTS) -> CorrectionTable:
    """Estimate p^v_2 on a grid of angles (degrees, in [0, 90)).

    A fresh offset l is drawn per (sample, theta); errors are batch means
    over contiguous blocks of walks, so the correlations across angles
    within one walk stay inside each batch.
    """
    return _run_survival(2, theta_grid, n_steps, n_samples, stride, seed,
                         n_batches, exponents)


def estimate_p1(theta_grid, n_steps: int, n_samples: int, stride: int = 4,
                seed=None, n_batches: int = 20,
                exponents: ExponentSet = DEFAULT_EXPONENTS) -> CorrectionTable:
    """Estimate p^v_1 (free-walk line survival) on a degree grid."""
    return _run_survival(1, theta_grid, n_steps, n_samples, stride, seed,
                         n_batches, exponents)


@dataclass
class LatticeCorrection:
    """l(theta) on [0, 90) with batch-propagated errors; period 90 deg."""

    theta_grid: np.ndarray
    l_values: np.ndarray
    l_stderr: np.ndarray
    table: CorrectionTable
    normalized: bool

    def __call__(self, theta_deg):
        return self.interpolator()(theta_deg)

    def interpolator(self):
        return periodic_interpolator(self.theta_grid, self.l_values, period=90.0)


def assemble_l(table: CorrectionTable, normalize: bool = False) -> LatticeCorrection:
    """Assemble l(theta) from a p^v table.

    l(theta) = cos(theta) p^v(theta) + sin(theta) p^v(90 - theta) for
    theta in [0, 90); the second term uses the lattice reflection
    p^h(theta) = p^v(90 deg - theta).  The grid must be symmetric under
    theta -> 90 - theta (with 90 identified with 0).  Errors come from
    recomputing l per batch, so the correlation between the two terms
    (same walks) is kept.
    """
    grid = table.theta_grid
    partner = np.array([_theta_index(grid, (90.0 - t) % 90.0) for t in grid])
    rad = np.radians(grid)
    ct, st = np.cos(rad), np.sin(rad)
    scale = float(table.n_steps) ** table.exponent_used

    per_batch_l = scale * (ct * table.batch_fractions
                           + st * table.batch_fractions[:, partner])
    if normalize:
        per_batch_l = per_batch_l / per_batch_l.mean(axis=1, keepdims=True)
    l = per_batch_l.mean(axis=0)
    stderr = per_batch_l.std(axis=0, ddof=1) / math.sqrt(per_batch_l.shape[0])
    return LatticeCorrection(theta_grid=grid.copy(), l_values=l,
                             l_stderr=stderr, table=table, normalized=normalize)


def default_theta_grid(step_deg: float = 1.0) -> np.ndarray:
    """Degree grid on [0, 90): the fundamental domain of p^v.

    90 deg itself is excluded: there the line can be parallel to the
    pinned vertical bond through its own supporting line, where the
    single-crossing event degenerates; every l(theta) value on the full
    circle is still determined because the |cos| weight of the missing
    angle vanishes.
    """
    return np.arange(0.0, 90.0, step_deg)
