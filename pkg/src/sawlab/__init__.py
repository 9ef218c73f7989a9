"""sawlab: a square-lattice self-avoiding-walk laboratory.

Pivot Monte Carlo in three ensembles, exact enumeration oracles, lattice
correction functions, the cut-curve crossing ensemble, continuum
boundary densities, and random-walk loop-measure machinery.
"""

from .lattice import Bond, DegenerateTouch, Line, Walk, WalkContext
from .pivot import EnsembleConstraint, PivotChain

__all__ = [
    "Bond",
    "DegenerateTouch",
    "EnsembleConstraint",
    "Line",
    "PivotChain",
    "Walk",
    "WalkContext",
]

__version__ = "0.1.0"
