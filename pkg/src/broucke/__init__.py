"""Broucke's isosceles periodic orbit: regularized dynamics and stability.

Computes the periodic orbit by one-parameter shooting in regularized
coordinates and classifies its linear/spectral stability across the mass
parameter via a symmetry-reduced monodromy factorization.
"""

from ._backend import BACKEND
from .dynamics import MassParams, RegState
from .orbit import OrbitSolution, find_orbit
from .stability import StabilityRecord, analyze_orbit
from .sweep import SweepConfig, run_sweep

__version__ = "0.1.0"
__all__ = [
    "BACKEND", "MassParams", "RegState", "OrbitSolution", "find_orbit",
    "StabilityRecord", "analyze_orbit", "SweepConfig", "run_sweep",
    "__version__",
]
