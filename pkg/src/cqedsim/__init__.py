"""Lindblad master-equation hierarchy for polarizable particles in a lossy cavity.

Subpackages:

- ``spaces``: Hilbert-space descriptors and elementary operators
- ``lindblad``: models, density states, adaptive time evolution
- ``spectral``: Liouvillian matrices and biorthogonal spectra
- ``cooling``: single-atom cavity-cooling model tiers
- ``bosehubbard``: cavity-coupled lattice-gas model tiers
- ``observables``: expectation values and derived quantities
- ``scenarios`` / ``cli``: config-driven benchmark runs
"""

__version__ = "0.1.0"

from .lindblad import DensityState, LindbladModel, Trajectory, evolve, rhs
from .spaces import (
    LatticeFockBasis,
    MomentumLadder,
    OperatorMatrix,
    SpaceDescriptor,
    tensor,
)
from .spectral import SpectralDecomposition, spectral_decompose, steady_state

__all__ = [
    "__version__",
    "DensityState",
    "LindbladModel",
    "Trajectory",
    "evolve",
    "rhs",
    "LatticeFockBasis",
    "MomentumLadder",
    "OperatorMatrix",
    "SpaceDescriptor",
    "tensor",
    "SpectralDecomposition",
    "spectral_decompose",
    "steady_state",
]
