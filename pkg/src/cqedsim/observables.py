"""Expectation values and derived quantities plotted in the benchmarks."""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np

from .cooling import GaussianAnsatzCoefficients
from .lindblad import DensityState
from .spaces import OperatorMatrix, SpaceDescriptor

__all__ = [
    "ObservableSeries",
    "UndefinedKurtosisError",
    "expectation",
    "partial_trace",
    "momentum_populations",
    "kinetic_energy",
    "kurtosis",
    "lab_frame_photon_number",
    "gaussian_ansatz_trajectory",
]


class UndefinedKurtosisError(ValueError):
    """Raised for distributions with zero momentum variance."""


@dataclass
class ObservableSeries:
    """Named time series of expectation values with explicit units."""

    name: str
    times: np.ndarray
    values: np.ndarray
    units: str

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values)
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if not self.units:
            raise ValueError("units must be non-empty")


def expectation(op: OperatorMatrix, rho) -> complex:
    """Tr(op rho); warns when a Hermitian operator yields a large imaginary part."""
    mat = rho.entries if hasattr(rho, "entries") else np.asarray(rho)
    if op.entries.shape != mat.shape:
        raise ValueError("operator and state shapes differ")
    val = complex(np.trace(op.entries @ mat))
    if op.is_hermitian() and abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        warnings.warn(
            f"Hermitian expectation has imaginary part {val.imag:.3e}", stacklevel=2
        )
    return val


def partial_trace(rho, space: SpaceDescriptor, keep_label: str) -> np.ndarray:
    """Reduced density matrix of the factor named ``keep_label``."""
    mat = rho.entries if hasattr(rho, "entries") else np.asarray(rho)
    dims = space.dims
    axis = space.axis(keep_label)
    n = len(dims)
    tensor = mat.reshape(dims + dims)
    for ax in reversed([i for i in range(n) if i != axis]):
        tensor = np.trace(tensor, axis1=ax, axis2=ax + tensor.ndim // 2)
    return tensor


def _ladder_populations(rho, space: SpaceDescriptor) -> np.ndarray:
    if "momentum" not in space.labels:
        raise ValueError("state has no momentum factor")
    reduced = partial_trace(rho, space, "momentum")
    return np.real(np.diag(reduced))


def momentum_populations(rho: DensityState) -> np.ndarray:
    """Diagonal of the reduced momentum-space density matrix."""
    return _ladder_populations(rho, rho.space)


def kinetic_energy(rho, space: SpaceDescriptor | None = None, recoil: float = 1.0) -> float:
    """Mean kinetic energy sum_n n^2 recoil * Pi_n (photon factor traced out).

    Accepts a DensityState or a bare population vector over the symmetric
    momentum grid.
    """
    arr = np.asarray(rho.entries if hasattr(rho, "entries") else rho)
    if arr.ndim == 1:
        pops = np.asarray(arr, dtype=float)
    else:
        pops = _ladder_populations(rho, space if space is not None else rho.space)
    n_max = (len(pops) - 1) // 2
    n = np.arange(-n_max, n_max + 1, dtype=float)
    return float(np.sum(n**2 * recoil * pops))


def kurtosis(rho, space: SpaceDescriptor | None = None) -> float:
    """<(dp)^4>/<(dp)^2>^2 of the momentum distribution; 3 for a Gaussian."""
    arr = np.asarray(rho.entries if hasattr(rho, "entries") else rho)
    if arr.ndim == 1:
        pops = np.asarray(arr, dtype=float)
    else:
        pops = _ladder_populations(rho, space if space is not None else rho.space)
    n_max = (len(pops) - 1) // 2
    n = np.arange(-n_max, n_max + 1, dtype=float)
    mean = float(n @ pops)
    var = float((n - mean) ** 2 @ pops)
    if var <= 0.0:
        raise UndefinedKurtosisError("momentum variance is zero")
    fourth = float((n - mean) ** 4 @ pops)
    return fourth / var**2


def lab_frame_photon_number(rho, photon_number_op: OperatorMatrix) -> float:
    """Intracavity photon number for a model tier.

    Pass I x a^dag a for the full models or alpha^dag alpha (built from the
    tier's field operator) for atom-only models.
    """
    return float(np.real(expectation(photon_number_op, rho)))


def gaussian_ansatz_trajectory(
    coeffs: GaussianAnsatzCoefficients, e0: float, t_grid
) -> ObservableSeries:
    """Closed-form solution of dE/dt = -gamma_c E + h from E(0) = e0."""
    if coeffs.gamma_c <= 0:
        raise ValueError("closed form requires a positive cooling rate")
    t = np.asarray(t_grid, dtype=float)
    e = coeffs.e_ss + (e0 - coeffs.e_ss) * np.exp(-coeffs.gamma_c * t)
    return ObservableSeries("e_kin", t, e, "hbar*omega_R")
