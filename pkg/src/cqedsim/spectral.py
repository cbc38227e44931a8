"""Liouvillian superoperator matrices and their biorthogonal spectral decomposition.

Vectorization is column-stacking: vec(A X B) = (B^T kron A) vec(X), and
matrices are recovered with ``reshape((d, d), order="F")``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .lindblad import LindbladModel
from .spaces import OperatorMatrix

__all__ = [
    "SpectralDecomposition",
    "LiouvillianSizeError",
    "NoSteadyStateError",
    "liouvillian_matrix",
    "spectral_decompose",
    "steady_state",
    "reconstruct",
]


class LiouvillianSizeError(ValueError):
    """Raised when the d^2 x d^2 superoperator would exceed the configured cap."""


class NoSteadyStateError(RuntimeError):
    """Raised when the Liouvillian has no (numerical) null vector."""


def liouvillian_matrix(model: LindbladModel, size_cap: int = 6400) -> np.ndarray:
    """Column-stacked matrix of the master-equation generator.

    L = -i (I kron H - H^T kron I)
        + sum_n rate_n (2 conj(J) kron J - I kron J^dag J - (J^dag J)^T kron I)
    """
    d = model.dim
    if d * d > size_cap:
        raise LiouvillianSizeError(
            f"superoperator dimension {d * d} exceeds cap {size_cap}; "
            "reduce the photon cutoff or basis size"
        )
    eye = np.eye(d)
    h = model.hamiltonian.entries
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for rate, jump in model.dissipators:
        j = jump.entries
        k = j.conj().T @ j
        lv += rate * (2.0 * np.kron(j.conj(), j) - np.kron(eye, k) - np.kron(k.T, eye))
    return lv


@dataclass
class SpectralDecomposition:
    """Eigenvalues with biorthonormal right/left eigenmatrices of a Liouvillian."""

    eigenvalues: np.ndarray
    right_modes: list[OperatorMatrix]
    left_modes: list[OperatorMatrix]
    defective: bool = False

    def coefficients(self, rho0: OperatorMatrix) -> np.ndarray:
        """Projection coefficients c_lambda = Tr(left^dag rho0)."""
        return np.array(
            [np.trace(lm.entries.conj().T @ rho0.entries) for lm in self.left_modes]
        )


def spectral_decompose(
    model: LindbladModel,
    size_cap: int = 6400,
    degeneracy_tol: float = 1e-7,
    gram_cond_cap: float = 1e8,
) -> SpectralDecomposition:
    """Dense two-sided eigendecomposition of the Liouvillian.

    Left and right eigenvectors are normalized so that
    Tr(left_i^dag right_j) = delta_ij.  Near-degenerate clusters
    (|lambda_i - lambda_j| < degeneracy_tol * max|lambda|) are re-paired by
    inverting the cluster Gram matrix; if its condition number exceeds
    ``gram_cond_cap`` the decomposition is flagged defective instead.
    """
    lv = liouvillian_matrix(model, size_cap=size_cap)
    w, vl, vr = scipy.linalg.eig(lv, left=True, right=True)
    # scipy convention: vl[:, i]^H @ lv = w[i] * vl[:, i]^H

    order = np.argsort(-w.real)
    w = w[order]
    vl = vl[:, order]
    vr = vr[:, order]

    norm_proxy = max(float(np.abs(w).max(initial=0.0)), 1.0)
    thresh = degeneracy_tol * norm_proxy

    defective = False
    n = len(w)
    i = 0
    while i < n:
        j = i + 1
        while j < n and abs(w[j] - w[j - 1]) < thresh:
            j += 1
        if j - i == 1:
            s = vl[:, i].conj() @ vr[:, i]
            if abs(s) < 1e-14:
                defective = True
            else:
                vl[:, i] = vl[:, i] / np.conj(s)
        else:
            gram = vl[:, i:j].conj().T @ vr[:, i:j]
            if np.linalg.cond(gram) > gram_cond_cap:
                defective = True
            else:
                # new left set satisfies (new_vl)^H vr = I on the cluster
                vl[:, i:j] = vl[:, i:j] @ np.linalg.inv(gram).conj().T
        i = j

    d = model.dim
    space = model.space
    right_modes = [
        OperatorMatrix(space, vr[:, i].reshape((d, d), order="F")) for i in range(n)
    ]
    left_modes = [
        OperatorMatrix(space, vl[:, i].reshape((d, d), order="F")) for i in range(n)
    ]
    return SpectralDecomposition(w, right_modes, left_modes, defective)


def reconstruct(
    decomp: SpectralDecomposition, rho0: OperatorMatrix, t: float
) -> OperatorMatrix:
    """rho(t) = sum_lambda c_lambda e^{lambda t} rho_lambda."""
    c = decomp.coefficients(rho0)
    out = np.zeros_like(rho0.entries)
    for ci, wi, mode in zip(c, decomp.eigenvalues, decomp.right_modes):
        out += ci * np.exp(wi * t) * mode.entries
    return OperatorMatrix(rho0.space, out)


def steady_state(model: LindbladModel, size_cap: int = 6400, null_tol: float = 1e-8):
    """Trace-one Hermitian null vector of the Liouvillian.

    For a multi-dimensional null space, returns the projection of the
    maximally mixed state onto it.
    """
    from .lindblad import DensityState

    lv = liouvillian_matrix(model, size_cap=size_cap)
    u, s, vh = np.linalg.svd(lv)
    cutoff = null_tol * max(1.0, float(s.max(initial=0.0)))
    null_vecs = vh[s < cutoff].conj().T
    if null_vecs.shape[1] == 0:
        raise NoSteadyStateError("Liouvillian has no null vector within tolerance")
    d = model.dim
    if null_vecs.shape[1] == 1:
        vec = null_vecs[:, 0]
    else:
        mixed = (np.eye(d, dtype=complex) / d).reshape(-1, order="F")
        vec = null_vecs @ (null_vecs.conj().T @ mixed)
    rho = vec.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise NoSteadyStateError("null vector is traceless; no physical steady state")
    rho = rho / tr
    return DensityState(
        OperatorMatrix(model.space, rho), herm_tol=1e-8, trace_tol=1e-8, positivity_tol=1e-6
    )
