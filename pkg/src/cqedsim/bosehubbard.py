"""Cavity-coupled extended Bose-Hubbard models on a fixed-number Fock block.

Three tiers over one parameter set: the full lattice-plus-photon Lindblad
model, the adiabatic atom-only model (cavity field slaved to the instantaneous
density pattern), and the diabatically corrected atom-only model (first
momentum-dependent correction to the field).  Frequencies are in units of the
hopping J; open boundary conditions throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .lindblad import LindbladModel
from .spaces import (
    LatticeFockBasis,
    OperatorMatrix,
    bond_operator,
    fock_annihilation,
    fock_number,
    hopping_operator,
    identity,
    number_operator,
    tensor,
)

__all__ = [
    "BHParams",
    "EpsilonReport",
    "CqedTerms",
    "build_bh_hamiltonian",
    "build_theta_bh",
    "build_full_bh_model",
    "build_alpha0_bh",
    "build_alpha1_bh",
    "alpha1_from_commutator",
    "build_adiabatic_bh_model",
    "build_diabatic_bh_model",
    "epsilon_report",
    "expand_cqed_terms",
]


@dataclass(frozen=True)
class BHParams:
    """Lattice and cavity parameters, all frequencies in units of the hopping J."""

    sites: int
    bosons: int
    u: float
    eta: float
    delta: float
    kappa: float
    j_hop: float = 1.0
    z: tuple[float, ...] | None = None  # site weights, default (-1)^j for j = 1..L
    y: tuple[float, ...] | None = None  # bond weights, default 0
    photon_cutoff: int = 6

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("need at least two sites")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.z is not None and len(self.z) != self.sites:
            raise ValueError(f"z must have length {self.sites}")
        if self.y is not None and len(self.y) != self.sites - 1:
            raise ValueError(f"y must have length {self.sites - 1}")
        if self.z is not None:
            object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        if self.y is not None:
            object.__setattr__(self, "y", tuple(float(v) for v in self.y))

    @cached_property
    def basis(self) -> LatticeFockBasis:
        return LatticeFockBasis(self.sites, self.bosons)

    @property
    def z_weights(self) -> tuple[float, ...]:
        if self.z is not None:
            return self.z
        # staggered sign with 1-based site index: (-1, +1, -1, ...)
        return tuple(float((-1) ** (j + 1)) for j in range(self.sites))

    @property
    def y_weights(self) -> tuple[float, ...]:
        if self.y is not None:
            return self.y
        return (0.0,) * (self.sites - 1)

    @property
    def has_default_weights(self) -> bool:
        return self.z is None and self.y is None

    @property
    def lorentzian(self) -> float:
        return self.delta**2 + self.kappa**2


def build_bh_hamiltonian(p: BHParams) -> OperatorMatrix:
    """H_S = -J sum_j (b_j^dag b_{j+1} + h.c.) + (u/2) sum_j n_j (n_j - 1)."""
    basis = p.basis
    d = basis.dim
    h = np.zeros((d, d), dtype=complex)
    for j in range(p.sites - 1):
        h -= p.j_hop * bond_operator(basis, j).entries
    for j in range(p.sites):
        occ = np.array([s[j] for s in basis.states], dtype=float)
        h += np.diag(0.5 * p.u * occ * (occ - 1.0))
    return OperatorMatrix(basis.space, h)


def build_theta_bh(p: BHParams) -> OperatorMatrix:
    """Cavity-coupling pattern operator: sum_j Z_j n_j + sum_j Y_j B_j."""
    basis = p.basis
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j, zj in enumerate(p.z_weights):
        if zj != 0.0:
            out += zj * number_operator(basis, j).entries
    for j, yj in enumerate(p.y_weights):
        if yj != 0.0:
            out += yj * bond_operator(basis, j).entries
    return OperatorMatrix(basis.space, out)


def build_full_bh_model(p: BHParams) -> LindbladModel:
    """Lattice gas plus lossy photon mode.

    H = H_S x I - Delta I x a^dag a + eta (Theta x a^dag + Theta x a),
    dissipator (kappa, I x a); the dispersive shift is dropped.
    """
    a = fock_annihilation(p.photon_cutoff, label="photon")
    n_ph = fock_number(p.photon_cutoff, label="photon")
    i_at = identity(p.basis.space)
    i_ph = identity(a.space)
    theta = build_theta_bh(p)
    h = tensor(build_bh_hamiltonian(p), i_ph)
    h = h + (-p.delta) * tensor(i_at, n_ph)
    h = h + p.eta * (tensor(theta, a.dagger()) + tensor(theta, a))
    return LindbladModel(h, ((p.kappa, tensor(i_at, a)),))


def build_alpha0_bh(p: BHParams) -> OperatorMatrix:
    """Zeroth-order (adiabatic) field operator: eta/(Delta + i kappa) * Theta."""
    return (p.eta / (p.delta + 1j * p.kappa)) * build_theta_bh(p)


def alpha1_from_commutator(p: BHParams) -> OperatorMatrix:
    """First-order field correction from the coarse-grained equation of motion.

    alpha_1 = -chi^{-1} (1/i)[H_S, alpha_0] with scalar chi = -i(-Delta - i kappa);
    valid for any Z/Y weights.
    """
    chi = -1j * (-p.delta - 1j * p.kappa)
    h_s = build_bh_hamiltonian(p)
    a0 = build_alpha0_bh(p)
    comm = h_s @ a0 - a0 @ h_s
    return (-1.0 / chi) * ((1.0 / 1j) * comm)


def build_alpha1_bh(p: BHParams) -> OperatorMatrix:
    """First-order field correction.

    For the default staggered weights this is the closed form
    2 J eta/(Delta + i kappa)^2 sum_j (-1)^j (b_j^dag b_{j+1} - b_{j+1}^dag b_j);
    otherwise falls back to the commutator construction.
    """
    if not p.has_default_weights:
        return alpha1_from_commutator(p)
    basis = p.basis
    pref = 2.0 * p.j_hop * p.eta / (p.delta + 1j * p.kappa) ** 2
    out = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j in range(p.sites - 1):
        sign = float((-1) ** (j + 1))  # 1-based bond index parity
        hop = hopping_operator(basis, j).entries
        out += sign * (hop - hop.conj().T)
    return pref * OperatorMatrix(basis.space, out)


def build_adiabatic_bh_model(p: BHParams) -> LindbladModel:
    """Atom-only model with the cavity fully eliminated.

    H = H_S + (Delta eta^2/(Delta^2+kappa^2)) Theta^2,
    dissipator (Gamma, Theta) with Gamma = kappa eta^2/(Delta^2+kappa^2).
    """
    theta = build_theta_bh(p)
    h = build_bh_hamiltonian(p) + (p.delta * p.eta**2 / p.lorentzian) * (theta @ theta)
    gamma = p.kappa * p.eta**2 / p.lorentzian
    return LindbladModel(h, ((gamma, theta),))


def build_diabatic_bh_model(p: BHParams) -> LindbladModel:
    """Atom-only model retaining the first diabatic field correction.

    alpha = alpha_0 + alpha_1; H = H_S + (1/2)(alpha^dag G + G^dag alpha) with
    G = eta Theta, Hermitized explicitly; dissipator (kappa, alpha).
    """
    theta = build_theta_bh(p)
    alpha = build_alpha0_bh(p) + build_alpha1_bh(p)
    g = p.eta * theta
    coupling = 0.5 * (alpha.dagger() @ g + g.dagger() @ alpha)
    h = build_bh_hamiltonian(p) + 0.5 * (coupling + coupling.dagger())
    return LindbladModel(h, ((p.kappa, alpha),))


@dataclass(frozen=True)
class EpsilonReport:
    """Small parameters of the cavity elimination and the heating rate."""

    eps1: float | None
    eps2: float
    eps_fig3: float
    gamma_heat: float  # units J
    adiabatic_lhs: float | None


def epsilon_report(p: BHParams, e_kin: float | None = None, recoil: float | None = None) -> EpsilonReport:
    """Validity bookkeeping for the adiabatic elimination.

    eps2 = |eta| sqrt(N) / |Delta + i kappa|; the figure-level epsilon is
    eps2^2 = N eta^2/(Delta^2+kappa^2).  eps1 (and the adiabaticity product
    eps1*eps2) needs a recoil energy scale and is reported only when both
    e_kin and recoil are supplied.
    """
    mod = np.hypot(p.delta, p.kappa)
    eps2 = abs(p.eta) * np.sqrt(p.bosons) / mod
    eps1 = None
    lhs = None
    if e_kin is not None and recoil is not None:
        eps1 = float(np.sqrt(4.0 * e_kin * recoil) / mod)
        lhs = eps1 * eps2
    gamma = p.kappa * p.eta**2 / p.lorentzian
    return EpsilonReport(eps1, eps2, eps2**2, gamma, lhs)


@dataclass(frozen=True)
class CqedTerms:
    """Cavity-mediated Hamiltonian and dissipator, split into labeled sums.

    ``hamiltonian_terms`` (OperatorMatrix, prefactor included) sum to the
    adiabatic model's Theta^2 interaction; ``dissipator_terms`` (column-stacked
    superoperator matrices, rate included) sum to Gamma D[Theta].
    """

    hamiltonian_terms: dict[str, OperatorMatrix]
    dissipator_terms: dict[str, np.ndarray]


def _dissipator_cross_superop(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross piece of D[A + B] for Hermitian A, B.

    Superoperator of 2 A rho B + 2 B rho A - {AB + BA, rho}.
    """
    d = a.shape[0]
    eye = np.eye(d)
    anti = a @ b + b @ a
    return (
        2.0 * np.kron(b.T, a)
        + 2.0 * np.kron(a.T, b)
        - np.kron(eye, anti)
        - np.kron(anti.T, eye)
    )


def _dissipator_superop(a: np.ndarray) -> np.ndarray:
    d = a.shape[0]
    eye = np.eye(d)
    sq = a @ a
    return 2.0 * np.kron(a.conj(), a) - np.kron(eye, sq) - np.kron(sq.T, eye)


def expand_cqed_terms(p: BHParams) -> CqedTerms:
    """Expand the cavity-mediated terms into density/bond sums.

    The Theta^2 Hamiltonian splits into density-density (ZZ), density-bond
    (ZY, YZ), and bond-bond (YY) double sums; the dissipator into the three
    corresponding superoperator pieces (cross terms combined).
    """
    basis = p.basis
    dens = np.zeros((basis.dim, basis.dim), dtype=complex)
    bond = np.zeros((basis.dim, basis.dim), dtype=complex)
    for j, zj in enumerate(p.z_weights):
        dens += zj * number_operator(basis, j).entries
    for j, yj in enumerate(p.y_weights):
        bond += yj * bond_operator(basis, j).entries

    pref = p.delta * p.eta**2 / p.lorentzian
    space = basis.space
    ham = {
        "ZZ": OperatorMatrix(space, pref * (dens @ dens)),
        "ZY": OperatorMatrix(space, pref * (dens @ bond)),
        "YZ": OperatorMatrix(space, pref * (bond @ dens)),
        "YY": OperatorMatrix(space, pref * (bond @ bond)),
    }
    gamma = p.kappa * p.eta**2 / p.lorentzian
    diss = {
        "density_density": gamma * _dissipator_superop(dens),
        "density_bond": gamma * _dissipator_cross_superop(dens, bond),
        "bond_bond": gamma * _dissipator_superop(bond),
    }
    return CqedTerms(ham, diss)
