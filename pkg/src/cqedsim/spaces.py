"""Hilbert-space descriptors and the elementary operators living on them.

Conventions: hbar = 1 everywhere.  Momentum is measured in units of the
cavity photon momentum hbar*k, energies of the motional problem in units
of the recoil frequency omega_R = hbar*k^2/(2m).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "SpaceDescriptor",
    "OperatorMatrix",
    "MomentumLadder",
    "LatticeFockBasis",
    "identity",
    "fock_annihilation",
    "fock_number",
    "tensor",
    "cos_kx",
    "cos2_kx",
    "kinetic",
    "momentum_operator",
    "number_operator",
    "hopping_operator",
    "bond_operator",
    "site_operators",
]


@dataclass(frozen=True)
class SpaceDescriptor:
    """Ordered tensor-product factorization of a finite Hilbert space.

    The left-most factor varies slowest in the composite basis ordering,
    matching ``numpy.kron`` of operators on the individual factors.
    """

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.factors]
        if len(labels) != len(set(labels)):
            raise ValueError(f"factor labels must be unique, got {labels}")
        for label, dim in self.factors:
            if dim < 1:
                raise ValueError(f"factor {label!r} has non-positive dimension {dim}")

    @staticmethod
    def single(label: str, dim: int) -> "SpaceDescriptor":
        return SpaceDescriptor(((label, dim),))

    @property
    def total_dim(self) -> int:
        return math.prod(dim for _, dim in self.factors)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    def axis(self, label: str) -> int:
        for i, (lab, _) in enumerate(self.factors):
            if lab == label:
                return i
        raise KeyError(f"no factor labelled {label!r} in {self.labels}")


@dataclass(eq=False)
class OperatorMatrix:
    """Dense complex square matrix tagged with its Hilbert-space descriptor."""

    space: SpaceDescriptor
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        d = self.space.total_dim
        if self.entries.shape != (d, d):
            raise ValueError(
                f"entries shape {self.entries.shape} does not match space dimension {d}"
            )

    # -- algebra -----------------------------------------------------------

    def _require_same_space(self, other: "OperatorMatrix"):
        if self.space != other.space:
            raise ValueError(
                f"operator spaces differ: {self.space.labels} vs {other.space.labels}"
            )

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._require_same_space(other)
        return OperatorMatrix(self.space, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._require_same_space(other)
        return OperatorMatrix(self.space, self.entries - other.entries)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, -self.entries)

    def __mul__(self, scalar) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._require_same_space(other)
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        scale = max(1.0, float(np.abs(self.entries).max(initial=0.0)))
        return bool(np.abs(self.entries - self.entries.conj().T).max(initial=0.0) <= tol * scale)

    @property
    def dim(self) -> int:
        return self.space.total_dim


def identity(space: SpaceDescriptor) -> OperatorMatrix:
    return OperatorMatrix(space, np.eye(space.total_dim, dtype=complex))


def fock_annihilation(dim: int, label: str = "fock") -> OperatorMatrix:
    """Truncated bosonic annihilation operator: entry sqrt(j) at (j-1, j)."""
    if dim < 2:
        raise ValueError(f"Fock space needs dimension >= 2, got {dim}")
    a = np.zeros((dim, dim), dtype=complex)
    for j in range(1, dim):
        a[j - 1, j] = math.sqrt(j)
    return OperatorMatrix(SpaceDescriptor.single(label, dim), a)


def fock_number(dim: int, label: str = "fock") -> OperatorMatrix:
    if dim < 2:
        raise ValueError(f"Fock space needs dimension >= 2, got {dim}")
    return OperatorMatrix(
        SpaceDescriptor.single(label, dim), np.diag(np.arange(dim, dtype=complex))
    )


def tensor(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    """Kronecker product; left factor varies slowest."""
    space = SpaceDescriptor(a.space.factors + b.space.factors)
    return OperatorMatrix(space, np.kron(a.entries, b.entries))


# ---------------------------------------------------------------------------
# Momentum ladder of a single particle along the cavity axis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentumLadder:
    """Discrete grid of momentum eigenstates |p = n hbar k> for |n| <= n_max.

    The recoil frequency fixes the mass convention through
    omega_R = hbar k^2 / (2m); with k = 1 and hbar = 1 the kinetic energy of
    |n> is n^2 * recoil.
    """

    n_max: int
    k: float = 1.0
    recoil: float = 1.0

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.recoil <= 0:
            raise ValueError("recoil frequency must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    @property
    def space(self) -> SpaceDescriptor:
        return SpaceDescriptor.single("momentum", self.dim)

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def index(self, n: int) -> int:
        if abs(n) > self.n_max:
            raise ValueError(f"momentum index {n} outside grid |n| <= {self.n_max}")
        return n + self.n_max


def cos_kx(ladder: MomentumLadder) -> OperatorMatrix:
    """cos(k x) on the momentum grid: 1/2 on both first off-diagonals.

    Couplings that would leave the grid are dropped (reflectionless
    truncation).
    """
    d = ladder.dim
    m = np.zeros((d, d), dtype=complex)
    for i in range(d - 1):
        m[i, i + 1] = 0.5
        m[i + 1, i] = 0.5
    return OperatorMatrix(ladder.space, m)


def cos2_kx(ladder: MomentumLadder) -> OperatorMatrix:
    """cos^2(k x) = 1/2 + (couplings by two recoils)/4, boundary terms dropped."""
    d = ladder.dim
    m = 0.5 * np.eye(d, dtype=complex)
    for i in range(d - 2):
        m[i, i + 2] = 0.25
        m[i + 2, i] = 0.25
    return OperatorMatrix(ladder.space, m)


def kinetic(ladder: MomentumLadder) -> OperatorMatrix:
    """p^2/(2m): diagonal n^2 * recoil."""
    n = ladder.n_values
    return OperatorMatrix(ladder.space, np.diag((n.astype(float) ** 2) * ladder.recoil).astype(complex))


def momentum_operator(ladder: MomentumLadder) -> OperatorMatrix:
    """p in units of hbar*k: diagonal n."""
    return OperatorMatrix(ladder.space, np.diag(ladder.n_values.astype(complex)))


# ---------------------------------------------------------------------------
# Fixed-particle-number bosonic lattice
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeFockBasis:
    """All occupation tuples (n_1, ..., n_L) with sum N, lexicographically ordered.

    Single annihilation operators are never materialized; only
    number-conserving bilinears act within this block.
    """

    sites: int
    bosons: int

    def __post_init__(self):
        if self.sites < 1:
            raise ValueError("need at least one site")
        if self.bosons < 0:
            raise ValueError("boson number must be non-negative")

    @cached_property
    def states(self) -> tuple[tuple[int, ...], ...]:
        configs = [
            occ
            for occ in itertools.product(range(self.bosons + 1), repeat=self.sites)
            if sum(occ) == self.bosons
        ]
        return tuple(sorted(configs))

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def space(self) -> SpaceDescriptor:
        return SpaceDescriptor.single("lattice", self.dim)

    def index(self, occupation: tuple[int, ...]) -> int:
        return self._index[tuple(occupation)]


def number_operator(basis: LatticeFockBasis, site: int) -> OperatorMatrix:
    """n_j for 0-based site index; diagonal in the occupation basis."""
    occ = np.array([s[site] for s in basis.states], dtype=complex)
    return OperatorMatrix(basis.space, np.diag(occ))


def hopping_operator(basis: LatticeFockBasis, site: int) -> OperatorMatrix:
    """b_site^dagger b_{site+1} restricted to the fixed-N block."""
    if not 0 <= site < basis.sites - 1:
        raise ValueError(f"bond index {site} outside 0..{basis.sites - 2}")
    d = basis.dim
    m = np.zeros((d, d), dtype=complex)
    for col, s in enumerate(basis.states):
        if s[site + 1] == 0:
            continue
        t = list(s)
        t[site + 1] -= 1
        t[site] += 1
        amp = math.sqrt((s[site] + 1) * s[site + 1])
        m[basis.index(tuple(t)), col] = amp
    return OperatorMatrix(basis.space, m)


def bond_operator(basis: LatticeFockBasis, site: int) -> OperatorMatrix:
    """B_j = b_j^dagger b_{j+1} + h.c."""
    hop = hopping_operator(basis, site)
    return hop + hop.dagger()


def site_operators(basis: LatticeFockBasis):
    """Number operators for every site and hopping bilinears for every bond."""
    numbers = [number_operator(basis, j) for j in range(basis.sites)]
    hoppings = [hopping_operator(basis, j) for j in range(basis.sites - 1)]
    return numbers, hoppings
