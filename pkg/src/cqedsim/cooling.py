"""Cavity-cooling model hierarchy for a single atom on a momentum ladder.

Four tiers share one parameter set: the full atom-photon Lindblad model, the
weak-coupling atom-only Lindblad model, the classical rate equation for the
momentum populations, and the Gaussian-ansatz closed form for the mean
kinetic energy.  All frequencies are in units of the recoil frequency
omega_R and eta is taken real and positive (its phase drops out of every
computed quantity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import warnings

import numpy as np
import scipy.linalg

from .lindblad import LindbladModel
from .spaces import (
    MomentumLadder,
    OperatorMatrix,
    cos2_kx,
    cos_kx,
    fock_annihilation,
    fock_number,
    identity,
    kinetic,
    tensor,
)

__all__ = [
    "CoolingParams",
    "GaussianAnsatzCoefficients",
    "RegimeError",
    "NoCoolingError",
    "NonNormalizableError",
    "build_full_cooling_model",
    "alpha_pm",
    "build_alpha_operator",
    "build_atom_only_cooling_model",
    "rate_matrix",
    "evolve_rate_equation",
    "gaussian_ansatz",
    "detailed_balance_steady_state",
    "thermal_populations",
    "weak_coupling_validity",
    "ValidityReport",
]


class RegimeError(ValueError):
    """Raised when parameters violate the validity regime of a model tier."""


class NoCoolingError(ValueError):
    """Raised when the cooling rate is non-positive (detuning not red)."""


class NonNormalizableError(ValueError):
    """Raised when the detailed-balance distribution has non-integrable tails."""


@dataclass(frozen=True)
class CoolingParams:
    """Pump/cavity parameters (units of omega_R) plus the momentum grid."""

    eta: float
    delta: float
    kappa: float
    dispersive_shift: float = 0.0
    ladder: MomentumLadder = field(default_factory=lambda: MomentumLadder(n_max=40))
    photon_cutoff: int = 6

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.photon_cutoff < 2:
            raise ValueError("photon_cutoff must be >= 2")

    @property
    def coupling_ratio(self) -> float:
        return abs(self.eta) / self.kappa


def _check_weak_coupling(p: CoolingParams):
    r = p.coupling_ratio
    if r > 0.5:
        raise RegimeError(
            f"|eta|/kappa = {r:.3g} > 0.5: weak-coupling elimination invalid"
        )
    if r > 0.2:
        warnings.warn(
            f"|eta|/kappa = {r:.3g} > 0.2: weak-coupling model marginal", stacklevel=3
        )


def build_full_cooling_model(p: CoolingParams) -> LindbladModel:
    """Atom (momentum ladder) coupled to a lossy photon mode.

    H = kinetic x I - Delta * I x a^dag a + U * cos^2(kx) x a^dag a
        + eta (cos(kx) x a^dag + cos(kx) x a),  dissipator (kappa, I x a).
    """
    lad = p.ladder
    a = fock_annihilation(p.photon_cutoff, label="photon")
    n_ph = fock_number(p.photon_cutoff, label="photon")
    i_at = identity(lad.space)
    i_ph = identity(a.space)
    cos1 = cos_kx(lad)

    h = tensor(kinetic(lad), i_ph)
    h = h + (-p.delta) * tensor(i_at, n_ph)
    if p.dispersive_shift != 0.0:
        h = h + p.dispersive_shift * tensor(cos2_kx(lad), n_ph)
    h = h + p.eta * (tensor(cos1, a.dagger()) + tensor(cos1, a))
    return LindbladModel(h, ((p.kappa, tensor(i_at, a)),))


def alpha_pm(p: CoolingParams, n: int) -> tuple[complex, complex]:
    """Field amplitudes for scattering out of |p = n hbar k> to p -/+ hbar k.

    alpha_(-/+) = (eta/2) / (Delta +/- 2 n omega_R - omega_R + i kappa).
    """
    if abs(n) > p.ladder.n_max:
        raise ValueError(f"momentum index {n} outside the grid")
    wr = p.ladder.recoil
    base = p.delta - wr + 1j * p.kappa
    minus = (p.eta / 2.0) / (base + 2.0 * n * wr)
    plus = (p.eta / 2.0) / (base - 2.0 * n * wr)
    return minus, plus


def build_alpha_operator(p: CoolingParams) -> OperatorMatrix:
    """Adiabatic cavity-field operator on the momentum ladder.

    alpha = sum_p ( alpha_-(p) |p - hbar k><p| + alpha_+(p) |p + hbar k><p| ),
    with couplings leaving the grid dropped.
    """
    lad = p.ladder
    d = lad.dim
    m = np.zeros((d, d), dtype=complex)
    for n in lad.n_values:
        minus, plus = alpha_pm(p, n)
        col = lad.index(n)
        if n - 1 >= -lad.n_max:
            m[lad.index(n - 1), col] = minus
        if n + 1 <= lad.n_max:
            m[lad.index(n + 1), col] = plus
    return OperatorMatrix(lad.space, m)


def build_atom_only_cooling_model(p: CoolingParams) -> LindbladModel:
    """Weak-coupling atom-only model: H = kinetic + (eta/2)(alpha^dag cos + cos alpha) + h.c. part.

    The cavity-mediated term is Hermitized explicitly; one dissipator
    (kappa, alpha).  Raises ``RegimeError`` when |eta|/kappa > 0.5.
    """
    _check_weak_coupling(p)
    lad = p.ladder
    alpha = build_alpha_operator(p)
    cos1 = cos_kx(lad)
    coupling = 0.5 * p.eta * (alpha.dagger() @ cos1)
    h = kinetic(lad) + coupling + coupling.dagger()
    return LindbladModel(h, ((p.kappa, alpha),))


# ---------------------------------------------------------------------------
# Classical rate equation over the momentum populations
# ---------------------------------------------------------------------------


def _rates(p: CoolingParams):
    """r_-/+(n) = 2 kappa |alpha_-/+(n)|^2 for every grid point."""
    r_minus = np.empty(p.ladder.dim)
    r_plus = np.empty(p.ladder.dim)
    for i, n in enumerate(p.ladder.n_values):
        minus, plus = alpha_pm(p, n)
        r_minus[i] = 2.0 * p.kappa * abs(minus) ** 2
        r_plus[i] = 2.0 * p.kappa * abs(plus) ** 2
    return r_minus, r_plus


def rate_matrix(p: CoolingParams) -> np.ndarray:
    """Generator M of dPi/dt = M Pi on the momentum grid.

    Gains from outside the grid are dropped; losses are kept on the
    diagonal, so the two boundary columns leak probability (reported by
    ``evolve_rate_equation``).
    """
    r_minus, r_plus = _rates(p)
    d = p.ladder.dim
    m = np.zeros((d, d))
    for i in range(d):
        m[i, i] = -(r_minus[i] + r_plus[i])
        if i + 1 < d:
            m[i + 1, i] = r_plus[i]
        if i - 1 >= 0:
            m[i - 1, i] = r_minus[i]
    return m


def evolve_rate_equation(p: CoolingParams, pi0, t_grid):
    """Propagate the classical rate equation exactly via matrix exponentials.

    Returns (populations array of shape (len(t_grid), dim), boundary leakage
    1 - sum(Pi) at the final time).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    pi = np.asarray(pi0, dtype=float).copy()
    m = rate_matrix(p)
    out = np.empty((len(t_grid), len(pi)))
    t_prev = t_grid[0]
    out[0] = pi
    for i, t in enumerate(t_grid[1:], start=1):
        pi = scipy.linalg.expm(m * (t - t_prev)) @ pi
        out[i] = pi
        t_prev = t
    leakage = 1.0 - out[-1].sum()
    return out, leakage


@dataclass(frozen=True)
class GaussianAnsatzCoefficients:
    """Closed-form cooling rate, heating coefficient, and their fixed point."""

    gamma_c: float  # units omega_R
    h: float  # units hbar omega_R^2
    e_ss: float  # units hbar omega_R


def gaussian_ansatz(p: CoolingParams) -> GaussianAnsatzCoefficients:
    """Leading-order coefficients of dE_kin/dt = -gamma_c E_kin + h.

    gamma_c = omega_R eta^2 (-8 Delta kappa)/(Delta^2+kappa^2)^2,
    h = omega_R eta^2 kappa/(Delta^2+kappa^2), E_ss = (Delta^2+kappa^2)/(8|Delta|).
    Requires Delta < 0 (red detuning, cooling).
    """
    if p.delta >= 0:
        raise NoCoolingError(f"no cooling for Delta = {p.delta} >= 0")
    wr = p.ladder.recoil
    denom = p.delta**2 + p.kappa**2
    gamma_c = wr * p.eta**2 * (-8.0 * p.delta * p.kappa) / denom**2
    h = wr * p.eta**2 * p.kappa / denom
    return GaussianAnsatzCoefficients(gamma_c=gamma_c, h=h, e_ss=h / gamma_c)


def detailed_balance_steady_state(p: CoolingParams) -> np.ndarray:
    """Stationary momentum distribution from detailed balance.

    Pi_{n+1} = Pi_n r_+(n)/r_-(n+1), built outward from n = 0 in log space,
    symmetrized via r_+(-n) = r_-(n), normalized on the truncated grid.
    The tails fall off as n^{2 Delta/omega_R}; normalizable only for
    Delta < -omega_R/2.
    """
    wr = p.ladder.recoil
    if p.delta >= -wr / 2.0:
        raise NonNormalizableError(
            f"detailed-balance tails non-normalizable for Delta = {p.delta} >= -{wr / 2}"
        )
    r_minus, r_plus = _rates(p)
    lad = p.ladder
    log_pi = np.full(lad.dim, -np.inf)
    log_pi[lad.index(0)] = 0.0
    for n in range(0, lad.n_max):
        i = lad.index(n)
        log_pi[i + 1] = log_pi[i] + np.log(r_plus[i]) - np.log(r_minus[i + 1])
    for n in range(1, lad.n_max + 1):
        log_pi[lad.index(-n)] = log_pi[lad.index(n)]
    pi = np.exp(log_pi - log_pi.max())
    return pi / pi.sum()


def thermal_populations(ladder: MomentumLadder, beta_inv: float) -> np.ndarray:
    """Discrete thermal distribution Pi_n proportional to exp(-n^2 omega_R/beta_inv)."""
    if beta_inv <= 0:
        raise ValueError("temperature must be positive")
    n = ladder.n_values.astype(float)
    w = np.exp(-(n**2) * ladder.recoil / beta_inv)
    return w / w.sum()


@dataclass(frozen=True)
class ValidityReport:
    """Weak-coupling diagnostics, each value with a pass/warn/fail status."""

    photon_number: float
    coupling_ratio: float
    shift_ratio: float
    timescale_ratio: float
    statuses: dict[str, str]

    @property
    def ok(self) -> bool:
        return all(s == "pass" for s in self.statuses.values())


def _status(value: float) -> str:
    if value < 0.1:
        return "pass"
    if value < 0.3:
        return "warn"
    return "fail"


def weak_coupling_validity(p: CoolingParams, populations=None) -> ValidityReport:
    """Diagnose the weak-coupling assumptions for a given momentum distribution.

    Reports the adiabatic intracavity photon number <alpha^dag alpha>, the
    drive ratio |eta|/kappa, the dispersive-shift ratio |U <cos^2>|/kappa,
    and the timescale separation gamma_c/kappa.
    """
    lad = p.ladder
    if populations is None:
        populations = np.zeros(lad.dim)
        populations[lad.index(0)] = 1.0
    populations = np.asarray(populations, dtype=float)

    alpha = build_alpha_operator(p).entries
    n_adiabatic = float(
        np.real(np.diag(alpha.conj().T @ alpha)) @ populations
    )
    cos2_diag = np.real(np.diag(cos2_kx(lad).entries))
    shift = abs(p.dispersive_shift * float(cos2_diag @ populations)) / p.kappa
    try:
        gamma_c = gaussian_ansatz(p).gamma_c
    except NoCoolingError:
        gamma_c = 0.0
    tsr = gamma_c / p.kappa
    statuses = {
        "photon_number": _status(n_adiabatic),
        "coupling_ratio": _status(p.coupling_ratio),
        "shift_ratio": _status(shift),
        "timescale_ratio": _status(tsr),
    }
    return ValidityReport(n_adiabatic, p.coupling_ratio, shift, tsr, statuses)
