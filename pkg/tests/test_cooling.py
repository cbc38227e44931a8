"""Cavity-cooling tiers: full model, atom-only model, rate equation, ansatz."""

import numpy as np
import pytest

from cqedsim.cooling import (
    CoolingParams,
    NoCoolingError,
    NonNormalizableError,
    RegimeError,
    alpha_pm,
    build_alpha_operator,
    build_atom_only_cooling_model,
    build_full_cooling_model,
    detailed_balance_steady_state,
    evolve_rate_equation,
    gaussian_ansatz,
    rate_matrix,
    thermal_populations,
    weak_coupling_validity,
)
from cqedsim.lindblad import DensityState, evolve
from cqedsim.observables import kinetic_energy
from cqedsim.spaces import MomentumLadder


def params(eta=1.0, delta=-20.0, kappa=20.0, n_max=10, **kw):
    return CoolingParams(
        eta=eta, delta=delta, kappa=kappa, ladder=MomentumLadder(n_max=n_max), **kw
    )


class TestGaussianAnsatz:
    def test_closed_forms(self):
        p = params()
        c = gaussian_ansatz(p)
        denom = p.delta**2 + p.kappa**2
        assert c.gamma_c == pytest.approx(
            p.eta**2 * (-8.0 * p.delta * p.kappa) / denom**2, rel=1e-12
        )
        assert c.h == pytest.approx(p.eta**2 * p.kappa / denom, rel=1e-12)
        assert c.e_ss == pytest.approx(denom / (8.0 * abs(p.delta)), rel=1e-12)

    def test_minimum_at_matched_detuning(self):
        # E_ss = kappa/4 exactly at Delta = -kappa, and larger elsewhere
        kappa = 13.0
        e_min = gaussian_ansatz(params(delta=-kappa, kappa=kappa)).e_ss
        assert e_min == pytest.approx(kappa / 4.0, rel=1e-12)
        for delta in (-0.3 * kappa, -2.7 * kappa):
            assert gaussian_ansatz(params(delta=delta, kappa=kappa)).e_ss > e_min

    def test_blue_detuning_rejected(self):
        with pytest.raises(NoCoolingError):
            gaussian_ansatz(params(delta=0.5))


class TestFieldAmplitudes:
    def test_closed_form(self):
        p = params()
        wr = p.ladder.recoil
        for n in (-3, 0, 5):
            minus, plus = alpha_pm(p, n)
            assert minus == pytest.approx(
                (p.eta / 2) / (p.delta + 2 * n * wr - wr + 1j * p.kappa), rel=1e-12
            )
            assert plus == pytest.approx(
                (p.eta / 2) / (p.delta - 2 * n * wr - wr + 1j * p.kappa), rel=1e-12
            )

    def test_red_detuning_favours_energy_loss(self):
        # for n > 0 the momentum-lowering channel must dominate
        p = params()
        minus, plus = alpha_pm(p, 5)
        assert abs(minus) > abs(plus)

    def test_off_grid_index_rejected(self):
        with pytest.raises(ValueError):
            alpha_pm(params(n_max=4), 5)

    def test_alpha_operator_couplings(self):
        p = params(n_max=3)
        alpha = build_alpha_operator(p).entries
        lad = p.ladder
        minus, plus = alpha_pm(p, 1)
        assert alpha[lad.index(0), lad.index(1)] == minus
        assert alpha[lad.index(2), lad.index(1)] == plus
        # only first off-diagonals populated
        assert np.count_nonzero(alpha - np.diag(np.diag(alpha, 1), 1) - np.diag(np.diag(alpha, -1), -1)) == 0


class TestModelBuilders:
    def test_full_model_dimensions_and_hermiticity(self):
        p = params(n_max=4, photon_cutoff=3)
        m = build_full_cooling_model(p)
        assert m.dim == (2 * 4 + 1) * 3
        assert m.hamiltonian.is_hermitian()
        assert len(m.dissipators) == 1 and m.dissipators[0][0] == p.kappa

    def test_atom_only_regime_gate(self):
        with pytest.raises(RegimeError):
            build_atom_only_cooling_model(params(eta=10.0, kappa=5.0))
        with pytest.warns(UserWarning):
            build_atom_only_cooling_model(params(eta=6.0, kappa=20.0))

    def test_atom_only_hamiltonian_hermitian(self):
        m = build_atom_only_cooling_model(params(n_max=5))
        assert m.hamiltonian.is_hermitian()


class TestRateEquation:
    def test_interior_columns_conserve_probability(self):
        p = params(n_max=6)
        m = rate_matrix(p)
        sums = m.sum(axis=0)
        assert np.abs(sums[1:-1]).max() < 1e-14
        # boundary columns leak
        assert sums[0] < 0 and sums[-1] < 0

    def test_evolution_cools_thermal_start(self):
        p = params(n_max=20)
        pi0 = thermal_populations(p.ladder, 20.0)
        t = np.linspace(0.0, 400.0, 5)
        pops, leakage = evolve_rate_equation(p, pi0, t)
        energies = [kinetic_energy(row) for row in pops]
        assert all(np.diff(energies) < 0)
        assert 0 <= leakage < 1e-3


class TestDetailedBalance:
    def test_null_vector_of_rate_matrix(self):
        p = params(n_max=15)
        pi = detailed_balance_steady_state(p)
        residual = rate_matrix(p) @ pi
        assert np.abs(residual[1:-1]).max() < 1e-12

    def test_symmetric(self):
        pi = detailed_balance_steady_state(params(n_max=8))
        assert np.allclose(pi, pi[::-1])

    def test_tail_power_law(self):
        # log Pi_n / log n -> 2 Delta / omega_R for large n
        p = params(n_max=40)
        pi = detailed_balance_steady_state(p)
        lad = p.ladder
        n1, n2 = 20, 40
        slope = (np.log(pi[lad.index(n2)]) - np.log(pi[lad.index(n1)])) / (
            np.log(n2) - np.log(n1)
        )
        expected = 2.0 * p.delta / lad.recoil
        assert abs(slope - expected) / abs(expected) < 0.15

    def test_non_normalizable_regime_rejected(self):
        with pytest.raises(NonNormalizableError):
            detailed_balance_steady_state(params(delta=-0.4))


class TestThermalPopulations:
    def test_boltzmann_ratio(self):
        lad = MomentumLadder(n_max=5)
        beta_inv = 4.0
        pi = thermal_populations(lad, beta_inv)
        ratio = pi[lad.index(2)] / pi[lad.index(0)]
        assert ratio == pytest.approx(np.exp(-4.0 / beta_inv), rel=1e-12)
        assert pi.sum() == pytest.approx(1.0)

    def test_rejects_non_positive_temperature(self):
        with pytest.raises(ValueError):
            thermal_populations(MomentumLadder(n_max=3), 0.0)


class TestValidityReport:
    def test_weak_coupling_passes(self):
        rep = weak_coupling_validity(params())
        assert rep.ok
        assert rep.coupling_ratio == pytest.approx(0.05)

    def test_strong_coupling_flagged(self):
        rep = weak_coupling_validity(params(eta=8.0, kappa=20.0))
        assert rep.statuses["coupling_ratio"] != "pass"
        assert not rep.ok


class TestCrossTier:
    def test_full_and_atom_only_agree_on_short_cooling(self):
        # small grid so the full model stays cheap; both tiers must produce
        # the same kinetic-energy decay within a few percent
        p = params(eta=0.5, delta=-4.0, kappa=4.0, n_max=8, photon_cutoff=4)
        pi0 = thermal_populations(p.ladder, 8.0)
        t = np.linspace(0.0, 64.0, 5)

        atom = build_atom_only_cooling_model(p)
        rho_a = DensityState.from_populations(atom.space, pi0)
        traj_a = evolve(atom, rho_a, t)
        e_atom = [kinetic_energy(s) for s in traj_a.states]

        full = build_full_cooling_model(p)
        vac = np.zeros(p.photon_cutoff)
        vac[0] = 1.0
        rho_f = DensityState.from_populations(full.space, np.kron(pi0, vac))
        traj_f = evolve(full, rho_f, t, rotating_frame=True)
        e_full = [kinetic_energy(s) for s in traj_f.states]

        rel = np.abs(np.array(e_atom) - np.array(e_full)) / np.array(e_full)
        assert rel.max() < 0.05
        assert e_full[-1] < e_full[0]
