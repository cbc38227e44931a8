"""Cavity-coupled lattice-gas tiers and their closed-form ingredients."""

import numpy as np
import pytest

from cqedsim.bosehubbard import (
    BHParams,
    alpha1_from_commutator,
    build_adiabatic_bh_model,
    build_alpha0_bh,
    build_alpha1_bh,
    build_bh_hamiltonian,
    build_diabatic_bh_model,
    build_full_bh_model,
    build_theta_bh,
    epsilon_report,
    expand_cqed_terms,
)
from cqedsim.spectral import liouvillian_matrix


def fig_params(eta=100.0, u=2.5, **kw):
    return BHParams(
        sites=4, bosons=2, u=u, eta=eta, delta=-500.0, kappa=500.0, **kw
    )


class TestHamiltonian:
    def test_hermitian_and_correct_diagonal(self):
        p = fig_params()
        h = build_bh_hamiltonian(p)
        assert h.is_hermitian()
        basis = p.basis
        # onsite repulsion of |2,0,0,0> is u/2 * 2 * 1 = u
        i = basis.index((2, 0, 0, 0))
        assert h.entries[i, i] == pytest.approx(p.u)

    def test_hopping_sign(self):
        p = fig_params()
        h = build_bh_hamiltonian(p).entries
        basis = p.basis
        a = basis.index((1, 1, 0, 0))
        b = basis.index((0, 2, 0, 0))
        # -J sqrt(2) between |1,1,0,0> and |0,2,0,0>
        assert h[b, a] == pytest.approx(-np.sqrt(2.0))


class TestTheta:
    def test_staggered_default_weights(self):
        p = fig_params()
        assert p.z_weights == (-1.0, 1.0, -1.0, 1.0)
        assert p.y_weights == (0.0, 0.0, 0.0)

    def test_diagonal_values(self):
        p = fig_params()
        theta = build_theta_bh(p).entries
        basis = p.basis
        i = basis.index((1, 0, 1, 0))
        assert theta[i, i] == pytest.approx(-2.0)
        j = basis.index((0, 1, 0, 1))
        assert theta[j, j] == pytest.approx(2.0)

    def test_fully_mixed_invariant(self):
        # <Theta^2>/N^2 on the maximally mixed state equals 24/10/4 = 0.6
        p = fig_params()
        theta = build_theta_bh(p).entries
        val = np.trace(theta @ theta).real / p.basis.dim / p.bosons**2
        assert val == pytest.approx(0.6, abs=1e-14)

    def test_custom_weights(self):
        p = fig_params(z=(1.0, 0.0, 0.0, 0.0), y=(0.0, 0.0, 0.0))
        theta = build_theta_bh(p).entries
        occ0 = [s[0] for s in p.basis.states]
        assert np.allclose(np.diag(theta).real, occ0)


class TestAlphaOperators:
    def test_alpha0_prefactor(self):
        p = fig_params()
        a0 = build_alpha0_bh(p).entries
        theta = build_theta_bh(p).entries
        pref = p.eta / (p.delta + 1j * p.kappa)
        assert pref == pytest.approx(-0.1 - 0.1j, rel=1e-12)
        assert np.allclose(a0, pref * theta)

    def test_closed_form_matches_commutator_oracle(self):
        p = fig_params()
        dev = np.abs(
            build_alpha1_bh(p).entries - alpha1_from_commutator(p).entries
        ).max()
        assert dev < 1e-12 * np.abs(build_alpha1_bh(p).entries).max()

    def test_commutator_construction_for_random_weights(self):
        rng = np.random.default_rng(11)
        p = fig_params(
            z=tuple(rng.normal(size=4)), y=tuple(rng.normal(size=3))
        )
        a1 = build_alpha1_bh(p)
        assert np.allclose(a1.entries, alpha1_from_commutator(p).entries)

    def test_alpha1_vanishes_without_hopping(self):
        p = fig_params(j_hop=0.0)
        assert np.abs(build_alpha1_bh(p).entries).max() == 0.0


class TestModelTiers:
    def test_full_model_structure(self):
        p = fig_params(photon_cutoff=3)
        m = build_full_bh_model(p)
        assert m.dim == p.basis.dim * 3
        assert m.hamiltonian.is_hermitian()

    def test_adiabatic_coefficients(self):
        p = fig_params()
        m = build_adiabatic_bh_model(p)
        gamma = m.dissipators[0][0]
        assert gamma == pytest.approx(p.kappa * p.eta**2 / p.lorentzian, rel=1e-12)
        # eta=100, Delta=-500, kappa=500 -> Gamma = 10, interaction -10 Theta^2
        assert gamma == pytest.approx(10.0, rel=1e-12)
        theta = build_theta_bh(p)
        shift = m.hamiltonian + (-1.0) * build_bh_hamiltonian(p)
        assert np.allclose(shift.entries, -10.0 * (theta @ theta).entries)

    def test_diabatic_reduces_to_adiabatic_without_hopping(self):
        p = fig_params(j_hop=0.0, u=0.0)
        ad = liouvillian_matrix(build_adiabatic_bh_model(p))
        di = liouvillian_matrix(build_diabatic_bh_model(p))
        assert np.abs(ad - di).max() < 1e-9 * np.abs(ad).max()

    def test_eta_zero_is_pure_lattice_dynamics(self):
        p = fig_params(eta=0.0)
        m = build_diabatic_bh_model(p)
        assert np.allclose(m.hamiltonian.entries, build_bh_hamiltonian(p).entries)
        assert np.abs(m.dissipators[0][1].entries).max() == 0.0

    def test_sign_flip_of_theta_leaves_tiers_invariant(self):
        # Z -> -Z flips Theta but not Theta^2 or the dissipator
        p = fig_params()
        q = fig_params(z=tuple(-z for z in p.z_weights), y=p.y_weights)
        for build in (build_adiabatic_bh_model, build_diabatic_bh_model):
            lp = liouvillian_matrix(build(p))
            lq = liouvillian_matrix(build(q))
            assert np.abs(lp - lq).max() < 1e-9 * np.abs(lp).max()


class TestEpsilonReport:
    def test_figure_values(self):
        rep = epsilon_report(fig_params(eta=100.0))
        assert rep.eps_fig3 == pytest.approx(0.04, rel=1e-12)
        assert rep.eps2 == pytest.approx(0.2, rel=1e-12)
        assert rep.gamma_heat == pytest.approx(10.0, rel=1e-12)
        assert rep.eps1 is None and rep.adiabatic_lhs is None
        rep36 = epsilon_report(fig_params(eta=300.0))
        assert rep36.eps_fig3 == pytest.approx(0.36, rel=1e-12)

    def test_adiabaticity_product(self):
        rep = epsilon_report(fig_params(), e_kin=2.0, recoil=1.0)
        mod = np.hypot(500.0, 500.0)
        assert rep.eps1 == pytest.approx(np.sqrt(8.0) / mod, rel=1e-12)
        assert rep.adiabatic_lhs == pytest.approx(rep.eps1 * rep.eps2, rel=1e-12)


class TestExpandedTerms:
    @pytest.mark.parametrize("weights", ["default", "random"])
    def test_terms_sum_to_adiabatic_model(self, weights):
        if weights == "default":
            p = fig_params(y=(0.3, -0.2, 0.5), z=(-1.0, 1.0, -1.0, 1.0))
        else:
            rng = np.random.default_rng(5)
            p = fig_params(z=tuple(rng.normal(size=4)), y=tuple(rng.normal(size=3)))
        terms = expand_cqed_terms(p)

        theta = build_theta_bh(p).entries
        pref = p.delta * p.eta**2 / p.lorentzian
        ham_sum = sum(t.entries for t in terms.hamiltonian_terms.values())
        assert np.abs(ham_sum - pref * theta @ theta).max() < 1e-12 * np.abs(
            ham_sum
        ).max()

        gamma = p.kappa * p.eta**2 / p.lorentzian
        d = theta.shape[0]
        eye = np.eye(d)
        k = theta.conj().T @ theta
        full_diss = gamma * (
            2.0 * np.kron(theta.conj(), theta)
            - np.kron(eye, k)
            - np.kron(k.T, eye)
        )
        diss_sum = sum(terms.dissipator_terms.values())
        assert np.abs(diss_sum - full_diss).max() < 1e-12 * np.abs(full_diss).max()
