"""Liouvillian matrices and their biorthogonal spectral decomposition."""

import numpy as np
import pytest

from cqedsim.bosehubbard import BHParams, build_adiabatic_bh_model
from cqedsim.lindblad import DensityState, LindbladModel, evolve, rhs
from cqedsim.spaces import OperatorMatrix, fock_annihilation, fock_number
from cqedsim.spectral import (
    LiouvillianSizeError,
    liouvillian_matrix,
    reconstruct,
    spectral_decompose,
    steady_state,
)


def decay_model(dim=2, kappa=1.0, delta=3.0):
    a = fock_annihilation(dim)
    n = fock_number(dim)
    return LindbladModel(delta * n, ((kappa, a),))


def random_density(space, seed=0):
    rng = np.random.default_rng(seed)
    d = space.total_dim
    m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = m @ m.conj().T
    return OperatorMatrix(space, m / np.trace(m))


class TestLiouvillianMatrix:
    def test_vectorization_matches_rhs(self):
        # column-stacking: L vec(rho) must equal vec(rhs(rho)) exactly
        model = decay_model(dim=4, kappa=0.7, delta=-1.2)
        lv = liouvillian_matrix(model)
        rho = random_density(model.space, seed=1)
        direct = rhs(model, rho).entries
        via_matrix = (lv @ rho.entries.reshape(-1, order="F")).reshape(
            (4, 4), order="F"
        )
        assert np.abs(direct - via_matrix).max() < 1e-12

    def test_size_cap(self):
        model = decay_model(dim=9)
        with pytest.raises(LiouvillianSizeError):
            liouvillian_matrix(model, size_cap=80)


class TestSpectralDecompose:
    def test_two_level_decay_spectrum(self):
        # photon cutoff 2: eigenvalues are exactly {0, -kappa±iDelta, -2kappa}
        kappa, delta = 1.0, 3.0
        model = decay_model(dim=2, kappa=kappa, delta=delta)
        dec = spectral_decompose(model)
        got = sorted(dec.eigenvalues, key=lambda z: (round(z.real, 9), z.imag))
        expected = sorted(
            [0.0, -2 * kappa, -kappa + 1j * delta, -kappa - 1j * delta],
            key=lambda z: (round(z.real, 9), z.imag),
        )
        assert np.allclose(got, expected, atol=1e-10)

    def test_real_parts_non_positive(self):
        model = decay_model(dim=4, kappa=0.6, delta=2.0)
        dec = spectral_decompose(model)
        assert dec.eigenvalues.real.max() <= 1e-9

    def test_biorthonormality(self):
        model = decay_model(dim=3, kappa=0.8, delta=1.5)
        dec = spectral_decompose(model)
        n = len(dec.eigenvalues)
        gram = np.array(
            [
                [
                    np.trace(dec.left_modes[i].entries.conj().T @ dec.right_modes[j].entries)
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )
        assert np.abs(gram - np.eye(n)).max() < 1e-8

    def test_sorted_by_decay_rate(self):
        model = decay_model(dim=3)
        dec = spectral_decompose(model)
        assert np.all(np.diff(dec.eigenvalues.real) <= 1e-12)

    def test_reconstruction_matches_integration(self):
        # atom-only lattice model on the 10-dim fixed-number block
        p = BHParams(sites=4, bosons=2, u=2.5, eta=5.0, delta=-50.0, kappa=50.0)
        model = build_adiabatic_bh_model(p)
        dec = spectral_decompose(model)
        rho0 = random_density(model.space, seed=2)
        t_grid = np.linspace(0.0, 0.5, 4)
        traj = evolve(
            model,
            DensityState(rho0, positivity_tol=1e-6),
            t_grid,
            rel_tol=1e-10,
            abs_tol=1e-13,
        )
        for t, state in zip(t_grid, traj.states):
            rebuilt = reconstruct(dec, rho0, t).entries
            assert np.abs(rebuilt - state.entries).max() < 1e-6


class TestSteadyState:
    def test_decay_reaches_vacuum(self):
        model = decay_model(dim=5)
        ss = steady_state(model)
        expected = np.zeros((5, 5))
        expected[0, 0] = 1.0
        assert np.abs(ss.entries - expected).max() < 1e-9

    def test_unitary_model_projects_mixed_state(self):
        # no dissipator: every diagonal state is stationary; the returned
        # representative must itself be stationary
        n = fock_number(3)
        model = LindbladModel(n)
        ss = steady_state(model)
        flow = rhs(model, ss.matrix).entries
        assert np.abs(flow).max() < 1e-10
