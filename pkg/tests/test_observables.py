"""Expectation values and derived momentum-distribution quantities."""

import numpy as np
import pytest

from cqedsim.cooling import CoolingParams, gaussian_ansatz
from cqedsim.lindblad import DensityState
from cqedsim.observables import (
    ObservableSeries,
    UndefinedKurtosisError,
    expectation,
    gaussian_ansatz_trajectory,
    kinetic_energy,
    kurtosis,
    lab_frame_photon_number,
    momentum_populations,
    partial_trace,
)
from cqedsim.spaces import (
    MomentumLadder,
    OperatorMatrix,
    SpaceDescriptor,
    fock_number,
    identity,
    tensor,
)


def product_state(pops_mom, pops_photon):
    lad = MomentumLadder(n_max=(len(pops_mom) - 1) // 2)
    ph = SpaceDescriptor.single("photon", len(pops_photon))
    space = SpaceDescriptor(lad.space.factors + ph.factors)
    m = np.kron(np.diag(pops_mom), np.diag(pops_photon)).astype(complex)
    return DensityState(OperatorMatrix(space, m))


class TestObservableSeries:
    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            ObservableSeries("x", [0.0, 1.0], [1.0], "units")

    def test_units_required(self):
        with pytest.raises(ValueError):
            ObservableSeries("x", [0.0], [1.0], "")


class TestExpectation:
    def test_matches_trace(self):
        n = fock_number(4)
        rho = DensityState.from_populations(n.space, [0.1, 0.2, 0.3, 0.4])
        assert expectation(n, rho).real == pytest.approx(0.2 + 0.6 + 1.2)

    def test_warns_on_imaginary_part_of_hermitian_expectation(self):
        sp = SpaceDescriptor.single("x", 2)
        x = OperatorMatrix(sp, np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
        bad = np.array([[0.5, 0.5j], [0.0, 0.5]])  # non-Hermitian "state"
        with pytest.warns(UserWarning):
            expectation(x, bad)

    def test_shape_mismatch_rejected(self):
        n = fock_number(3)
        with pytest.raises(ValueError):
            expectation(n, np.eye(4))


class TestPartialTrace:
    def test_product_state_factors(self):
        pm = np.array([0.2, 0.3, 0.5])
        pp = np.array([0.6, 0.4])
        rho = product_state(pm, pp)
        red_m = partial_trace(rho, rho.space, "momentum")
        red_p = partial_trace(rho, rho.space, "photon")
        assert np.allclose(np.diag(red_m).real, pm)
        assert np.allclose(np.diag(red_p).real, pp)

    def test_preserves_coherences_of_kept_factor(self):
        lad_dim, ph_dim = 3, 2
        rng = np.random.default_rng(0)
        a = rng.normal(size=(lad_dim, lad_dim)) + 1j * rng.normal(size=(lad_dim, lad_dim))
        a = a @ a.conj().T
        a /= np.trace(a).real
        space = SpaceDescriptor((("momentum", lad_dim), ("photon", ph_dim)))
        m = np.kron(a, np.diag([0.7, 0.3])).astype(complex)
        red = partial_trace(m, space, "momentum")
        assert np.allclose(red, a)


class TestMomentumQuantities:
    def test_populations_from_joint_state(self):
        pm = np.array([0.25, 0.5, 0.25])
        rho = product_state(pm, [0.9, 0.1])
        assert np.allclose(momentum_populations(rho), pm)

    def test_kinetic_energy_of_populations(self):
        pops = np.array([0.1, 0.2, 0.4, 0.2, 0.1])  # n = -2..2
        assert kinetic_energy(pops) == pytest.approx(
            4 * 0.1 + 1 * 0.2 + 0 + 1 * 0.2 + 4 * 0.1
        )
        assert kinetic_energy(pops, recoil=2.0) == pytest.approx(2 * 1.2)

    def test_kinetic_energy_traces_out_photon(self):
        pm = np.array([0.2, 0.6, 0.2])
        rho = product_state(pm, [0.5, 0.5])
        assert kinetic_energy(rho) == pytest.approx(0.4)

    def test_kurtosis_of_two_point_distribution(self):
        # symmetric two-point distribution at n = +/- 2: kurtosis exactly 1
        pops = np.array([0.5, 0.0, 0.0, 0.0, 0.5])
        assert kurtosis(pops) == pytest.approx(1.0)

    def test_kurtosis_of_discrete_gaussian_near_three(self):
        n = np.arange(-40, 41, dtype=float)
        pops = np.exp(-(n**2) / 50.0)
        pops /= pops.sum()
        assert kurtosis(pops) == pytest.approx(3.0, abs=1e-6)

    def test_kurtosis_undefined_for_point_mass(self):
        pops = np.zeros(5)
        pops[2] = 1.0
        with pytest.raises(UndefinedKurtosisError):
            kurtosis(pops)


class TestPhotonNumber:
    def test_full_model_operator(self):
        rho = product_state([0.5, 0.0, 0.5], [0.2, 0.3, 0.5])
        lad = MomentumLadder(n_max=1)
        op = tensor(identity(lad.space), fock_number(3, label="photon"))
        assert lab_frame_photon_number(rho, op) == pytest.approx(0.3 + 1.0)


class TestGaussianAnsatzTrajectory:
    def test_exponential_relaxation(self):
        p = CoolingParams(eta=1.0, delta=-20.0, kappa=20.0, ladder=MomentumLadder(n_max=2))
        c = gaussian_ansatz(p)
        t = np.linspace(0.0, 3.0 / c.gamma_c, 7)
        series = gaussian_ansatz_trajectory(c, e0=10.0, t_grid=t)
        expected = c.e_ss + (10.0 - c.e_ss) * np.exp(-c.gamma_c * t)
        assert np.allclose(series.values, expected, rtol=1e-12)
        assert series.values[0] == pytest.approx(10.0)
        assert series.units == "hbar*omega_R"
