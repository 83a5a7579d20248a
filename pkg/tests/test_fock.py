"""Truncated Fock-space oracle: operators, circuits, moments, fidelity."""

import numpy as np
import pytest

from gaussfid import (
    CircuitSpec,
    InvalidParameter,
    TruncationError,
    build_circuit_state,
    coherent,
    fidelity,
    moments_from_fock,
    random_circuit,
    thermal,
    uhlmann_fidelity_matrix,
    vacuum,
)
from gaussfid.core import cov_from_w, w_matrix, square_root_cov, product_w
from gaussfid.fidelity import aux_matrix, aux_spectrum, ftot_from_spectrum
from gaussfid.fock import destroy, fidelity_of_matrices, thermal_fock


def one_mode_circuit(nbar=0.0, r=0.0, phi=0.0, alpha=0.0):
    ops = []
    if r:
        ops.append(("squeeze", 0, r, phi))
    if alpha:
        ops.append(("displace", 0, alpha))
    return CircuitSpec(n_modes=1, thermal_nbar=(nbar,), ops=tuple(ops))


class TestOperators:
    def test_destroy_action(self):
        a = destroy(5)
        ket2 = np.zeros(5)
        ket2[2] = 1.0
        np.testing.assert_allclose(a @ ket2, np.sqrt(2.0) * np.eye(5)[1])

    def test_commutator(self):
        a = destroy(30)
        comm = a @ a.conj().T - a.conj().T @ a
        # canonical except at the truncation corner
        np.testing.assert_allclose(comm[:-1, :-1], np.eye(29), atol=1e-12)

    def test_thermal_distribution(self):
        nbar = 0.5
        rho = thermal_fock(nbar, 40)
        k = np.arange(40)
        np.testing.assert_allclose(np.diag(rho).real,
                                   nbar ** k / (1 + nbar) ** (k + 1), atol=1e-15)


class TestBuildCircuitState:
    def test_empty_circuit_is_vacuum(self):
        built = build_circuit_state(CircuitSpec(1, (0.0,), ()), cutoff=10)
        np.testing.assert_allclose(built.fock.rho[0, 0], 1.0, atol=1e-12)
        np.testing.assert_allclose(built.gaussian.V, 0.5 * np.eye(2), atol=1e-15)
        assert built.fock.trace_deficit == 0.0

    def test_thermal_input(self):
        built = build_circuit_state(one_mode_circuit(nbar=0.5), cutoff=40)
        built.fock.validate()
        np.testing.assert_allclose(built.gaussian.V, np.eye(2), atol=1e-15)
        nbar = 0.5
        k = np.arange(40)
        np.testing.assert_allclose(np.diag(built.fock.rho).real,
                                   nbar ** k / (1 + nbar) ** (k + 1), atol=1e-15)

    def test_displacement_first_moment(self):
        built = build_circuit_state(one_mode_circuit(alpha=1.0), cutoff=40)
        measured = moments_from_fock(built.fock)
        assert measured.u[0] == pytest.approx(np.sqrt(2.0), abs=1e-7)
        np.testing.assert_allclose(measured.u, built.gaussian.u, atol=1e-7)

    def test_parameter_limits_enforced(self):
        with pytest.raises(InvalidParameter):
            build_circuit_state(one_mode_circuit(alpha=2.0))
        with pytest.raises(InvalidParameter):
            build_circuit_state(one_mode_circuit(r=1.0))
        with pytest.raises(InvalidParameter):
            build_circuit_state(CircuitSpec(1, (2.0,), ()))

    def test_three_modes_rejected(self):
        with pytest.raises(InvalidParameter):
            build_circuit_state(CircuitSpec(3, (0.0,) * 3, ()))

    def test_truncation_budget(self):
        with pytest.raises(TruncationError):
            build_circuit_state(one_mode_circuit(nbar=1.5), cutoff=8)


class TestMomentsFromFock:
    def test_vacuum(self):
        built = build_circuit_state(CircuitSpec(1, (0.0,), ()), cutoff=12)
        state = moments_from_fock(built.fock)
        np.testing.assert_allclose(state.u, 0.0, atol=1e-12)
        np.testing.assert_allclose(state.V, 0.5 * np.eye(2), atol=1e-10)

    def test_squeezed_vacuum_matches_tracker(self):
        built = build_circuit_state(one_mode_circuit(r=0.5), cutoff=40)
        state = moments_from_fock(built.fock)
        np.testing.assert_allclose(np.diag(state.V),
                                   [0.5 * np.exp(-1.0), 0.5 * np.exp(1.0)], atol=1e-8)
        np.testing.assert_allclose(state.V, built.gaussian.V, atol=1e-8)

    def test_thermal_second_moment(self):
        built = build_circuit_state(one_mode_circuit(nbar=0.5), cutoff=40)
        state = moments_from_fock(built.fock)
        np.testing.assert_allclose(state.V, np.eye(2), atol=1e-8)

    @pytest.mark.parametrize("seed", range(40))
    def test_representation_consistency_one_mode(self, seed):
        rng = np.random.default_rng(4000 + seed)
        built = build_circuit_state(random_circuit(1, rng))
        measured = moments_from_fock(built.fock)
        tol = max(1e-6, 10.0 * built.fock.trace_deficit)
        np.testing.assert_allclose(measured.u, built.gaussian.u, atol=tol)
        np.testing.assert_allclose(measured.V, built.gaussian.V, atol=tol)

    @pytest.mark.parametrize("seed", range(10))
    def test_representation_consistency_two_modes(self, seed):
        rng = np.random.default_rng(4100 + seed)
        built = build_circuit_state(random_circuit(2, rng))
        measured = moments_from_fock(built.fock)
        tol = max(1e-6, 10.0 * built.fock.trace_deficit)
        np.testing.assert_allclose(measured.u, built.gaussian.u, atol=tol)
        np.testing.assert_allclose(measured.V, built.gaussian.V, atol=tol)


class TestUhlmannFidelity:
    def test_self_fidelity(self):
        rng = np.random.default_rng(1)
        built = build_circuit_state(random_circuit(1, rng))
        assert uhlmann_fidelity_matrix(built.fock, built.fock) == pytest.approx(1.0, abs=1e-9)

    def test_vacuum_vs_coherent(self):
        vac = build_circuit_state(CircuitSpec(1, (0.0,), ()), cutoff=40)
        coh = build_circuit_state(one_mode_circuit(alpha=1.0), cutoff=40)
        f = uhlmann_fidelity_matrix(vac.fock, coh.fock)
        assert f == pytest.approx(np.exp(-0.5), abs=1e-7)

    def test_two_thermal_states_match_engine(self):
        a = build_circuit_state(one_mode_circuit(nbar=0.3), cutoff=40)
        b = build_circuit_state(one_mode_circuit(nbar=0.7), cutoff=40)
        f_oracle = uhlmann_fidelity_matrix(a.fock, b.fock)
        f_engine = fidelity(thermal([0.3]), thermal([0.7])).F
        assert f_oracle == pytest.approx(f_engine, abs=1e-6)

    def test_dimension_mismatch(self):
        a = build_circuit_state(CircuitSpec(1, (0.0,), ()), cutoff=10)
        b = build_circuit_state(CircuitSpec(1, (0.0,), ()), cutoff=12)
        with pytest.raises(InvalidParameter):
            uhlmann_fidelity_matrix(a.fock, b.fock)

    @pytest.mark.parametrize("seed", range(5))
    def test_engine_agreement_one_mode(self, seed):
        rng = np.random.default_rng(4200 + seed)
        a = build_circuit_state(random_circuit(1, rng))
        b = build_circuit_state(random_circuit(1, rng))
        f_oracle = uhlmann_fidelity_matrix(a.fock, b.fock)
        f_engine = fidelity(a.gaussian, b.gaussian).F
        assert abs(f_engine - f_oracle) < 1e-6

    def test_multiplicativity_under_tensoring(self):
        # parameters small enough for the cutoff-15 trace budget
        a1 = build_circuit_state(one_mode_circuit(nbar=0.2, r=0.2), cutoff=15)
        b1 = build_circuit_state(one_mode_circuit(nbar=0.1, alpha=0.5), cutoff=15)
        a2 = build_circuit_state(one_mode_circuit(r=-0.3, alpha=0.3j), cutoff=15)
        b2 = build_circuit_state(one_mode_circuit(nbar=0.25), cutoff=15)
        f1 = fidelity_of_matrices(a1.fock.rho, b1.fock.rho)
        f2 = fidelity_of_matrices(a2.fock.rho, b2.fock.rho)
        f_joint = fidelity_of_matrices(np.kron(a1.fock.rho, a2.fock.rho),
                                       np.kron(b1.fock.rho, b2.fock.rho))
        assert f_joint == pytest.approx(f1 * f2, abs=1e-6)


class TestOperatorComposition:
    """sqrt(rho1) rho2 sqrt(rho1) in Fock space against the W-matrix calculus."""

    @pytest.mark.parametrize("seed", range(3))
    def test_total_state_moments(self, seed):
        # zero-mean circuits so the composition stays quadratic
        rng = np.random.default_rng(4300 + seed)
        r1, r2 = rng.uniform(-0.4, 0.4, 2)
        nb1, nb2 = rng.uniform(0.1, 0.6, 2)
        a = build_circuit_state(one_mode_circuit(nbar=nb1, r=r1), cutoff=40)
        b = build_circuit_state(
            CircuitSpec(1, (nb2,), (("squeeze", 0, r2, rng.uniform(0, np.pi)),)),
            cutoff=40)

        # Fock side
        w1, U1 = np.linalg.eigh(a.fock.rho)
        root1 = (U1 * np.sqrt(np.clip(w1, 0, None))) @ U1.conj().T
        rho_tot = root1 @ b.fock.rho @ root1
        from gaussfid.fock import FockDensityMatrix
        tot = FockDensityMatrix(1, (40,), rho_tot / np.trace(rho_tot).real, 0.0)
        measured = moments_from_fock(tot)

        # moment side: compose W matrices of sqrt(rho1), rho2, sqrt(rho1)
        w_sq1 = w_matrix(square_root_cov(a.gaussian.V))
        w_mid = product_w(w_sq1, w_matrix(b.gaussian.V)).W
        w_tot = product_w(w_mid, w_sq1).W
        v_tot = cov_from_w(w_tot)
        assert np.max(np.abs(v_tot.imag)) < 1e-9
        np.testing.assert_allclose(measured.V, v_tot.real, atol=1e-6)

        # Hermitian product: eigenvalues of W_tot come in real +- pairs
        eigs = np.linalg.eigvals(w_tot)
        assert np.max(np.abs(eigs.imag)) < 1e-9 * np.max(np.abs(eigs))
        np.testing.assert_allclose(np.sort(eigs.real), np.sort(-eigs.real), atol=1e-9)

        # the composed spectrum reproduces Ftot of the eigenvalue route
        delta = np.linalg.det(a.gaussian.V + b.gaussian.V)
        f_oracle = fidelity_of_matrices(a.fock.rho, b.fock.rho)
        spec = aux_spectrum(aux_matrix(a.gaussian.V, b.gaussian.V))
        assert f_oracle * delta ** 0.25 == pytest.approx(
            ftot_from_spectrum(spec.retained), abs=1e-6)


class TestRandomCircuit:
    def test_deterministic_and_buildable(self):
        a = random_circuit(1, np.random.default_rng(123))
        b = random_circuit(1, np.random.default_rng(123))
        assert a == b
        built = build_circuit_state(a)
        built.fock.validate()

    def test_rejects_three_modes(self):
        with pytest.raises(InvalidParameter):
            random_circuit(3, np.random.default_rng(0))
