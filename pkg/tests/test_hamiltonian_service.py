from functools import reduce

import numpy as np
import pytest
from scipy.sparse.linalg import ArpackNoConvergence

from services import hamiltonian_service
from services.hamiltonian_service import (
    Coupling,
    HamiltonianSpec,
    SolverSettings,
    apply_hamiltonian,
    chain_spec,
    ground_state,
    hamiltonian_operator,
    ising_saturation_mx2,
    ising_spec,
    load_spec,
    parity_sectors,
    parity_symmetric,
    save_spec,
)
from services.state_service import pauli_expectation
from utils.exceptions import SolverError, ValidationError


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _kron_term(n, factors):
    ops = [np.eye(2, dtype=complex)] * n
    for site, axis in factors:
        ops[site] = PAULI[axis]
    return reduce(np.kron, ops)


def _reference_matrix(spec):
    n = spec.n_qubits
    matrix = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for c in spec.couplings:
        matrix -= c.strength * _kron_term(n, [(c.i, c.axis), (c.j, c.axis_j)])
    for site, gamma in enumerate(spec.z_fields):
        matrix -= gamma * _kron_term(n, [(site, "z")])
    for site, epsilon in enumerate(spec.x_fields):
        matrix -= epsilon * _kron_term(n, [(site, "x")])
    return matrix


# -----------------------------------------------------------------------------
# Operador
# -----------------------------------------------------------------------------
def test_operator_matches_kronecker_construction():
    spec = chain_spec(4, gamma_x=1.0, gamma_y=0.5, gamma_z=0.3, z_field=0.7, epsilon_x=0.2)
    np.testing.assert_allclose(hamiltonian_operator(spec).dense(), _reference_matrix(spec), atol=1e-12)


def test_apply_matches_dense_on_random_vectors(rng):
    spec = chain_spec(5, gamma_x=1.0, gamma_y=0.4, z_field=1.0, periodic=True)
    dense = hamiltonian_operator(spec).dense()
    vector = rng.normal(size=32) + 1j * rng.normal(size=32)
    np.testing.assert_allclose(apply_hamiltonian(spec, vector), dense @ vector, atol=1e-12)
    block = rng.normal(size=(32, 3))
    np.testing.assert_allclose(apply_hamiltonian(spec, block), dense @ block, atol=1e-12)


def test_dense_matrix_is_hermitian():
    dense = hamiltonian_operator(chain_spec(3, 1.0, 0.6, 0.2)).dense()
    np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)


def test_apply_rejects_wrong_length():
    with pytest.raises(ValidationError):
        apply_hamiltonian(ising_spec(3, 1.0), np.ones(4))


def test_mixed_axis_coupling():
    spec = HamiltonianSpec(n_qubits=2, couplings=(Coupling(0, 1, "x", 0.5, axis_j="z"),))
    np.testing.assert_allclose(hamiltonian_operator(spec).dense(), _reference_matrix(spec), atol=1e-12)
    assert not parity_symmetric(spec)


# -----------------------------------------------------------------------------
# Especificação
# -----------------------------------------------------------------------------
def test_model_family_requires_ordered_couplings():
    with pytest.raises(ValidationError):
        chain_spec(4, gamma_x=0.2, gamma_y=0.5)


def test_negative_lambda_raises():
    with pytest.raises(ValidationError):
        ising_spec(4, -1.0)


def test_periodic_chain_closes_ring():
    spec = ising_spec(4, 1.0, periodic=True)
    assert {(c.i, c.j) for c in spec.couplings} == {(0, 1), (1, 2), (2, 3), (3, 0)}


def test_spec_round_trip(tmp_path):
    spec = chain_spec(4, gamma_x=1.0, gamma_y=0.5, epsilon_x=0.1, periodic=True)
    assert HamiltonianSpec.from_dict(spec.to_dict()) == spec
    assert load_spec(save_spec(spec, tmp_path / "specs" / "chain.json")) == spec


def test_from_dict_rejects_missing_size():
    with pytest.raises(ValidationError):
        HamiltonianSpec.from_dict({"couplings": []})


# -----------------------------------------------------------------------------
# Paridade e estado fundamental
# -----------------------------------------------------------------------------
def test_parity_symmetry_detection():
    assert parity_symmetric(ising_spec(4, 1.0))
    assert parity_symmetric(chain_spec(4, 1.0, 0.5, 0.2))
    assert not parity_symmetric(ising_spec(4, 1.0, epsilon_x=0.1))


def test_parity_sectors_split_the_basis():
    even, odd = parity_sectors(4)
    assert len(even) == len(odd) == 8
    assert 0 in even and 1 in odd and 3 in even


def test_zero_coupling_ground_state():
    result = ground_state(ising_spec(6, 0.0))
    assert result.energy == pytest.approx(-6.0)
    assert result.gap == pytest.approx(2.0)
    assert result.parity == 1
    assert abs(result.state.amplitudes[0]) == pytest.approx(1.0)


def test_ground_state_energy_matches_full_spectrum():
    spec = ising_spec(6, 1.3)
    values = np.linalg.eigvalsh(_reference_matrix(spec))
    result = ground_state(spec)
    assert result.energy == pytest.approx(values[0], abs=1e-10)
    assert result.gap == pytest.approx(values[1] - values[0], abs=1e-8)


def test_lanczos_matches_dense():
    spec = ising_spec(8, 0.5)
    dense = ground_state(spec)
    lanczos = ground_state(spec, SolverSettings(dense_max_qubits=2))
    assert lanczos.method == "lanczos"
    assert lanczos.energy == pytest.approx(dense.energy, abs=1e-9)
    overlap = abs(np.vdot(dense.state.amplitudes, lanczos.state.amplitudes))
    assert overlap == pytest.approx(1.0, abs=1e-6)


def test_ground_energy_decreases_with_coupling():
    energies = [ground_state(ising_spec(6, lam)).energy for lam in np.linspace(0.0, 2.5, 11)]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_parity_symmetric_ground_state_has_no_transverse_magnetization(lam):
    state = ground_state(ising_spec(6, lam)).state
    for site in range(6):
        assert pauli_expectation(state, [(site, "x")]) == pytest.approx(0.0, abs=1e-10)
        assert pauli_expectation(state, [(site, "y")]) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.slow
def test_ordered_phase_gap_closes():
    result = ground_state(ising_spec(14, 2.0))
    assert result.method == "lanczos"
    assert 0 <= result.gap < 1e-2


def test_broken_parity_uses_full_space():
    result = ground_state(ising_spec(4, 1.5, epsilon_x=0.05))
    assert result.parity is None
    assert pauli_expectation(result.state, [(0, "x")]) > 0


def test_ground_state_has_fixed_global_phase():
    amplitudes = ground_state(ising_spec(5, 0.8)).state.amplitudes
    pivot = amplitudes[int(np.argmax(np.abs(amplitudes)))]
    assert pivot.imag == pytest.approx(0.0, abs=1e-12)
    assert pivot.real > 0


# -----------------------------------------------------------------------------
# Referência analítica
# -----------------------------------------------------------------------------
def test_saturation_value():
    assert ising_saturation_mx2(2.0) == pytest.approx(0.25 * 0.75 ** 0.25)
    assert ising_saturation_mx2(2.0) == pytest.approx(0.23265, abs=1e-5)


@pytest.mark.parametrize("lam", [0.5, 1.0])
def test_saturation_requires_ordered_phase(lam):
    with pytest.raises(ValidationError):
        ising_saturation_mx2(lam)


# -----------------------------------------------------------------------------
# Recuperação do Lanczos
# -----------------------------------------------------------------------------
def _failing_eigsh(monkeypatch, failures):
    calls = []
    real_eigsh = hamiltonian_service.eigsh

    def eigsh(*args, **kwargs):
        calls.append(kwargs)
        if len(calls) <= failures:
            raise ArpackNoConvergence("sem convergência", np.array([]), np.array([]))
        return real_eigsh(*args, **kwargs)

    monkeypatch.setattr(hamiltonian_service, "eigsh", eigsh)
    return calls


def test_lanczos_retries_with_larger_subspace(monkeypatch, capsys):
    spec = ising_spec(6, 1.3)
    dense = ground_state(spec)
    calls = _failing_eigsh(monkeypatch, failures=1)
    result = ground_state(spec, SolverSettings(dense_max_qubits=2))
    assert "⚠️" in capsys.readouterr().out
    assert "ncv" in calls[1]
    assert result.energy == pytest.approx(dense.energy, abs=1e-9)


def test_lanczos_gives_up_after_retry(monkeypatch):
    _failing_eigsh(monkeypatch, failures=2)
    with pytest.raises(SolverError):
        ground_state(ising_spec(6, 1.3), SolverSettings(dense_max_qubits=2))
