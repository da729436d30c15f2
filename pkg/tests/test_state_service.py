import numpy as np
import pytest

from services.state_service import (
    MeasurementDirection,
    PureState,
    apply_measurement,
    apply_single_qubit,
    correlation_matrix,
    make_basis_state,
    make_cluster,
    make_ghz,
    pauli_expectation,
    random_pure_state,
    reduced_density,
)
from utils.exceptions import ValidationError


# -----------------------------------------------------------------------------
# PureState
# -----------------------------------------------------------------------------
def test_pure_state_rejects_unnormalized_vector():
    with pytest.raises(ValidationError) as info:
        PureState(1, np.array([1.0, 1.0]))
    assert info.value.field == "amplitudes"


def test_pure_state_rejects_wrong_length():
    with pytest.raises(ValidationError):
        PureState(2, np.array([1.0, 0.0, 0.0]))


def test_from_amplitudes_normalizes_on_request():
    state = PureState.from_amplitudes([3.0, 4.0], normalize=True)
    assert state.n_qubits == 1
    np.testing.assert_allclose(state.amplitudes, [0.6, 0.8])


def test_from_amplitudes_requires_power_of_two():
    with pytest.raises(ValidationError):
        PureState.from_amplitudes([1.0, 0.0, 0.0], normalize=True)


def test_amplitudes_are_read_only():
    state = make_ghz(3)
    with pytest.raises(ValueError):
        state.amplitudes[0] = 0


# -----------------------------------------------------------------------------
# MeasurementDirection
# -----------------------------------------------------------------------------
@pytest.mark.parametrize("theta, phi", [(0.0, 0.0), (np.pi / 2, 0.0), (np.pi / 3, 1.1), (np.pi, 4.0), (2.2, 5.9)])
def test_measurement_basis_is_orthonormal(theta, phi):
    basis = MeasurementDirection(theta, phi).basis()
    np.testing.assert_allclose(basis @ basis.conj().T, np.eye(2), atol=1e-12)


def test_from_vector_recovers_bloch_vector(rng):
    for _ in range(20):
        vector = rng.normal(size=3)
        direction = MeasurementDirection.from_vector(vector)
        np.testing.assert_allclose(direction.bloch_vector(), vector / np.linalg.norm(vector), atol=1e-12)


def test_plus_vector_has_requested_bloch_vector():
    direction = MeasurementDirection(np.pi / 2, np.pi / 2)
    plus = direction.plus_vector()
    sigma_y = np.array([[0, -1j], [1j, 0]])
    assert np.vdot(plus, sigma_y @ plus).real == pytest.approx(1.0)


def test_theorem_vector_ordering():
    direction = MeasurementDirection(np.pi / 2, 0.0)
    np.testing.assert_allclose(direction.theorem_vector(), [0.0, 1.0, 0.0], atol=1e-12)
    assert MeasurementDirection.from_theorem_vector([1.0, 0.0, 0.0]).theta == pytest.approx(0.0)


def test_direction_rejects_theta_out_of_range():
    with pytest.raises(ValidationError):
        MeasurementDirection(4.0, 0.0)


def test_from_vector_rejects_zero_vector():
    with pytest.raises(ValidationError):
        MeasurementDirection.from_vector([0.0, 0.0, 0.0])


# -----------------------------------------------------------------------------
# Construtores
# -----------------------------------------------------------------------------
def test_ghz_two_qubits_is_bell_state():
    np.testing.assert_allclose(make_ghz(2).amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))


def test_ghz_correlations():
    state = make_ghz(4)
    cd = correlation_matrix(state, 0, 3)
    assert cd.entry("z", "z") == pytest.approx(1.0)
    assert cd.entry("x", "x") == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(cd.mean_i, 0.0, atol=1e-12)
    np.testing.assert_allclose(cd.mean_j, 0.0, atol=1e-12)


def test_ghz_requires_two_qubits():
    with pytest.raises(ValidationError):
        make_ghz(1)


def test_basis_state_uses_site_zero_as_most_significant_bit():
    state = make_basis_state(3, "100")
    assert state.amplitudes[4] == 1
    assert pauli_expectation(state, [(0, "z")]) == pytest.approx(-1.0)
    assert pauli_expectation(state, [(2, "z")]) == pytest.approx(1.0)


def test_cluster_stabilizer_at_chain_end():
    state = make_cluster(4)
    assert pauli_expectation(state, [(0, "x"), (1, "z")]) == pytest.approx(1.0)


def test_cluster_five_distant_pair_is_maximally_mixed():
    rho = reduced_density(make_cluster(5), [0, 4])
    np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-12)


def test_periodic_cluster_every_pair_is_maximally_mixed():
    state = make_cluster(5, periodic=True)
    for i in range(5):
        for j in range(i + 1, 5):
            np.testing.assert_allclose(reduced_density(state, [i, j]).matrix, np.eye(4) / 4, atol=1e-12)


def test_cluster_single_site_bloch_vectors_vanish():
    state = make_cluster(6)
    for site in range(6):
        for axis in "xyz":
            assert pauli_expectation(state, [(site, axis)]) == pytest.approx(0.0, abs=1e-12)


def test_cluster_two_qubits_is_maximally_entangled():
    amplitudes = make_cluster(2).amplitudes
    a, b, c, d = amplitudes
    assert 2 * abs(a * d - b * c) == pytest.approx(1.0)


# -----------------------------------------------------------------------------
# Medição e densidades reduzidas
# -----------------------------------------------------------------------------
def test_ghz_equatorial_measurement_gives_bell_pairs():
    plus, minus = apply_measurement(make_ghz(3), 2, MeasurementDirection(np.pi / 2, 0.0))
    for branch in (plus, minus):
        assert branch.probability == pytest.approx(0.5)
        a, b, c, d = branch.state.amplitudes
        assert 2 * abs(a * d - b * c) == pytest.approx(1.0)


def test_eigenstate_measurement_has_null_branch():
    plus, minus = apply_measurement(make_basis_state(3, "000"), 0, MeasurementDirection(0.0))
    assert plus.probability == pytest.approx(1.0)
    np.testing.assert_allclose(plus.state.amplitudes, make_basis_state(2, "00").amplitudes)
    assert minus.is_null


def test_measurement_probabilities_sum_to_one(random_states, rng):
    for state in random_states(4, 10):
        direction = MeasurementDirection(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        plus, minus = apply_measurement(state, int(rng.integers(4)), direction)
        assert plus.probability + minus.probability == pytest.approx(1.0, abs=1e-12)


def test_measurement_is_complete(random_states):
    # média ponderada das densidades pós-medição = densidade antes da medição
    state = random_states(3, 1)[0]
    plus, minus = apply_measurement(state, 1, MeasurementDirection(1.0, 2.0))
    mixed = sum(b.probability * reduced_density(b.state, [0, 1]).matrix for b in (plus, minus))
    np.testing.assert_allclose(mixed, reduced_density(state, [0, 2]).matrix, atol=1e-12)


def test_reduced_density_preserves_site_order():
    state = make_basis_state(4, "0101")
    rho = reduced_density(state, [1, 2])
    assert rho.matrix[2, 2] == pytest.approx(1.0)
    rho_swapped = reduced_density(make_basis_state(2, "01"), [1, 0])
    assert rho_swapped.matrix[2, 2] == pytest.approx(1.0)


def test_ghz_marginal():
    rho = reduced_density(make_ghz(4), [0, 3])
    np.testing.assert_allclose(rho.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-12)


def test_reduced_density_matches_pauli_expectations(rng):
    state = random_pure_state(4, rng)
    cd = correlation_matrix(state, 1, 3)
    for a, alpha in enumerate("xyz"):
        expected_i = pauli_expectation(state, [(1, alpha)])
        assert cd.mean_i[a] == pytest.approx(expected_i, abs=1e-12)
        for b, beta in enumerate("xyz"):
            two_point = pauli_expectation(state, [(1, alpha), (3, beta)])
            expected = two_point - expected_i * pauli_expectation(state, [(3, beta)])
            assert cd.q[a, b] == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("sites", [[0, 0], [0, 5], [0], [0, 1, 2, 3]])
def test_reduced_density_rejects_bad_sites(sites):
    with pytest.raises(ValidationError):
        reduced_density(make_ghz(4), sites)


def test_correlation_matrix_requires_distinct_sites():
    with pytest.raises(ValidationError):
        correlation_matrix(make_ghz(3), 1, 1)


def test_product_state_has_no_connected_correlations():
    cd = correlation_matrix(make_basis_state(2, "00"), 0, 1)
    np.testing.assert_allclose(cd.q, 0.0, atol=1e-12)


def test_bell_state_correlations(bell_state):
    cd = correlation_matrix(bell_state, 0, 1)
    np.testing.assert_allclose(np.diag(cd.q), [1.0, -1.0, 1.0], atol=1e-12)


def test_apply_single_qubit_flips_the_requested_site():
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    flipped = apply_single_qubit(make_basis_state(3, "000"), 0, flip)
    np.testing.assert_allclose(flipped.amplitudes, make_basis_state(3, "100").amplitudes)


def test_apply_single_qubit_preserves_norm(random_states, rng):
    state = random_states(3, 1)[0]
    unitary, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    rotated = apply_single_qubit(state, 2, unitary)
    assert np.linalg.norm(rotated.amplitudes) == pytest.approx(1.0)
