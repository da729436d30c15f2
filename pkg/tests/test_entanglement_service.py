import numpy as np
import pytest

from services.entanglement_service import (
    BoundsRecord,
    assistance_upper_bound,
    concurrence_pure,
    entropy_from_concurrence,
    max_correlation,
    max_correlation_axes,
    parity_bounds,
    principal_sqrt,
)
from services.state_service import (
    CorrelationData,
    PureState,
    correlation_matrix,
    make_basis_state,
    make_ghz,
    random_pure_state,
    reduced_density,
)
from utils.exceptions import InvariantViolationError, ValidationError


# -----------------------------------------------------------------------------
# Concorrência
# -----------------------------------------------------------------------------
def test_concurrence_of_bell_and_product(bell_state):
    assert concurrence_pure(bell_state) == pytest.approx(1.0)
    assert concurrence_pure(make_basis_state(2, "01")) == pytest.approx(0.0)


def test_concurrence_accepts_raw_amplitudes():
    assert concurrence_pure(np.array([0.6, 0, 0, 0.8])) == pytest.approx(0.96)


def test_concurrence_rejects_bad_input():
    with pytest.raises(ValidationError):
        concurrence_pure(np.array([1.0, 0.0]))
    with pytest.raises(ValidationError):
        concurrence_pure(np.array([1.0, 1.0, 0.0, 0.0]))


def test_largest_singular_value_equals_concurrence_for_pure_pairs(rng):
    for _ in range(1000):
        state = random_pure_state(2, rng)
        value, _, _ = max_correlation(correlation_matrix(state, 0, 1))
        assert value == pytest.approx(concurrence_pure(state), abs=1e-10)


# -----------------------------------------------------------------------------
# Correlação máxima
# -----------------------------------------------------------------------------
def test_max_correlation_of_zero_matrix_is_deterministic():
    value, u, v = max_correlation(CorrelationData(np.zeros((3, 3)), np.zeros(3), np.zeros(3)))
    assert value == 0.0
    np.testing.assert_allclose(u, [1, 0, 0])
    np.testing.assert_allclose(v, [1, 0, 0])


def test_max_correlation_prefers_canonical_axes():
    cd = correlation_matrix(make_ghz(4), 0, 3)
    value, u, v = max_correlation(cd)
    assert value == pytest.approx(1.0)
    np.testing.assert_allclose(u, [0, 0, 1])
    np.testing.assert_allclose(v, [0, 0, 1])
    assert max_correlation_axes(cd) == "zz"


def test_max_correlation_vectors_attain_value(rng):
    for _ in range(20):
        cd = correlation_matrix(random_pure_state(3, rng), 0, 2)
        value, u, v = max_correlation(cd)
        assert u @ cd.q @ v == pytest.approx(value, abs=1e-9)
        assert np.linalg.norm(u) == pytest.approx(1.0)
        assert np.linalg.norm(v) == pytest.approx(1.0)


def test_max_correlation_handles_negative_entries(bell_state):
    value, u, v = max_correlation(correlation_matrix(bell_state, 0, 1))
    assert value == pytest.approx(1.0)
    assert u @ correlation_matrix(bell_state, 0, 1).q @ v == pytest.approx(1.0)


# -----------------------------------------------------------------------------
# Cota superior
# -----------------------------------------------------------------------------
def test_principal_sqrt_squares_back(rng):
    rho = reduced_density(random_pure_state(4, rng), [0, 1]).matrix
    root = principal_sqrt(rho)
    np.testing.assert_allclose(root @ root, rho, atol=1e-10)


def test_principal_sqrt_rejects_negative_matrix():
    with pytest.raises(ValidationError):
        principal_sqrt(np.diag([1.0, -0.5, 0.25, 0.25]))


def test_assistance_of_pure_pair_is_concurrence(rng):
    for _ in range(20):
        state = random_pure_state(2, rng)
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
        assert assistance_upper_bound(rho) == pytest.approx(concurrence_pure(state), abs=1e-9)


def test_assistance_of_maximally_mixed_pair_is_one():
    assert assistance_upper_bound(np.eye(4) / 4) == pytest.approx(1.0)


def test_assistance_dominates_max_correlation(rng):
    for _ in range(50):
        state = random_pure_state(4, rng)
        lower, _, _ = max_correlation(correlation_matrix(state, 0, 3))
        upper = assistance_upper_bound(reduced_density(state, [0, 3]))
        assert lower <= upper + 1e-9


def test_assistance_rejects_wrong_shape():
    with pytest.raises(ValidationError):
        assistance_upper_bound(np.eye(2) / 2)


# -----------------------------------------------------------------------------
# Cotas de paridade
# -----------------------------------------------------------------------------
def test_parity_bounds_on_ghz():
    record = parity_bounds(make_ghz(4), 0, 3)
    assert record.lower == pytest.approx(1.0)
    assert record.upper == pytest.approx(1.0)
    assert record.lower_method == "parity"


def test_parity_lower_bound_uses_absolute_correlations():
    singlet = PureState(2, np.array([0, 1, -1, 0]) / np.sqrt(2))
    q = correlation_matrix(singlet, 0, 1).q
    assert max(q[0, 0], q[1, 1], q[2, 2]) == pytest.approx(-1.0)
    record = parity_bounds(singlet, 0, 1)
    assert record.lower == pytest.approx(1.0)
    assert record.upper == pytest.approx(1.0)


def test_parity_upper_bound_matches_assistance_for_parity_states(rng):
    # estado com suporte só no setor par
    vector = rng.normal(size=16) + 1j * rng.normal(size=16)
    popcount = np.array([bin(k).count("1") for k in range(16)])
    vector[popcount % 2 == 1] = 0
    state = PureState.from_amplitudes(vector, normalize=True)
    record = parity_bounds(state, 1, 2)
    assert record.upper == pytest.approx(assistance_upper_bound(reduced_density(state, [1, 2])), abs=1e-9)


# -----------------------------------------------------------------------------
# BoundsRecord
# -----------------------------------------------------------------------------
def test_bounds_record_rejects_inverted_bounds():
    with pytest.raises(InvariantViolationError):
        BoundsRecord(lower=0.8, upper=0.5)


def test_bounds_record_rejects_values_outside_unit_interval():
    with pytest.raises(InvariantViolationError):
        BoundsRecord(lower=0.1, upper=1.5)


def test_check_sandwich():
    record = BoundsRecord(lower=0.2, upper=0.6).with_estimate(0.4, "constructive")
    record.check_sandwich()
    assert record.le_method == "constructive"
    with pytest.raises(InvariantViolationError):
        BoundsRecord(lower=0.2, upper=0.6).with_estimate(0.7, "oracle").check_sandwich()


# -----------------------------------------------------------------------------
# Entropia
# -----------------------------------------------------------------------------
def test_entropy_from_concurrence_limits():
    assert entropy_from_concurrence(0.0) == pytest.approx(0.0)
    assert entropy_from_concurrence(1.0) == pytest.approx(1.0)


def test_entropy_is_monotone():
    values = [entropy_from_concurrence(c) for c in np.linspace(0, 1, 11)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_entropy_rejects_out_of_range():
    with pytest.raises(ValidationError):
        entropy_from_concurrence(1.5)


def test_entropy_convexity_chain(rng):
    for _ in range(1000):
        size = int(rng.integers(2, 7))
        weights = rng.dirichlet(np.ones(size))
        concurrences = rng.uniform(0.0, 1.0, size)
        mean_concurrence = float(weights @ concurrences)
        mean_entropy = float(sum(w * entropy_from_concurrence(c) for w, c in zip(weights, concurrences)))
        assert entropy_from_concurrence(mean_concurrence) <= mean_entropy + 1e-12
        assert mean_entropy <= mean_concurrence + 1e-12
