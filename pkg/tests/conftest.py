"""Fixtures compartilhadas: geradores semeados e estados/densidades aleatórios."""

import numpy as np
import pytest

from services.state_service import PureState, random_pure_state
from services.theorem_service import random_mixed_density


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bell_state():
    return PureState(2, np.array([1, 0, 0, 1]) / np.sqrt(2))


@pytest.fixture
def random_states(rng):
    """Fábrica de estados puros aleatórios com n qubits."""

    def factory(n: int, count: int):
        return [random_pure_state(n, rng) for _ in range(count)]

    return factory


@pytest.fixture
def random_densities(rng):
    """Fábrica de densidades de 3 qubits de posto dado."""

    def factory(rank: int, count: int):
        return [random_mixed_density(rng, rank) for _ in range(count)]

    return factory


@pytest.fixture
def serial_workers(monkeypatch):
    """Força execução serial do pool de workers."""
    monkeypatch.setenv("LE_WORKERS", "1")
