"""
State Service
=============

Representação exata de estados puros de N qubits, medições projetivas locais,
traço parcial e valores esperados de Pauli.

Convenção de ordenação: o sítio 0 é o bit mais significativo do índice da
amplitude (|b0 b1 ... b_{n-1}⟩ ↔ índice Σ b_k 2^(n-1-k)). Todos os serviços
compartilham esta convenção.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import config
from utils.exceptions import ValidationError


AXES = ("x", "y", "z")

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _axis_name(axis: str) -> str:
    name = str(axis).lower()
    if name not in PAULI:
        raise ValidationError("axis", f"eixo {axis!r} inválido, use x, y ou z")
    return name


def _freeze(array: np.ndarray) -> np.ndarray:
    frozen = np.array(array, dtype=complex, copy=True)
    frozen.setflags(write=False)
    return frozen


# =============================================================================
# 📦 TIPOS DE DOMÍNIO
# =============================================================================
@dataclass(frozen=True)
class PureState:
    """Vetor de amplitudes de um registrador de N qubits (imutável)."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_qubits <= config.MAX_QUBITS:
            raise ValidationError("n_qubits", f"deve estar entre 1 e {config.MAX_QUBITS}, recebido {self.n_qubits}")
        amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != 2 ** self.n_qubits:
            raise ValidationError("amplitudes", f"esperadas {2 ** self.n_qubits} amplitudes, recebidas {amplitudes.size}")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > config.NORM_TOLERANCE:
            raise ValidationError("amplitudes", f"estado não normalizado (Σ|a|² = {norm:.15g})")
        object.__setattr__(self, "amplitudes", _freeze(amplitudes))

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "PureState":
        """
        Cria um estado a partir de um vetor de amplitudes.

        Args:
            amplitudes: Vetor de comprimento 2^n
            normalize: Se deve renormalizar o vetor antes da validação

        Returns:
            PureState validado
        """
        vector = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n_qubits = int(round(np.log2(max(vector.size, 1))))
        if vector.size < 2 or 2 ** n_qubits != vector.size:
            raise ValidationError("amplitudes", f"comprimento {vector.size} não é potência de 2")
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise ValidationError("amplitudes", "vetor nulo não pode ser normalizado")
            vector = vector / norm
        return cls(n_qubits, vector)

    def tensor(self) -> np.ndarray:
        """Amplitudes como tensor (2,)*n, eixo k = sítio k."""
        return self.amplitudes.reshape((2,) * self.n_qubits)


@dataclass(frozen=True)
class MeasurementDirection:
    """Direção de medição (θ, φ) na esfera de Bloch."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not -1e-12 <= theta <= np.pi + 1e-12:
            raise ValidationError("theta", f"θ={theta} fora de [0, π]")
        object.__setattr__(self, "theta", min(max(theta, 0.0), np.pi))
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "MeasurementDirection":
        """
        Direção cujo |+⟩ tem vetor de Bloch paralelo a `vector`.

        Args:
            vector: Vetor real (nx, ny, nz), não precisa ser unitário

        Returns:
            MeasurementDirection correspondente
        """
        n = np.asarray(vector, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValidationError("vector", "vetor de Bloch nulo")
        n = n / norm
        theta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
        if np.hypot(n[0], n[1]) < 1e-15:
            return cls(theta, 0.0)
        return cls(theta, float(np.arctan2(n[1], n[0])))

    @classmethod
    def from_theorem_vector(cls, x_bar: Sequence[float]) -> "MeasurementDirection":
        """Inverte x̄ = [cosθ, sinθcosφ, sinθsinφ]."""
        x_bar = np.asarray(x_bar, dtype=float)
        return cls.from_vector([x_bar[1], x_bar[2], x_bar[0]])

    def plus_vector(self) -> np.ndarray:
        """|+⟩ = cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩."""
        return np.array([np.cos(self.theta / 2), np.exp(1j * self.phi) * np.sin(self.theta / 2)])

    def minus_vector(self) -> np.ndarray:
        """|−⟩ = −e^{−iφ} sin(θ/2)|0⟩ + cos(θ/2)|1⟩, ortogonal a |+⟩."""
        return np.array([-np.exp(-1j * self.phi) * np.sin(self.theta / 2), np.cos(self.theta / 2)])

    def basis(self) -> np.ndarray:
        """Matriz 2×2 cujas linhas são os bras ⟨+| e ⟨−|."""
        return np.array([self.plus_vector().conj(), self.minus_vector().conj()])

    def bloch_vector(self) -> np.ndarray:
        return np.array([
            np.sin(self.theta) * np.cos(self.phi),
            np.sin(self.theta) * np.sin(self.phi),
            np.cos(self.theta),
        ])

    def theorem_vector(self) -> np.ndarray:
        """x̄ = [cosθ, sinθcosφ, sinθsinφ]."""
        n = self.bloch_vector()
        return np.array([n[2], n[0], n[1]])


@dataclass(frozen=True)
class ReducedDensity:
    """Matriz densidade hermitiana de um subconjunto pequeno de qubits."""

    sites: Tuple[int, ...]
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.shape != (2 ** len(sites), 2 ** len(sites)):
            raise ValidationError("matrix", f"dimensão {matrix.shape} incompatível com {len(sites)} sítios")
        if self.validate:
            check_density_matrix(matrix)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "matrix", _freeze(matrix))


@dataclass(frozen=True)
class CorrelationData:
    """Matriz Q_αβ (3×3) e os vetores de Bloch dos sítios i e j."""

    q: np.ndarray
    mean_i: np.ndarray
    mean_j: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(3, 3)
        mean_i = np.array(self.mean_i, dtype=float).reshape(3)
        mean_j = np.array(self.mean_j, dtype=float).reshape(3)
        if np.any(np.abs(q) > 2 + 1e-9):
            raise ValidationError("q", "correlação fora de [-2, 2]")
        if np.any(np.abs(mean_i) > 1 + 1e-9) or np.any(np.abs(mean_j) > 1 + 1e-9):
            raise ValidationError("mean", "valor esperado de um ponto fora de [-1, 1]")
        for name, value in (("q", q), ("mean_i", mean_i), ("mean_j", mean_j)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def entry(self, alpha: str, beta: str) -> float:
        """Q_αβ pelo nome dos eixos."""
        return float(self.q[AXES.index(_axis_name(alpha)), AXES.index(_axis_name(beta))])


@dataclass(frozen=True)
class Branch:
    """Um resultado de medição: probabilidade e estado pós-medição (None se nulo)."""

    outcome: int
    probability: float
    state: Optional[PureState]

    @property
    def is_null(self) -> bool:
        return self.state is None


# =============================================================================
# 🔍 VALIDAÇÃO
# =============================================================================
def check_density_matrix(matrix: np.ndarray) -> None:
    """
    Verifica hermiticidade, traço unitário e positividade.

    Args:
        matrix: Matriz complexa quadrada

    Raises:
        ValidationError: Se alguma invariante falhar
    """
    if np.max(np.abs(matrix - matrix.conj().T)) > config.NORM_TOLERANCE:
        raise ValidationError("matrix", "matriz densidade não hermitiana")
    trace = np.trace(matrix).real
    if abs(trace - 1.0) > config.NORM_TOLERANCE:
        raise ValidationError("matrix", f"traço {trace:.15g} diferente de 1")
    smallest = np.linalg.eigvalsh((matrix + matrix.conj().T) / 2)[0]
    if smallest < -config.PSD_TOLERANCE:
        raise ValidationError("matrix", f"autovalor negativo {smallest:.3e}")


def _check_sites(n_qubits: int, sites: Sequence[int]) -> Tuple[int, ...]:
    sites = tuple(int(s) for s in sites)
    if len(set(sites)) != len(sites):
        raise ValidationError("sites", f"índices repetidos em {sites}")
    for site in sites:
        if not 0 <= site < n_qubits:
            raise ValidationError("sites", f"sítio {site} fora de [0, {n_qubits - 1}]")
    return sites


# =============================================================================
# 🏗️ CONSTRUTORES
# =============================================================================
def make_basis_state(n: int, bits: str) -> PureState:
    """
    Estado da base computacional |bits⟩.

    Args:
        n: Número de qubits
        bits: Cadeia de '0'/'1' de comprimento n (sítio 0 primeiro)

    Returns:
        PureState com amplitude 1 no índice correspondente
    """
    if n < 1:
        raise ValidationError("n", "é preciso pelo menos 1 qubit")
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise ValidationError("bits", f"esperada cadeia binária de comprimento {n}, recebido {bits!r}")
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[int(bits, 2)] = 1.0
    return PureState(n, amplitudes)


def make_ghz(n: int) -> PureState:
    """(|0…0⟩ + |1…1⟩)/√2, normalizado por 1/√2."""
    if n < 2:
        raise ValidationError("n", "o estado GHZ requer n >= 2")
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / np.sqrt(2)
    return PureState(n, amplitudes)


def make_cluster(n: int, periodic: bool = False) -> PureState:
    """
    Estado cluster 1-D: |+⟩^⊗n seguido de controlled-phase em cada par (k, k+1).

    Na cadeia aberta os pares das pontas, (0, 1) e (n−2, n−1), mantêm a
    correlação ⟨σx⁰σz¹⟩ = 1; no anel (n >= 5) todas as densidades de dois
    sítios são I/4.

    Args:
        n: Número de qubits (>= 2)
        periodic: Inclui também o par (n−1, 0) (anel, n >= 3)

    Returns:
        PureState do cluster linear
    """
    if n < 2:
        raise ValidationError("n", "o estado cluster requer n >= 2")
    index = np.arange(2 ** n)
    bits = (index[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    neighbour_pairs = np.sum(bits[:, :-1] * bits[:, 1:], axis=1)
    if periodic and n >= 3:
        neighbour_pairs = neighbour_pairs + bits[:, -1] * bits[:, 0]
    amplitudes = np.where(neighbour_pairs % 2 == 0, 1.0, -1.0) / 2 ** (n / 2)
    return PureState(n, amplitudes.astype(complex))


def random_pure_state(n: int, rng: np.random.Generator) -> PureState:
    """Estado puro aleatório (distribuição de Haar) gerado por `rng`."""
    vector = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return PureState.from_amplitudes(vector, normalize=True)


# =============================================================================
# ⚙️ OPERAÇÕES
# =============================================================================
def apply_single_qubit(state: PureState, site: int, unitary: np.ndarray) -> PureState:
    """
    Aplica uma unitária 2×2 no sítio indicado.

    Args:
        state: Estado de entrada
        site: Sítio alvo
        unitary: Matriz 2×2 unitária

    Returns:
        Novo PureState
    """
    (site,) = _check_sites(state.n_qubits, [site])
    tensor = np.tensordot(np.asarray(unitary, dtype=complex), state.tensor(), axes=([1], [site]))
    tensor = np.moveaxis(tensor, 0, site)
    return PureState.from_amplitudes(tensor.reshape(-1), normalize=True)


def project_site(tensor: np.ndarray, site: int, bra: np.ndarray) -> np.ndarray:
    """
    Contrai o eixo `site` de um tensor de amplitudes com um bra.

    O resultado não é renormalizado; seu quadrado da norma é a probabilidade
    do resultado (relativa à norma da entrada).
    """
    return np.tensordot(bra, tensor, axes=([0], [site]))


def apply_measurement(state: PureState, site: int, direction: MeasurementDirection) -> Tuple[Branch, Branch]:
    """
    Medição de von Neumann na base |±⟩ de `direction` sobre um sítio.

    Args:
        state: Estado normalizado de n qubits
        site: Sítio medido
        direction: Direção de medição

    Returns:
        (ramo '+', ramo '−'); cada ramo contém a probabilidade e o estado de n-1
        qubits renormalizado, ou None quando a probabilidade < 1e-14
    """
    (site,) = _check_sites(state.n_qubits, [site])
    if state.n_qubits < 2:
        raise ValidationError("state", "não há qubits restantes após a medição")
    tensor = state.tensor()
    branches = []
    for outcome, bra in enumerate(direction.basis()):
        projected = project_site(tensor, site, bra).reshape(-1)
        probability = float(np.vdot(projected, projected).real)
        if probability < config.NULL_BRANCH_PROBABILITY:
            branches.append(Branch(outcome, probability, None))
            continue
        collapsed = PureState(state.n_qubits - 1, projected / np.sqrt(probability))
        branches.append(Branch(outcome, probability, collapsed))
    return branches[0], branches[1]


def partial_trace(tensor: np.ndarray, sites: Sequence[int]) -> np.ndarray:
    """
    Matriz densidade dos sítios `sites` (na ordem dada) a partir de um tensor
    de amplitudes, possivelmente não normalizado.
    """
    n_qubits = tensor.ndim
    kept = np.moveaxis(tensor, list(sites), list(range(len(sites))))
    kept = kept.reshape(2 ** len(sites), 2 ** (n_qubits - len(sites)))
    return kept @ kept.conj().T


def reduced_density(state: PureState, sites: Sequence[int]) -> ReducedDensity:
    """
    Traço parcial sobre o complemento de `sites`.

    Args:
        state: Estado puro
        sites: Lista ordenada de 2 ou 3 sítios distintos

    Returns:
        ReducedDensity com a ordem dos sítios preservada
    """
    sites = _check_sites(state.n_qubits, sites)
    if len(sites) not in (2, 3):
        raise ValidationError("sites", f"são suportados 2 ou 3 sítios, recebidos {len(sites)}")
    matrix = partial_trace(state.tensor(), sites)
    return ReducedDensity(sites, (matrix + matrix.conj().T) / 2)


def pauli_expectation(state: PureState, pairs: Sequence[Tuple[int, str]]) -> float:
    """
    ⟨ψ|σ_α^i (⊗ σ_β^j)|ψ⟩ para até dois pares (sítio, eixo).

    Args:
        state: Estado puro
        pairs: Lista de (sítio, eixo) com sítios distintos

    Returns:
        Valor real em [-1, 1]
    """
    if not 1 <= len(pairs) <= 2:
        raise ValidationError("pairs", "use um ou dois pares (sítio, eixo)")
    sites = _check_sites(state.n_qubits, [site for site, _ in pairs])
    tensor = state.tensor()
    acted = tensor
    for site, (_, axis) in zip(sites, pairs):
        acted = np.moveaxis(np.tensordot(PAULI[_axis_name(axis)], acted, axes=([1], [site])), 0, site)
    value = float(np.vdot(tensor, acted).real)
    return float(np.clip(value, -1.0, 1.0))


def correlation_from_density(matrix: np.ndarray) -> CorrelationData:
    """
    Q_αβ e vetores de Bloch a partir de uma matriz densidade 4×4 (sítio i primeiro).

    Aceita operadores não normalizados: o traço é dividido antes do cálculo.
    """
    matrix = np.asarray(matrix, dtype=complex)
    trace = np.trace(matrix).real
    if trace <= 0:
        raise ValidationError("matrix", "operador com traço não positivo")
    matrix = matrix / trace
    identity = np.eye(2)
    mean_i = np.array([np.trace(matrix @ np.kron(PAULI[a], identity)).real for a in AXES])
    mean_j = np.array([np.trace(matrix @ np.kron(identity, PAULI[b])).real for b in AXES])
    two_point = np.array([[np.trace(matrix @ np.kron(PAULI[a], PAULI[b])).real for b in AXES] for a in AXES])
    mean_i = np.clip(mean_i, -1.0, 1.0)
    mean_j = np.clip(mean_j, -1.0, 1.0)
    return CorrelationData(two_point - np.outer(mean_i, mean_j), mean_i, mean_j)


def correlation_matrix(state: PureState, i: int, j: int) -> CorrelationData:
    """
    Correlações conexas Q_αβ^{ij} = ⟨σ_α^i σ_β^j⟩ − ⟨σ_α^i⟩⟨σ_β^j⟩.

    Args:
        state: Estado puro
        i: Primeiro sítio
        j: Segundo sítio (≠ i)

    Returns:
        CorrelationData com as 9 correlações e os dois vetores de um ponto
    """
    if i == j:
        raise ValidationError("j", "os sítios i e j devem ser distintos")
    rho = reduced_density(state, [i, j])
    return correlation_from_density(rho.matrix)
