"""
Theorem Service
===============

Construção de uma direção de medição sobre um terceiro qubit que não diminui,
em média, a correlação Q_zz entre os outros dois.

Convenção da forma quadrática: para um vetor diagonal d = (d00, d01, d10, d11)
de um operador de dois qubits com traço p,

    p · Q_zz(X / p) = F(d) / p,     F(d) = −2 dᵀ(σy⊗σy)d

Com R = [r0 r1 r2 r3] (diagonais de ρ1+ρ2, ρ1−ρ2, σ+σ†, i(σ−σ†)) e
S = Rᵀ(σy⊗σy)R, a matriz T = −2S tem T00 = α = Q_zz inicial, β = T[1:, 0]
e Q = T[1:, 1:]. Para a direção x̄, g± = α ± 2βᵀx̄ + x̄ᵀQx̄ e a correlação
média após a medição é |g₊|/(2(1+t)) + |g₋|/(2(1−t)), t = cᵀx̄.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from config.settings import config
from services.entanglement_service import SIGMA_YY, max_correlation
from services.state_service import (
    MeasurementDirection,
    ReducedDensity,
    check_density_matrix,
    correlation_from_density,
    random_pure_state,
)
from utils.exceptions import InvariantViolationError, ValidationError


TieBreaker = Callable[[MeasurementDirection], float]


# =============================================================================
# 📦 TIPOS DE DOMÍNIO
# =============================================================================
@dataclass(frozen=True)
class BlockDecomposition:
    """Blocos 4×4 de ρ em relação à base {|0⟩, |1⟩} do qubit medido."""

    rho1: np.ndarray
    rho2: np.ndarray
    sigma: np.ndarray
    retained: Tuple[int, int] = (0, 1)
    measured: int = 2
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        for name in ("rho1", "rho2", "sigma"):
            block = np.array(getattr(self, name), dtype=complex)
            if block.shape != (4, 4):
                raise ValidationError(name, f"bloco com dimensão {block.shape}, esperado 4×4")
            block.setflags(write=False)
            object.__setattr__(self, name, block)
        if self.validate:
            check_density_matrix(self.reassemble())

    def reassemble(self) -> np.ndarray:
        """Matriz 8×8 [[ρ1, σ], [σ†, ρ2]] com o qubit medido primeiro."""
        return np.block([[self.rho1, self.sigma], [self.sigma.conj().T, self.rho2]])

    @property
    def marginal(self) -> np.ndarray:
        """ρ dos dois qubits retidos (ρ1 + ρ2)."""
        return self.rho1 + self.rho2


@dataclass(frozen=True)
class TheoremData:
    """Matrizes R, S e a partição (α, β, Q) de T = −2S, mais o vetor c."""

    R: np.ndarray
    S: np.ndarray
    alpha: float
    beta: np.ndarray
    q_block: np.ndarray
    c_vec: np.ndarray

    @property
    def t_matrix(self) -> np.ndarray:
        return -2.0 * self.S

    @property
    def is_degenerate(self) -> bool:
        return abs(self.alpha) < config.DEGENERATE_ALPHA

    def branch_probabilities(self, x_bar: np.ndarray) -> Tuple[float, float]:
        """p± = (1 ± cᵀx̄)/2."""
        t = float(self.c_vec @ x_bar)
        return (1 + t) / 2, (1 - t) / 2

    def certificate_matrix(self, sign: float = 1.0) -> np.ndarray:
        """
        M = α(c − β/α)(c − β/α)ᵀ + Q − ββᵀ/α, na forma sem divisão por α.

        Args:
            sign: +1 ou −1; com −1 usa −T (caso α < 0)
        """
        alpha, beta, q = sign * self.alpha, sign * self.beta, sign * self.q_block
        c = self.c_vec
        return q - np.outer(c, beta) - np.outer(beta, c) + alpha * np.outer(c, c)

    def average_correlation(self, x_bar: np.ndarray) -> float:
        """Correlação média Σ p± |Q_zz(X±/p±)| prevista pela forma quadrática."""
        x_bar = np.asarray(x_bar, dtype=float)
        quadratic = float(x_bar @ self.q_block @ x_bar)
        linear = 2.0 * float(self.beta @ x_bar)
        total = 0.0
        for sign, probability in zip((1.0, -1.0), self.branch_probabilities(x_bar)):
            if probability < config.NULL_BRANCH_PROBABILITY:
                continue
            g = self.alpha + sign * linear + quadratic
            total += abs(g) / (4.0 * probability)
        return total


@dataclass(frozen=True)
class ScoreRecord:
    """Resultado da medição: probabilidades, correlações por ramo e média."""

    p_plus: float
    corr_plus: float
    p_minus: float
    corr_minus: float
    average: float
    initial: float = 0.0

    @property
    def gain(self) -> float:
        return self.average - self.initial


# =============================================================================
# 🧩 DECOMPOSIÇÃO E ROTAÇÃO
# =============================================================================
def _permute_sites(matrix: np.ndarray, order: Tuple[int, ...]) -> np.ndarray:
    n = len(order)
    tensor = matrix.reshape((2,) * (2 * n))
    axes = list(order) + [n + k for k in order]
    return tensor.transpose(axes).reshape(2 ** n, 2 ** n)


def block_decompose(rho: ReducedDensity, measured: int) -> BlockDecomposition:
    """
    Separa ρ de 3 qubits em blocos relativos ao qubit medido.

    Args:
        rho: Densidade de 3 qubits
        measured: Rótulo do sítio medido (um de rho.sites)

    Returns:
        BlockDecomposition com os dois sítios restantes na ordem original
    """
    if len(rho.sites) != 3:
        raise ValidationError("rho", f"esperada densidade de 3 qubits, recebidos {len(rho.sites)}")
    if measured not in rho.sites:
        raise ValidationError("measured", f"sítio {measured} não pertence a {rho.sites}")
    position = rho.sites.index(measured)
    others = tuple(k for k in range(3) if k != position)
    permuted = _permute_sites(np.asarray(rho.matrix), (position,) + others)
    return BlockDecomposition(
        rho1=permuted[:4, :4],
        rho2=permuted[4:, 4:],
        sigma=permuted[:4, 4:],
        retained=tuple(rho.sites[k] for k in others),
        measured=measured,
    )


def _embed(unitaries: dict, n_sites: int) -> np.ndarray:
    total = np.eye(1, dtype=complex)
    for position in range(n_sites):
        total = np.kron(total, unitaries.get(position, np.eye(2, dtype=complex)))
    return total


def prerotate_to_zz(rho3: ReducedDensity, i: int, j: int) -> Tuple[ReducedDensity, Tuple[np.ndarray, np.ndarray]]:
    """
    Rotações locais em i e j que alinham os eixos de correlação máxima com (z, z).

    Args:
        rho3: Densidade de 3 qubits
        i, j: Rótulos dos sítios do par (em rho3.sites)

    Returns:
        (densidade rotacionada, (W_i, W_j)) com W†σzW = n·σ
    """
    if i not in rho3.sites or j not in rho3.sites or i == j:
        raise ValidationError("sites", f"par ({i}, {j}) inválido para {rho3.sites}")
    positions = (rho3.sites.index(i), rho3.sites.index(j))
    _, u, v = max_correlation(correlation_from_density(marginal_of(rho3, (i, j))))
    w_i = MeasurementDirection.from_vector(u).basis()
    w_j = MeasurementDirection.from_vector(v).basis()
    unitary = _embed({positions[0]: w_i, positions[1]: w_j}, 3)
    rotated = unitary @ np.asarray(rho3.matrix) @ unitary.conj().T
    return ReducedDensity(rho3.sites, (rotated + rotated.conj().T) / 2), (w_i, w_j)


# =============================================================================
# 📐 DADOS DO TEOREMA
# =============================================================================
def build_theorem_data(blocks: BlockDecomposition) -> TheoremData:
    """
    Monta R, S = Rᵀ(σy⊗σy)R, a partição (α, β, Q) de T = −2S e c.

    Args:
        blocks: Decomposição em blocos

    Returns:
        TheoremData
    """
    rho1, rho2, sigma = blocks.rho1, blocks.rho2, blocks.sigma
    operators = (
        rho1 + rho2,
        rho1 - rho2,
        sigma + sigma.conj().T,
        1j * (sigma - sigma.conj().T),
    )
    r = np.column_stack([np.diag(op).real for op in operators])
    s = r.T @ SIGMA_YY @ r
    s = (s + s.T) / 2
    t = -2.0 * s
    c_vec = np.array([np.trace(op).real for op in operators[1:]])
    return TheoremData(
        R=r,
        S=s,
        alpha=float(t[0, 0]),
        beta=t[1:, 0].copy(),
        q_block=t[1:, 1:].copy(),
        c_vec=c_vec,
    )


def schur_complement(td: TheoremData) -> np.ndarray:
    """Q − ββᵀ/α (complemento de Schur de α em T)."""
    if td.is_degenerate:
        raise ValidationError("alpha", "complemento de Schur indefinido para α ≈ 0")
    return td.q_block - np.outer(td.beta, td.beta) / td.alpha


def inertia(matrix: np.ndarray, tolerance: float = 1e-10) -> Tuple[int, int]:
    """(número de autovalores positivos, número de negativos)."""
    values = np.linalg.eigvalsh((matrix + matrix.T) / 2)
    scale = max(1.0, float(np.max(np.abs(values))))
    return int(np.sum(values > tolerance * scale)), int(np.sum(values < -tolerance * scale))


# =============================================================================
# 🎯 DIREÇÃO DE MEDIÇÃO
# =============================================================================
def _best_candidate(td: TheoremData, candidates: np.ndarray,
                    tie_breaker: Optional[TieBreaker]) -> MeasurementDirection:
    best_direction, best_key = None, None
    for x_bar in candidates:
        direction = MeasurementDirection.from_theorem_vector(x_bar)
        score = round(td.average_correlation(direction.theorem_vector()), 12)
        secondary = round(tie_breaker(direction), 12) if tie_breaker is not None else 0.0
        key = (score, secondary)
        if best_key is None or key > best_key:
            best_direction, best_key = direction, key
    return best_direction


def find_direction(td: TheoremData, tie_breaker: Optional[TieBreaker] = None) -> MeasurementDirection:
    """
    Direção x̄ com x̄ᵀMx̄ ≥ 0: autovetor de M com o maior autovalor.

    Com α ≈ 0 qualquer direção preserva a correlação; os candidatos passam a
    ser os eixos de Pauli e os autovetores de Q, ordenados pela correlação média e, em empate,
    pelo `tie_breaker` (maior é melhor).

    Args:
        td: Dados do teorema
        tie_breaker: Critério secundário opcional

    Returns:
        MeasurementDirection do qubit medido

    Raises:
        InvariantViolationError: Se x̄ᵀMx̄ < −THEOREM_VERIFY_TOLERANCE
    """
    if td.is_degenerate:
        _, vectors = np.linalg.eigh(td.q_block)
        # eixos de Pauli (z, x, y) antes dos autovetores de Q
        return _best_candidate(td, np.vstack([np.eye(3), vectors.T]), tie_breaker)

    sign = 1.0 if td.alpha > 0 else -1.0
    certificate = td.certificate_matrix(sign)
    values, vectors = np.linalg.eigh((certificate + certificate.T) / 2)
    top = values[-1]
    scale = max(1.0, float(np.max(np.abs(values))))
    leading = vectors[:, values >= top - 1e-12 * scale].T
    direction = _best_candidate(td, leading, tie_breaker) if len(leading) > 1 else \
        MeasurementDirection.from_theorem_vector(vectors[:, -1])

    x_bar = direction.theorem_vector()
    value = float(x_bar @ certificate @ x_bar)
    if value < -config.THEOREM_VERIFY_TOLERANCE * scale:
        raise InvariantViolationError(f"x̄ᵀMx̄ = {value:.3e} < 0 (maior autovalor {top:.3e})")
    return direction


def measure_and_score(blocks: BlockDecomposition, direction: MeasurementDirection) -> ScoreRecord:
    """
    Monta X± = ½[(ρ1+ρ2) ± x̄·((ρ1−ρ2), (σ+σ†), i(σ−σ†))] e mede |Q_zz| por ramo.

    Args:
        blocks: Decomposição em blocos
        direction: Direção de medição do qubit medido

    Returns:
        ScoreRecord com a média ponderada pelas probabilidades
    """
    rho1, rho2, sigma = blocks.rho1, blocks.rho2, blocks.sigma
    x1, x2, x3 = direction.theorem_vector()
    varying = x1 * (rho1 - rho2) + x2 * (sigma + sigma.conj().T) + x3 * 1j * (sigma - sigma.conj().T)
    initial = abs(float(correlation_from_density(blocks.marginal).q[2, 2]))

    branches = []
    for sign in (1.0, -1.0):
        operator = 0.5 * (blocks.marginal + sign * varying)
        probability = float(np.trace(operator).real)
        if probability < config.NULL_BRANCH_PROBABILITY:
            branches.append((max(probability, 0.0), 0.0))
            continue
        branches.append((probability, abs(float(correlation_from_density(operator).q[2, 2]))))

    (p_plus, c_plus), (p_minus, c_minus) = branches
    return ScoreRecord(
        p_plus=p_plus,
        corr_plus=c_plus,
        p_minus=p_minus,
        corr_minus=c_minus,
        average=p_plus * c_plus + p_minus * c_minus,
        initial=initial,
    )


def constructive_step(rho3: ReducedDensity, i: int, j: int, measured: int,
                      tie_breaker: Optional[TieBreaker] = None) -> Tuple[MeasurementDirection, ScoreRecord, TheoremData]:
    """
    Pipeline completo para um qubit: rotação para zz, blocos, dados e direção.

    Returns:
        (direção, pontuação medida, dados do teorema)
    """
    rotated, _ = prerotate_to_zz(rho3, i, j)
    blocks = block_decompose(rotated, measured)
    td = build_theorem_data(blocks)
    direction = find_direction(td, tie_breaker)
    return direction, measure_and_score(blocks, direction), td


# =============================================================================
# 🎲 ENSEMBLES ALEATÓRIOS
# =============================================================================
def random_mixed_density(rng: np.random.Generator, rank: int, n_qubits: int = 3) -> ReducedDensity:
    """
    Mistura de `rank` estados puros aleatórios com pesos de Dirichlet.

    Args:
        rng: Gerador semeado
        rank: 1 (puro), 2, ... até 2^n (posto completo)
        n_qubits: Número de qubits (padrão 3)

    Returns:
        ReducedDensity sobre os sítios (0, ..., n-1)
    """
    dimension = 2 ** n_qubits
    if not 1 <= rank <= dimension:
        raise ValidationError("rank", f"posto {rank} fora de [1, {dimension}]")
    weights = rng.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
    matrix = np.zeros((dimension, dimension), dtype=complex)
    for weight in weights:
        vector = random_pure_state(n_qubits, rng).amplitudes
        matrix += weight * np.outer(vector, vector.conj())
    matrix /= np.trace(matrix).real
    return ReducedDensity(tuple(range(n_qubits)), (matrix + matrix.conj().T) / 2)


def marginal_of(rho: ReducedDensity, sites: Tuple[int, ...]) -> np.ndarray:
    """Traço parcial de uma densidade pequena para os rótulos `sites` (na ordem dada)."""
    positions = [rho.sites.index(site) for site in sites]
    n = len(rho.sites)
    tensor = np.asarray(rho.matrix).reshape((2,) * (2 * n))
    traced = [k for k in range(n) if k not in positions]
    for k in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=k, axis2=k + tensor.ndim // 2)
    kept = [k for k in range(n) if k in positions]
    size = 2 ** len(kept)
    matrix = tensor.reshape(size, size)
    order = tuple(kept.index(p) for p in positions)
    return _permute_sites(matrix, order) if order != tuple(range(len(order))) else matrix
