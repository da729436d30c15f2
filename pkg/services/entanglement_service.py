"""
Entanglement Service
====================

Funcionais de emaranhamento e correlação: concorrência de estados puros de
dois qubits, correlação máxima (SVD de Q), cota superior de assistência,
fórmulas de cota para estados com simetria de paridade e conversão para
entropia de emaranhamento.

Normalização: matrizes de Pauli com autovalores ±1 (sem fator de spin-½).
"""

from dataclasses import dataclass, field
from typing import Any, Optional, Tuple, Union

import numpy as np
from scipy.stats import entropy

from config.settings import config
from services.state_service import (
    AXES,
    CorrelationData,
    PureState,
    ReducedDensity,
    correlation_matrix,
    pauli_expectation,
)
from utils.exceptions import InvariantViolationError, ValidationError


# σy ⊗ σy
SIGMA_YY = np.array([
    [0, 0, 0, -1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [-1, 0, 0, 0],
], dtype=float)

_SQRT_CLAMP = 1e-12


# =============================================================================
# 📦 TIPOS DE DOMÍNIO
# =============================================================================
@dataclass(frozen=True)
class BoundsRecord:
    """Cota inferior, estimativa de LE e cota superior, com o método de cada uma."""

    lower: float
    upper: float
    le_estimate: Optional[float] = None
    lower_method: str = "max_correlation"
    upper_method: str = "assistance"
    le_method: Optional[str] = None
    le_result: Any = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        tolerance = config.SANDWICH_TOLERANCE
        values = [self.lower, self.upper] + ([self.le_estimate] if self.le_estimate is not None else [])
        for value in values:
            if not -tolerance <= value <= 1 + tolerance:
                raise InvariantViolationError(f"valor de cota {value:.12g} fora de [0, 1]")
        if self.lower > self.upper + tolerance:
            raise InvariantViolationError(
                f"cota inferior {self.lower:.12g} acima da superior {self.upper:.12g}"
            )

    def check_sandwich(self, tolerance: float = config.SANDWICH_TOLERANCE) -> None:
        """
        Verifica lower ≤ le_estimate ≤ upper.

        Raises:
            InvariantViolationError: Se a estimativa escapar das cotas
        """
        if self.le_estimate is None:
            return
        if not self.lower - tolerance <= self.le_estimate <= self.upper + tolerance:
            raise InvariantViolationError(
                f"LE {self.le_estimate:.12g} fora de [{self.lower:.12g}, {self.upper:.12g}]"
            )

    def with_estimate(self, value: float, method: str, result: Any = None) -> "BoundsRecord":
        """Cópia com a estimativa de LE preenchida."""
        return BoundsRecord(
            lower=self.lower,
            upper=self.upper,
            le_estimate=float(value),
            lower_method=self.lower_method,
            upper_method=self.upper_method,
            le_method=method,
            le_result=result,
        )


# =============================================================================
# ⚙️ CONCORRÊNCIA E CORRELAÇÃO
# =============================================================================
def concurrence_pure(state: Union[PureState, np.ndarray]) -> float:
    """
    Concorrência C = 2|ad − bc| de um estado puro de dois qubits.

    Args:
        state: PureState de 2 qubits ou vetor (a, b, c, d)

    Returns:
        Valor em [0, 1]
    """
    amplitudes = state.amplitudes if isinstance(state, PureState) else np.asarray(state, dtype=complex).reshape(-1)
    if amplitudes.size != 4:
        raise ValidationError("state", f"esperadas 4 amplitudes, recebidas {amplitudes.size}")
    norm = float(np.vdot(amplitudes, amplitudes).real)
    if abs(norm - 1.0) > config.NORM_TOLERANCE:
        raise ValidationError("state", f"estado não normalizado (Σ|a|² = {norm:.15g})")
    a, b, c, d = amplitudes
    return float(min(2.0 * abs(a * d - b * c), 1.0))


def _canonical_axis(index: int) -> np.ndarray:
    axis = np.zeros(3)
    axis[index] = 1.0
    return axis


def max_correlation(cd: CorrelationData) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Maior valor singular de Q e o par de eixos locais que o atinge.

    Quando um par de eixos canônicos (α, β) já atinge o valor, o primeiro em
    ordem lexicográfica (xx, xy, ..., zz) é reportado. Os vetores são sempre
    escolhidos de modo que uᵀQv = +valor.

    Args:
        cd: Dados de correlação de um par (i, j)

    Returns:
        (valor, u, v) com u, v vetores unitários de R³
    """
    q = np.asarray(cd.q, dtype=float)
    left, singular, right_t = np.linalg.svd(q)
    value = float(singular[0])
    if value < _SQRT_CLAMP:
        return 0.0, _canonical_axis(0), _canonical_axis(0)

    for a in range(3):
        for b in range(3):
            if abs(abs(q[a, b]) - value) <= 1e-10 * max(1.0, value):
                return value, np.sign(q[a, b]) * _canonical_axis(a), _canonical_axis(b)

    u, v = left[:, 0], right_t[0]
    pivot = u[int(np.argmax(np.abs(u)))]
    if pivot < 0:
        u, v = -u, -v
    if u @ q @ v < 0:
        v = -v
    return value, u, v


def max_correlation_axes(cd: CorrelationData) -> str:
    """Rótulo 'αβ' do par canônico mais próximo dos eixos ótimos."""
    _, u, v = max_correlation(cd)
    return AXES[int(np.argmax(np.abs(u)))] + AXES[int(np.argmax(np.abs(v)))]


# =============================================================================
# 🔼 COTA SUPERIOR (ASSISTÊNCIA)
# =============================================================================
def principal_sqrt(matrix: np.ndarray) -> np.ndarray:
    """
    Raiz quadrada hermitiana positiva de uma matriz densidade.

    Raises:
        ValidationError: Se algum autovalor for menor que −PSD_TOLERANCE
    """
    hermitian = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(hermitian)
    if values[0] < -config.PSD_TOLERANCE:
        raise ValidationError("rho", f"matriz não positiva (autovalor {values[0]:.3e})")
    values = np.where(values < _SQRT_CLAMP, 0.0, values)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def assistance_upper_bound(rho: Union[ReducedDensity, np.ndarray]) -> float:
    """
    Emaranhamento de assistência Tr|Xᵀ(σy⊗σy)X| com ρ = XX†.

    Args:
        rho: Matriz densidade de 2 qubits

    Returns:
        Cota superior para a LE do par
    """
    matrix = rho.matrix if isinstance(rho, ReducedDensity) else np.asarray(rho, dtype=complex)
    if matrix.shape != (4, 4):
        raise ValidationError("rho", f"esperada matriz 4×4, recebida {matrix.shape}")
    root = principal_sqrt(matrix)
    return float(np.sum(np.linalg.svd(root.T @ SIGMA_YY @ root, compute_uv=False)))


def parity_bounds(state: PureState, i: int, j: int) -> BoundsRecord:
    """
    Cotas em forma fechada para estados com simetria de paridade ⊗σz.

    lower = max|Q_αα| e upper = (√s₊ + √s₋)/2, com
    s± = (1 ± ⟨σz^i σz^j⟩)² − (⟨σz^i⟩ ± ⟨σz^j⟩)².

    A cota inferior usa o valor absoluto, não max(Q_xx, Q_yy, Q_zz) com sinal:
    uma rotação de π no sítio j em torno de um eixo perpendicular a α troca o
    sinal de Q_αα sem alterar a LE, e |Q_αα| nunca excede a correlação máxima.

    Args:
        state: Estado com simetria de paridade (responsabilidade do chamador)
        i, j: Par de sítios

    Returns:
        BoundsRecord com métodos "parity"
    """
    zz = pauli_expectation(state, [(i, "z"), (j, "z")])
    zi = pauli_expectation(state, [(i, "z")])
    zj = pauli_expectation(state, [(j, "z")])
    roots = []
    for sign in (1.0, -1.0):
        s = (1 + sign * zz) ** 2 - (zi + sign * zj) ** 2
        if s < -config.PSD_TOLERANCE:
            raise InvariantViolationError(f"s{'+' if sign > 0 else '−'} = {s:.3e} negativo; simetria de paridade quebrada?")
        roots.append(np.sqrt(max(s, 0.0)))
    upper = float(sum(roots) / 2)
    lower = float(np.max(np.abs(np.diag(correlation_matrix(state, i, j).q))))
    return BoundsRecord(lower=min(lower, 1.0), upper=min(upper, 1.0), lower_method="parity", upper_method="parity")


# =============================================================================
# 🔁 ENTROPIA DE EMARANHAMENTO
# =============================================================================
def entropy_from_concurrence(c: float) -> float:
    """
    f(C) = H((1 + √(1 − C²))/2), com H a entropia de Shannon em bits.

    Args:
        c: Concorrência em [0, 1]

    Returns:
        Entropia de emaranhamento em [0, 1]
    """
    c = float(c)
    if not -config.NORM_TOLERANCE <= c <= 1 + config.NORM_TOLERANCE:
        raise ValidationError("c", f"concorrência {c} fora de [0, 1]")
    c = min(max(c, 0.0), 1.0)
    x = (1 + np.sqrt(1 - c * c)) / 2
    return float(entropy([x, 1 - x], base=2))


def average_entropy(ensemble) -> float:
    """Σ p_s f(C_s) de um OutcomeEnsemble."""
    return float(sum(
        entry.probability * entropy_from_concurrence(concurrence_pure(entry.state))
        for entry in ensemble.entries
    ))
