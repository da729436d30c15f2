"""
Hamiltonian Service
===================

Hamiltonianos de dois corpos H = −Σ γ_α^{ij} σ_α^i σ_α^j − Σ γ^i σ_z^i − Σ ε^i σ_x^i,
estado fundamental por diagonalização exata (densa ou Lanczos sem matriz) e
grandezas analíticas de referência do modelo de Ising.
"""

import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from config.settings import config
from services.state_service import AXES, PureState
from utils.exceptions import SolverError, ValidationError


# =============================================================================
# 📦 TIPOS DE DOMÍNIO
# =============================================================================
@dataclass(frozen=True)
class Coupling:
    """Termo −strength · σ_axis^i σ_axis_j^j."""

    i: int
    j: int
    axis: str
    strength: float
    axis_j: Optional[str] = None

    def __post_init__(self):
        if self.i == self.j:
            raise ValidationError("couplings", f"acoplamento com i = j = {self.i}")
        axis = str(self.axis).lower()
        axis_j = str(self.axis_j or axis).lower()
        if axis not in AXES or axis_j not in AXES:
            raise ValidationError("couplings", f"eixos inválidos ({self.axis}, {self.axis_j})")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "axis_j", axis_j)
        object.__setattr__(self, "strength", float(self.strength))

    @property
    def is_diagonal_axis(self) -> bool:
        """True para termos σ_α^i σ_α^j (mesmo eixo nos dois sítios)."""
        return self.axis == self.axis_j


@dataclass(frozen=True)
class HamiltonianSpec:
    """Coeficientes de acoplamento e campos que definem H."""

    n_qubits: int
    couplings: Tuple[Coupling, ...] = ()
    z_fields: Tuple[float, ...] = ()
    x_fields: Tuple[float, ...] = ()
    model_family: bool = False
    periodic: bool = False

    def __post_init__(self):
        n = int(self.n_qubits)
        if not 1 <= n <= config.MAX_QUBITS:
            raise ValidationError("n_qubits", f"deve estar entre 1 e {config.MAX_QUBITS}")
        couplings = tuple(c if isinstance(c, Coupling) else Coupling(**c) for c in self.couplings)
        z_fields = tuple(float(g) for g in self.z_fields) or (0.0,) * n
        x_fields = tuple(float(e) for e in self.x_fields) or (0.0,) * n
        if len(z_fields) != n or len(x_fields) != n:
            raise ValidationError("fields", f"são esperados {n} campos por sítio")
        for coupling in couplings:
            if not (0 <= coupling.i < n and 0 <= coupling.j < n):
                raise ValidationError("couplings", f"sítios ({coupling.i}, {coupling.j}) fora do registrador")
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "z_fields", z_fields)
        object.__setattr__(self, "x_fields", x_fields)
        if self.model_family:
            self._check_model_family()

    def _check_model_family(self):
        strengths: Dict[Tuple[int, int], Dict[str, float]] = {}
        for coupling in self.couplings:
            if not coupling.is_diagonal_axis:
                raise ValidationError("couplings", "a família do modelo só admite termos σ_α σ_α")
            pair = tuple(sorted((coupling.i, coupling.j)))
            per_axis = strengths.setdefault(pair, {"x": 0.0, "y": 0.0, "z": 0.0})
            per_axis[coupling.axis] += coupling.strength
        for pair, per_axis in strengths.items():
            if not per_axis["x"] >= per_axis["y"] >= 0:
                raise ValidationError("couplings", f"par {pair} viola γx ≥ γy ≥ 0")

    def to_dict(self) -> Dict:
        """Documento serializável (JSON)."""
        return {
            "n_qubits": self.n_qubits,
            "couplings": [asdict(c) for c in self.couplings],
            "z_fields": list(self.z_fields),
            "x_fields": list(self.x_fields),
            "model_family": self.model_family,
            "periodic": self.periodic,
        }

    @classmethod
    def from_dict(cls, document: Dict) -> "HamiltonianSpec":
        """Reconstrói a especificação a partir de `to_dict()`."""
        try:
            return cls(
                n_qubits=int(document["n_qubits"]),
                couplings=tuple(Coupling(**c) for c in document.get("couplings", [])),
                z_fields=tuple(document.get("z_fields", ())),
                x_fields=tuple(document.get("x_fields", ())),
                model_family=bool(document.get("model_family", False)),
                periodic=bool(document.get("periodic", False)),
            )
        except (KeyError, TypeError) as e:
            raise ValidationError("spec", f"documento inválido: {e}") from e


@dataclass(frozen=True)
class SolverSettings:
    """Parâmetros do solver de autovalores."""

    dense_max_qubits: int = config.DENSE_SOLVER_MAX_QUBITS
    tolerance: float = config.LANCZOS_TOLERANCE
    max_iterations: int = config.LANCZOS_MAX_ITERATIONS
    seed: int = config.LANCZOS_SEED
    parity_tolerance: float = config.PARITY_DEGENERACY_TOLERANCE

    @classmethod
    def from_config(cls, **overrides) -> "SolverSettings":
        """Padrões de `config`, com sobrescritas opcionais."""
        return cls(**overrides)


@dataclass(frozen=True)
class GroundStateResult:
    """Estado fundamental, energia e gap para o primeiro estado excitado."""

    state: PureState
    energy: float
    gap: float
    method: str = "dense"
    parity: Optional[int] = None
    details: Dict = field(default_factory=dict, compare=False)


# =============================================================================
# 🏗️ CONSTRUTORES
# =============================================================================
def chain_spec(n: int, gamma_x: float = 0.0, gamma_y: float = 0.0, gamma_z: float = 0.0,
               z_field: float = 1.0, epsilon_x: float = 0.0, periodic: bool = False,
               model_family: bool = True) -> HamiltonianSpec:
    """
    Cadeia de primeiros vizinhos da família de dois corpos (XY, XXZ, Ising).

    Args:
        n: Número de sítios (>= 2)
        gamma_x, gamma_y, gamma_z: Acoplamentos por eixo
        z_field: Campo uniforme γ^i na direção z
        epsilon_x: Perturbação uniforme na direção x
        periodic: Se fecha o anel (n-1, 0)
        model_family: Se exige γx ≥ γy ≥ 0

    Returns:
        HamiltonianSpec
    """
    if n < 2:
        raise ValidationError("n", "a cadeia requer n >= 2")
    bonds = [(k, k + 1) for k in range(n - 1)]
    if periodic and n > 2:
        bonds.append((n - 1, 0))
    couplings = []
    for i, j in bonds:
        for axis, strength in (("x", gamma_x), ("y", gamma_y), ("z", gamma_z)):
            if strength != 0:
                couplings.append(Coupling(i, j, axis, strength))
    return HamiltonianSpec(
        n_qubits=n,
        couplings=tuple(couplings),
        z_fields=(float(z_field),) * n,
        x_fields=(float(epsilon_x),) * n,
        model_family=model_family,
        periodic=periodic,
    )


def ising_spec(n: int, lam: float, epsilon_x: float = 0.0, periodic: bool = False) -> HamiltonianSpec:
    """
    Cadeia de Ising em campo transverso: γ_x^{i,i+1} = λ, γ^i = 1.

    Args:
        n: Número de sítios (>= 2)
        lam: Acoplamento λ >= 0
        epsilon_x: Campo de perturbação em x (quebra a paridade)
        periodic: Condições de contorno periódicas

    Returns:
        HamiltonianSpec
    """
    if lam < 0:
        raise ValidationError("lambda", f"λ deve ser >= 0, recebido {lam}")
    return chain_spec(n, gamma_x=lam, z_field=1.0, epsilon_x=epsilon_x, periodic=periodic)


def save_spec(spec: HamiltonianSpec, path) -> Path:
    """Grava a especificação como documento JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(spec.to_dict(), f, indent=2)
    return path


def load_spec(path) -> HamiltonianSpec:
    """Lê uma especificação gravada por `save_spec`."""
    with open(path, "r", encoding="utf-8") as f:
        return HamiltonianSpec.from_dict(json.load(f))


# =============================================================================
# ⚙️ OPERADOR SEM MATRIZ
# =============================================================================
class HamiltonianOperator:
    """
    Aplicação de H termo a termo sem materializar a matriz 2^n × 2^n.

    Cada termo de Pauli vira (máscara de bits invertidos, vetor de fase);
    termos com a mesma máscara são somados.
    """

    def __init__(self, spec: HamiltonianSpec):
        self.spec = spec
        self.n_qubits = spec.n_qubits
        self.dimension = 2 ** spec.n_qubits
        self._index = np.arange(self.dimension)
        terms: Dict[int, np.ndarray] = {}

        for coupling in spec.couplings:
            mask, phase = self._pauli_string(((coupling.i, coupling.axis), (coupling.j, coupling.axis_j)))
            self._add(terms, mask, -coupling.strength * phase)
        for site, gamma in enumerate(spec.z_fields):
            if gamma != 0:
                mask, phase = self._pauli_string(((site, "z"),))
                self._add(terms, mask, -gamma * phase)
        for site, epsilon in enumerate(spec.x_fields):
            if epsilon != 0:
                mask, phase = self._pauli_string(((site, "x"),))
                self._add(terms, mask, -epsilon * phase)

        self.is_real = all(np.allclose(coef.imag, 0) for coef in terms.values())
        diagonal = terms.pop(0, np.zeros(self.dimension, dtype=complex))
        self._diagonal = diagonal.real if self.is_real else diagonal
        self._off_diagonal = [(mask, coef.real if self.is_real else coef) for mask, coef in sorted(terms.items())]
        self._dense: Optional[np.ndarray] = None

    def _bit(self, site: int) -> np.ndarray:
        return (self._index >> (self.n_qubits - 1 - site)) & 1

    def _pauli_string(self, factors: Iterable[Tuple[int, str]]) -> Tuple[int, np.ndarray]:
        # fase avaliada nos bits do índice de saída
        mask = 0
        phase = np.ones(self.dimension, dtype=complex)
        for site, axis in factors:
            bit = self._bit(site)
            if axis in ("x", "y"):
                mask ^= 1 << (self.n_qubits - 1 - site)
            if axis == "y":
                phase = phase * 1j * (2 * bit - 1)
            elif axis == "z":
                phase = phase * (1 - 2 * bit)
        return mask, phase

    @staticmethod
    def _add(terms: Dict[int, np.ndarray], mask: int, coefficient: np.ndarray):
        if mask in terms:
            terms[mask] = terms[mask] + coefficient
        else:
            terms[mask] = coefficient

    def apply(self, vectors: np.ndarray) -> np.ndarray:
        """
        Calcula H·v para um vetor (2^n,) ou um bloco de colunas (2^n, k).

        Args:
            vectors: Vetor(es) de amplitudes

        Returns:
            Array com a mesma forma da entrada
        """
        vectors = np.asarray(vectors)
        if vectors.shape[0] != self.dimension:
            raise ValidationError("v", f"comprimento {vectors.shape[0]} diferente de 2^n = {self.dimension}")
        column = (slice(None),) + (None,) * (vectors.ndim - 1)
        result = self._diagonal[column] * vectors
        for mask, coefficient in self._off_diagonal:
            result = result + coefficient[column] * vectors[self._index ^ mask]
        return result

    def dense(self) -> np.ndarray:
        """Matriz densa (apenas para n pequeno)."""
        if self._dense is None:
            dtype = float if self.is_real else complex
            self._dense = self.apply(np.eye(self.dimension, dtype=dtype))
        return self._dense


@lru_cache(maxsize=8)
def hamiltonian_operator(spec: HamiltonianSpec) -> HamiltonianOperator:
    """Operador cacheado por especificação (as especificações são imutáveis)."""
    return HamiltonianOperator(spec)


def apply_hamiltonian(spec: HamiltonianSpec, v: np.ndarray) -> np.ndarray:
    """
    H·v sem construir a matriz.

    Args:
        spec: Especificação do Hamiltoniano
        v: Vetor de comprimento 2^n

    Returns:
        H·v
    """
    return hamiltonian_operator(spec).apply(v)


# =============================================================================
# 🔎 SIMETRIA E ESTADO FUNDAMENTAL
# =============================================================================
def parity_symmetric(spec: HamiltonianSpec) -> bool:
    """
    True se H comuta com ⊗σz: todo termo inverte a paridade um número par de
    vezes e não há campo em x.
    """
    if any(epsilon != 0 for epsilon in spec.x_fields):
        return False
    for coupling in spec.couplings:
        flips = sum(axis in ("x", "y") for axis in (coupling.axis, coupling.axis_j))
        if flips % 2:
            return False
    return True


def parity_sectors(n_qubits: int) -> Tuple[np.ndarray, np.ndarray]:
    """Índices da base com paridade ⊗σz = +1 (par) e −1 (ímpar)."""
    index = np.arange(2 ** n_qubits)
    popcount = np.zeros_like(index)
    for site in range(n_qubits):
        popcount += (index >> site) & 1
    return index[popcount % 2 == 0], index[popcount % 2 == 1]


def _lowest_eigenpairs(operator: HamiltonianOperator, indices: np.ndarray, k: int,
                       settings: SolverSettings) -> Tuple[np.ndarray, np.ndarray, str]:
    """Menores k autopares de H restrito ao subespaço `indices`."""
    size = len(indices)
    k = min(k, size)
    if operator.n_qubits <= settings.dense_max_qubits or size <= 2 * k + 1:
        matrix = operator.dense()[np.ix_(indices, indices)]
        values, vectors = np.linalg.eigh(matrix)
        return values[:k], vectors[:, :k], "dense"

    dtype = float if operator.is_real else complex

    def matvec(x):
        full = np.zeros(operator.dimension, dtype=np.result_type(dtype, x.dtype))
        full[indices] = np.ravel(x)
        return operator.apply(full)[indices]

    linear_operator = LinearOperator((size, size), matvec=matvec, dtype=dtype)
    v0 = np.random.default_rng(settings.seed).normal(size=size).astype(dtype)
    try:
        values, vectors = eigsh(linear_operator, k=k, which="SA", tol=settings.tolerance,
                                maxiter=settings.max_iterations, v0=v0)
    except ArpackNoConvergence:
        print(f"⚠️  Lanczos não convergiu em {settings.max_iterations} iterações; repetindo com subespaço maior")
        retry_iterations = 10 * settings.max_iterations
        try:
            values, vectors = eigsh(linear_operator, k=k, which="SA", tol=settings.tolerance,
                                    maxiter=retry_iterations, v0=v0, ncv=min(size, max(4 * k + 1, 40)))
        except ArpackNoConvergence as e:
            raise SolverError(f"Lanczos não convergiu em {retry_iterations} iterações: {e}") from e
    order = np.argsort(values)
    return values[order], vectors[:, order], "lanczos"


def _fix_global_phase(vector: np.ndarray) -> np.ndarray:
    vector = vector / np.linalg.norm(vector)
    pivot = vector[int(np.argmax(np.abs(vector)))]
    return vector * (np.conj(pivot) / abs(pivot))


def ground_state(spec: HamiltonianSpec, settings: Optional[SolverSettings] = None) -> GroundStateResult:
    """
    Estado fundamental por diagonalização exata.

    Para n <= 10 usa diagonalização densa; acima, Lanczos (ARPACK) sobre o
    operador sem matriz. Com simetria de paridade, diagonaliza cada setor
    separadamente e escolhe o setor par salvo quando o ímpar é estritamente
    mais baixo; o gap é medido contra o espectro completo.

    Args:
        spec: Especificação do Hamiltoniano
        settings: Parâmetros do solver (padrão: config)

    Returns:
        GroundStateResult com fase global fixada (maior amplitude real positiva)
    """
    settings = settings or SolverSettings.from_config()
    operator = hamiltonian_operator(spec)
    dimension = operator.dimension

    if parity_symmetric(spec) and spec.n_qubits >= 2:
        even, odd = parity_sectors(spec.n_qubits)
        even_values, even_vectors, method = _lowest_eigenpairs(operator, even, 2, settings)
        odd_values, odd_vectors, _ = _lowest_eigenpairs(operator, odd, 2, settings)
        if odd_values[0] < even_values[0] - settings.parity_tolerance:
            indices, values, vectors, parity = odd, odd_values, odd_vectors, -1
        else:
            indices, values, vectors, parity = even, even_values, even_vectors, 1
        spectrum = np.sort(np.concatenate([even_values, odd_values]))
        energy = float(values[0])
        gap = float(spectrum[1] - energy) if len(spectrum) > 1 else float("inf")
        vector = np.zeros(dimension, dtype=vectors.dtype)
        vector[indices] = vectors[:, 0]
    else:
        values, vectors, method = _lowest_eigenpairs(operator, np.arange(dimension), 2, settings)
        energy = float(values[0])
        gap = float(values[1] - values[0]) if len(values) > 1 else float("inf")
        vector, parity = vectors[:, 0], None

    state = PureState.from_amplitudes(_fix_global_phase(vector.astype(complex)), normalize=True)
    return GroundStateResult(state=state, energy=energy, gap=gap, method=method, parity=parity)


def ising_saturation_mx2(lam: float) -> float:
    """
    Valor de saturação M_x² = ¼(1 − λ^(−2))^(1/4) para λ > 1.

    Args:
        lam: Acoplamento λ > 1

    Returns:
        M_x² na normalização de spin-½
    """
    if not lam > 1:
        raise ValidationError("lambda", f"a saturação só existe para λ > 1, recebido {lam}")
    return 0.25 * (1.0 - lam ** -2.0) ** 0.25
