"""
Localizable Service
===================

Motor de localizable entanglement (LE): árvores de medição adaptativas,
enumeração e amostragem de ramos, estratégia construtiva, refinamento
numérico e oráculo em grade.

Os valores de ramo usam amplitudes não normalizadas: para um vetor de dois
qubits ψ̃ com ‖ψ̃‖² = p, p · C(ψ̃/√p) = 2|ãd̃ − b̃c̃|.
"""

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from config.settings import config
from services.entanglement_service import (
    BoundsRecord,
    assistance_upper_bound,
    concurrence_pure,
    max_correlation,
    parity_bounds,
)
from services.state_service import (
    MeasurementDirection,
    PureState,
    ReducedDensity,
    apply_measurement,
    correlation_matrix,
    partial_trace,
    project_site,
    reduced_density,
)
from services.theorem_service import constructive_step
from utils.exceptions import InvariantViolationError, ValidationError


PRODUCT = "product"
ADAPTIVE = "adaptive"


# =============================================================================
# 📦 TIPOS DE DOMÍNIO
# =============================================================================
@dataclass(frozen=True)
class PlanNode:
    """Nó da árvore: direção para `site` e as subárvores dos resultados (+, −)."""

    site: int
    direction: MeasurementDirection
    children: Tuple[Optional["PlanNode"], Optional["PlanNode"]] = (None, None)

    def child(self, outcome: int) -> Optional["PlanNode"]:
        return self.children[outcome]


@dataclass(frozen=True)
class MeasurementPlan:
    """
    Plano de medição sobre os qubits auxiliares.

    Modo "product": uma direção fixa por qubit, na ordem `order`.
    Modo "adaptive": árvore binária cujo nó de profundidade k mede order[k];
    `tree=None` indica direções calculadas durante a amostragem.
    """

    mode: str
    order: Tuple[int, ...]
    directions: Tuple[MeasurementDirection, ...] = ()
    tree: Optional[PlanNode] = None

    def __post_init__(self):
        order = tuple(int(k) for k in self.order)
        if len(set(order)) != len(order):
            raise ValidationError("order", f"qubit repetido em {order}")
        if self.mode not in (PRODUCT, ADAPTIVE):
            raise ValidationError("mode", f"modo {self.mode!r} inválido")
        if self.mode == PRODUCT and len(self.directions) != len(order):
            raise ValidationError("directions", f"esperadas {len(order)} direções, recebidas {len(self.directions)}")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "directions", tuple(self.directions))
        if self.tree is not None:
            _check_tree(self.tree, order, 0)

    def node_direction(self, node: Optional[PlanNode], depth: int) -> MeasurementDirection:
        """Direção usada na profundidade `depth` (nó da árvore ou plano produto)."""
        if self.mode == PRODUCT:
            return self.directions[depth]
        return node.direction

    def as_tree(self) -> PlanNode:
        """Árvore equivalente (o plano produto vira uma árvore com direção por nível)."""
        if self.mode == ADAPTIVE:
            if self.tree is None:
                raise ValidationError("plan", "plano adaptativo sem árvore materializada")
            return self.tree
        node = None
        for site, direction in reversed(list(zip(self.order, self.directions))):
            node = PlanNode(site, direction, (node, node))
        return node

    def describe(self) -> str:
        """Resumo de uma linha para logs e relatórios."""
        if self.mode == PRODUCT:
            angles = ", ".join(f"{k}:({d.theta:.3f},{d.phi:.3f})" for k, d in zip(self.order, self.directions))
            return f"product[{angles}]"
        return f"adaptive[order={list(self.order)}]"


def _check_tree(node: Optional[PlanNode], order: Tuple[int, ...], depth: int):
    if depth == len(order):
        if node is not None:
            raise ValidationError("tree", f"árvore mais profunda que {len(order)} níveis")
        return
    if node is None:
        raise ValidationError("tree", f"nó ausente na profundidade {depth}")
    if node.site != order[depth]:
        raise ValidationError("tree", f"nó de profundidade {depth} mede {node.site}, esperado {order[depth]}")
    for child in node.children:
        _check_tree(child, order, depth + 1)


@dataclass(frozen=True)
class OutcomeEntry:
    probability: float
    state: PureState
    outcome: str


@dataclass(frozen=True)
class OutcomeEnsemble:
    """Ensemble {p_s, |φ_s⟩} de estados de dois qubits no par (i, j)."""

    entries: Tuple[OutcomeEntry, ...]

    def __post_init__(self):
        total = sum(entry.probability for entry in self.entries)
        if abs(total - 1.0) > 1e-10:
            raise InvariantViolationError(f"probabilidades do ensemble somam {total:.15g}")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class LEResult:
    """Valor de LE com o plano que o atinge e metadados do método."""

    value: float
    plan: Optional[MeasurementPlan]
    method: str
    standard_error: Optional[float] = None
    details: Dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class EngineSettings:
    """Parâmetros do motor de LE."""

    method: str = config.DEFAULT_METHOD
    grid: int = config.DEFAULT_GRID
    samples: int = config.DEFAULT_SAMPLES
    seed: int = config.DEFAULT_SEED
    order: Optional[Tuple[int, ...]] = None
    refine_tolerance: float = config.REFINE_TOLERANCE
    refine_max_sweeps: int = config.REFINE_MAX_SWEEPS
    enumeration_limit: int = config.ENUMERATION_LIMIT
    parity: bool = False

    def __post_init__(self):
        if self.method not in config.AVAILABLE_METHODS:
            raise ValidationError("method", f"método {self.method!r} inválido, use {config.AVAILABLE_METHODS}")
        if self.grid < 1:
            raise ValidationError("grid", "a grade deve ter K >= 1")
        if self.samples < 1:
            raise ValidationError("samples", "são necessárias pelo menos 1 amostra")

    @classmethod
    def from_config(cls, **overrides) -> "EngineSettings":
        return cls(**{key: value for key, value in overrides.items() if value is not None})


# =============================================================================
# 🧭 AUXILIARES
# =============================================================================
def _check_pair(state: PureState, i: int, j: int) -> Tuple[int, int]:
    i, j = int(i), int(j)
    for name, site in (("i", i), ("j", j)):
        if not 0 <= site < state.n_qubits:
            raise ValidationError(name, f"sítio {site} fora de [0, {state.n_qubits - 1}]")
    if i == j:
        raise ValidationError("j", "os sítios i e j devem ser distintos")
    return i, j


def assisting_qubits(n_qubits: int, i: int, j: int) -> List[int]:
    return [k for k in range(n_qubits) if k not in (i, j)]


def default_order(n_qubits: int, i: int, j: int) -> Tuple[int, ...]:
    """Qubits auxiliares por distância crescente ao segmento [i, j]; empate pelo índice."""
    low, high = min(i, j), max(i, j)

    def distance(k: int) -> int:
        return 0 if low < k < high else min(abs(k - low), abs(k - high))

    return tuple(sorted(assisting_qubits(n_qubits, i, j), key=lambda k: (distance(k), k)))


def _resolve_order(state: PureState, i: int, j: int, order: Optional[Sequence[int]]) -> Tuple[int, ...]:
    if order is None:
        return default_order(state.n_qubits, i, j)
    order = tuple(int(k) for k in order)
    if sorted(order) != assisting_qubits(state.n_qubits, i, j):
        raise ValidationError("order", f"a ordem {order} deve conter cada qubit auxiliar exatamente uma vez")
    return order


def _pair_state(state: PureState, labels: Sequence[int], i: int, j: int) -> PureState:
    """Estado final de 2 qubits reordenado para (i, j)."""
    if list(labels) == [i, j]:
        return state
    return PureState(2, state.amplitudes.reshape(2, 2).T.reshape(-1))


def _pair_density(state: PureState, labels: Sequence[int], i: int, j: int) -> ReducedDensity:
    return reduced_density(state, [labels.index(i), labels.index(j)])


def _without(labels: Tuple[int, ...], site: int) -> Tuple[int, ...]:
    return tuple(k for k in labels if k != site)


def _weighted_concurrence(amplitudes: np.ndarray) -> np.ndarray:
    """2|ad − bc| sobre o último eixo de tamanho 4 (amplitudes não normalizadas)."""
    return 2.0 * np.abs(amplitudes[..., 0] * amplitudes[..., 3] - amplitudes[..., 1] * amplitudes[..., 2])


@lru_cache(maxsize=16)
def _placeholder_subtree(order: Tuple[int, ...]) -> Optional[PlanNode]:
    # medições em z para ramos impossíveis
    node = None
    for site in reversed(order):
        node = PlanNode(site, MeasurementDirection(0.0), (node, node))
    return node


def _check_enumeration(state: PureState, settings: EngineSettings):
    assisting = state.n_qubits - 2
    if assisting > settings.enumeration_limit:
        raise ValidationError(
            "n_qubits",
            f"{assisting} qubits auxiliares excedem o limite de enumeração ({settings.enumeration_limit}); use amostragem",
        )


# =============================================================================
# 🌳 ENUMERAÇÃO
# =============================================================================
def enumerate_outcomes(state: PureState, i: int, j: int, plan: MeasurementPlan,
                       settings: Optional[EngineSettings] = None) -> OutcomeEnsemble:
    """
    Todos os ramos não nulos do plano, por colapso sequencial.

    Args:
        state: Estado puro de N qubits
        i, j: Par alvo
        plan: Plano que cobre exatamente os qubits auxiliares

    Returns:
        OutcomeEnsemble em ordem determinística (resultado '+' antes de '−')
    """
    settings = settings or EngineSettings()
    i, j = _check_pair(state, i, j)
    _resolve_order(state, i, j, plan.order)
    _check_enumeration(state, settings)
    tree = plan.as_tree() if plan.order else None
    entries: List[OutcomeEntry] = []

    def walk(current: PureState, labels: Tuple[int, ...], node: Optional[PlanNode], depth: int,
             probability: float, path: str):
        if depth == len(plan.order):
            entries.append(OutcomeEntry(probability, _pair_state(current, labels, i, j), path))
            return
        site = plan.order[depth]
        direction = plan.node_direction(node, depth)
        for branch in apply_measurement(current, labels.index(site), direction):
            if branch.is_null:
                continue
            walk(branch.state, _without(labels, site), node.child(branch.outcome), depth + 1,
                 probability * branch.probability, path + "+-"[branch.outcome])

    walk(state, tuple(range(state.n_qubits)), tree, 0, 1.0, "")
    return OutcomeEnsemble(tuple(entries))


def average_entanglement(ensemble: OutcomeEnsemble) -> float:
    """Σ p_s C(|φ_s⟩)."""
    return float(sum(entry.probability * concurrence_pure(entry.state) for entry in ensemble.entries))


def _tree_value(state: PureState, labels: Tuple[int, ...], node: Optional[PlanNode], i: int, j: int) -> float:
    """Concorrência média da subárvore a partir de um estado normalizado."""
    if node is None:
        return concurrence_pure(_pair_state(state, labels, i, j))
    total = 0.0
    for branch in apply_measurement(state, labels.index(node.site), node.direction):
        if branch.is_null:
            continue
        total += branch.probability * _tree_value(branch.state, _without(labels, node.site),
                                                  node.child(branch.outcome), i, j)
    return total


# =============================================================================
# 🏗️ ESTRATÉGIA CONSTRUTIVA
# =============================================================================
def _cut_bound(state: PureState, labels: Tuple[int, ...], i: int, j: int) -> float:
    """
    Cota superior da concorrência final do par: mínimo de √(2(1 − Tr ρ_A²))
    sobre os blocos A de rótulos consecutivos (cíclicos) que contêm i e não contêm j.
    """
    ordered = sorted(range(len(labels)), key=lambda p: labels[p])
    m = len(ordered)
    start_i, start_j = ordered.index(labels.index(i)), ordered.index(labels.index(j))
    backward = (start_i - start_j) % m
    forward = (start_j - start_i) % m
    tensor = state.tensor()
    bound = 1.0
    for left in range(backward):
        for right in range(forward):
            side = [ordered[(start_i + t) % m] for t in range(-left, right + 1)]
            if 2 * len(side) > m:
                side = [p for p in range(m) if p not in side]
            purity = float(np.sum(np.abs(partial_trace(tensor, side)) ** 2))
            bound = min(bound, float(np.sqrt(max(2.0 * (1.0 - purity), 0.0))))
    return bound


def _lookahead_bound(state: PureState, labels: Tuple[int, ...], site: int, i: int, j: int):
    """
    Critério de desempate: média sobre os ramos de min(assistência do par,
    cota dos cortes) após medir `site`.
    """
    remaining = _without(labels, site)

    def score(direction: MeasurementDirection) -> float:
        total = 0.0
        for branch in apply_measurement(state, labels.index(site), direction):
            if branch.is_null:
                continue
            assistance = assistance_upper_bound(_pair_density(branch.state, remaining, i, j))
            total += branch.probability * min(assistance, _cut_bound(branch.state, remaining, i, j))
        return total

    return score


def constructive_direction(state: PureState, labels: Tuple[int, ...], site: int, i: int, j: int) -> MeasurementDirection:
    """
    Direção que não diminui a correlação média do par ao medir `site`.

    Args:
        state: Estado atual (qubits em `labels`)
        labels: Rótulos originais dos qubits restantes
        site: Qubit a medir

    Returns:
        MeasurementDirection
    """
    positions = [labels.index(i), labels.index(j), labels.index(site)]
    rho = reduced_density(state, positions)
    rho3 = ReducedDensity((i, j, site), rho.matrix, validate=False)
    direction, _, _ = constructive_step(rho3, i, j, site, _lookahead_bound(state, labels, site, i, j))
    return direction


def _constructive_node(state: PureState, labels: Tuple[int, ...], order: Tuple[int, ...], depth: int,
                       i: int, j: int) -> Tuple[Optional[PlanNode], float]:
    if depth == len(order):
        return None, concurrence_pure(_pair_state(state, labels, i, j))
    site = order[depth]
    direction = constructive_direction(state, labels, site, i, j)
    children, value = [], 0.0
    for branch in apply_measurement(state, labels.index(site), direction):
        if branch.is_null:
            children.append(_placeholder_subtree(order[depth + 1:]))
            continue
        child, child_value = _constructive_node(branch.state, _without(labels, site), order, depth + 1, i, j)
        children.append(child)
        value += branch.probability * child_value
    return PlanNode(site, direction, tuple(children)), value


def le_constructive(state: PureState, i: int, j: int, order: Optional[Sequence[int]] = None,
                    settings: Optional[EngineSettings] = None) -> LEResult:
    """
    LE pela estratégia construtiva: em cada ramo, mede o próximo qubit na
    direção que preserva a correlação média do par.

    Args:
        state: Estado puro com N >= 3
        i, j: Par alvo
        order: Ordem de medição (padrão: distância ao segmento [i, j])

    Returns:
        LEResult com o plano adaptativo completo

    Raises:
        InvariantViolationError: Se o valor ficar abaixo da correlação máxima
    """
    settings = settings or EngineSettings()
    i, j = _check_pair(state, i, j)
    if state.n_qubits < 3:
        raise ValidationError("n_qubits", "a estratégia construtiva requer N >= 3")
    _check_enumeration(state, settings)
    order = _resolve_order(state, i, j, order if order is not None else settings.order)

    tree, value = _constructive_node(state, tuple(range(state.n_qubits)), order, 0, i, j)
    lower, _, _ = max_correlation(correlation_matrix(state, i, j))
    if value < lower - config.SANDWICH_TOLERANCE:
        raise InvariantViolationError(f"estratégia construtiva {value:.12g} abaixo da correlação máxima {lower:.12g}")
    plan = MeasurementPlan(ADAPTIVE, order, tree=tree)
    return LEResult(value=min(value, 1.0), plan=plan, method="constructive", details={"max_correlation": lower})


# =============================================================================
# 🔬 ORÁCULO EM GRADE
# =============================================================================
def grid_directions(grid: int) -> List[MeasurementDirection]:
    """
    θ_k = πk/K (k = 0..K), φ_l = 2πl/K (l = 0..K−1); os polos aparecem uma vez.

    Grades com K' múltiplo de K contêm a grade K.
    """
    directions = [MeasurementDirection(0.0, 0.0)]
    for k in range(1, grid):
        theta = np.pi * k / grid
        directions.extend(MeasurementDirection(theta, 2 * np.pi * l / grid) for l in range(grid))
    directions.append(MeasurementDirection(np.pi, 0.0))
    return directions


def _bras(directions: Sequence[MeasurementDirection]) -> np.ndarray:
    """Array (2, D, 2): bras ⟨+| e ⟨−| de cada direção."""
    return np.stack([d.basis() for d in directions], axis=1)


def _tail_values(tensor: np.ndarray, bras: np.ndarray) -> np.ndarray:
    """
    Valor de plano produto vetorizado sobre os dois últimos eixos auxiliares.

    tensor tem eixos (i, j, a[, b]); retorna (D,) ou (D, D).
    """
    if tensor.ndim == 2:
        return _weighted_concurrence(tensor.reshape(4))
    if tensor.ndim == 3:
        total = 0.0
        for s in range(2):
            amplitudes = np.einsum("da,ija->dij", bras[s], tensor).reshape(-1, 4)
            total = total + _weighted_concurrence(amplitudes)
        return total
    total = 0.0
    for s1, s2 in itertools.product(range(2), repeat=2):
        amplitudes = np.einsum("da,eb,ijab->deij", bras[s1], bras[s2], tensor)
        total = total + _weighted_concurrence(amplitudes.reshape(amplitudes.shape[0], amplitudes.shape[1], 4))
    return total


def _best_product(tensor: np.ndarray, bras: np.ndarray) -> Tuple[float, Tuple[int, ...]]:
    """Melhor plano produto: laço sobre os qubits iniciais, vetorizado nos dois últimos."""
    n_assisting = tensor.ndim - 2
    leading = max(n_assisting - 2, 0)
    n_directions = bras.shape[1]
    best_value, best_index = -1.0, ()
    for combo in itertools.product(range(n_directions), repeat=leading):
        total = 0.0
        for outcomes in itertools.product(range(2), repeat=leading):
            projected = tensor
            for d, s in zip(combo, outcomes):
                projected = project_site(projected, 2, bras[s, d])
            total = total + _tail_values(projected, bras)
        values = np.atleast_1d(total)
        flat = int(np.argmax(values))
        if values.flat[flat] > best_value + 1e-15:
            best_value = float(values.flat[flat])
            best_index = combo + np.unravel_index(flat, values.shape) if n_assisting else ()
    return best_value, tuple(int(k) for k in best_index)


def _best_adaptive(tensor: np.ndarray, bras: np.ndarray, sites: Tuple[int, ...],
                   directions: Sequence[MeasurementDirection]) -> Tuple[float, Optional[PlanNode]]:
    """max_d Σ_s max_d' Σ_s' ... sobre tensores não normalizados."""
    if not sites:
        return float(_weighted_concurrence(tensor.reshape(4))), None
    if len(sites) == 1:
        values = _tail_values(tensor, bras)
        best = int(np.argmax(values))
        return float(values[best]), PlanNode(sites[0], directions[best], (None, None))
    if len(sites) == 2:
        # nível final vetorizado para todas as direções do penúltimo qubit
        inner_values, inner_best = [], []
        for s in range(2):
            projected = np.einsum("da,ijab->dijb", bras[s], tensor)
            per_last = 0.0
            for t in range(2):
                amplitudes = np.einsum("eb,dijb->deij", bras[t], projected)
                per_last = per_last + _weighted_concurrence(amplitudes.reshape(*amplitudes.shape[:2], 4))
            inner_best.append(np.argmax(per_last, axis=1))
            inner_values.append(np.max(per_last, axis=1))
        totals = inner_values[0] + inner_values[1]
        best = int(np.argmax(totals))
        children = tuple(
            PlanNode(sites[1], directions[int(inner_best[s][best])], (None, None)) for s in range(2)
        )
        return float(totals[best]), PlanNode(sites[0], directions[best], children)

    best_value, best_node = -1.0, None
    for d in range(bras.shape[1]):
        total, children = 0.0, []
        for s in range(2):
            value, child = _best_adaptive(project_site(tensor, 2, bras[s, d]), bras, sites[1:], directions)
            total += value
            children.append(child)
        if total > best_value + 1e-15:
            best_value, best_node = total, PlanNode(sites[0], directions[d], tuple(children))
    return best_value, best_node


def le_grid_oracle(state: PureState, i: int, j: int, grid: Optional[int] = None,
                   order: Optional[Sequence[int]] = None) -> LEResult:
    """
    Busca exaustiva na grade (θ, φ): melhor plano produto e, para N <= 5,
    a melhor árvore adaptativa.

    Args:
        state: Estado com N <= 6
        i, j: Par alvo
        grid: Resolução angular K

    Returns:
        LEResult com o melhor dos dois; details guarda ambos os valores
    """
    grid = int(grid or config.DEFAULT_GRID)
    i, j = _check_pair(state, i, j)
    if state.n_qubits > config.ORACLE_MAX_QUBITS:
        raise ValidationError("n_qubits", f"o oráculo em grade aceita N <= {config.ORACLE_MAX_QUBITS}")
    if grid < 1:
        raise ValidationError("grid", "a grade deve ter K >= 1")
    order = _resolve_order(state, i, j, order)
    directions = grid_directions(grid)
    bras = _bras(directions)
    tensor = np.moveaxis(state.tensor(), [i, j] + list(order), list(range(state.n_qubits)))

    product_value, indices = _best_product(tensor, bras)
    product_plan = MeasurementPlan(PRODUCT, order, tuple(directions[k] for k in indices))
    details = {"grid": grid, "directions": len(directions), "product_value": product_value}
    value, plan = product_value, product_plan

    if state.n_qubits <= config.ORACLE_ADAPTIVE_MAX_QUBITS and order:
        adaptive_value, tree = _best_adaptive(tensor, bras, order, directions)
        details["adaptive_value"] = adaptive_value
        if adaptive_value > value + 1e-12:
            value, plan = adaptive_value, MeasurementPlan(ADAPTIVE, order, tree=tree)

    return LEResult(value=min(value, 1.0), plan=plan, method="oracle", details=details)


# =============================================================================
# 📈 REFINAMENTO NUMÉRICO
# =============================================================================
def _direction_from_angles(theta: float, phi: float) -> MeasurementDirection:
    vector = [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    return MeasurementDirection.from_vector(vector)


def _node_value(state: PureState, labels: Tuple[int, ...], node: PlanNode,
                direction: MeasurementDirection, i: int, j: int) -> float:
    total = 0.0
    for branch in apply_measurement(state, labels.index(node.site), direction):
        if branch.is_null:
            continue
        total += branch.probability * _tree_value(branch.state, _without(labels, node.site),
                                                  node.child(branch.outcome), i, j)
    return total


def _refine_node(state: PureState, labels: Tuple[int, ...], node: Optional[PlanNode], i: int, j: int,
                 tolerance: float) -> Tuple[Optional[PlanNode], float]:
    """Uma varredura de cima para baixo; só aceita melhorias."""
    if node is None:
        return None, concurrence_pure(_pair_state(state, labels, i, j))

    current = _node_value(state, labels, node, node.direction, i, j)

    def objective(angles: np.ndarray) -> float:
        return -_node_value(state, labels, node, _direction_from_angles(*angles), i, j)

    start = np.array([node.direction.theta, node.direction.phi])
    simplex = np.array([start, start + [0.3, 0.0], start + [0.0, 0.3]])
    result = minimize(objective, x0=start, method="Nelder-Mead",
                      options={"xatol": 1e-6, "fatol": tolerance / 10, "maxiter": 200, "initial_simplex": simplex})
    direction = node.direction
    if -result.fun > current + tolerance:
        direction = _direction_from_angles(*result.x)

    children, value = [], 0.0
    for branch in apply_measurement(state, labels.index(node.site), direction):
        child = node.child(branch.outcome)
        if branch.is_null:
            children.append(child)
            continue
        refined, child_value = _refine_node(branch.state, _without(labels, node.site), child, i, j, tolerance)
        children.append(refined)
        value += branch.probability * child_value
    return PlanNode(node.site, direction, tuple(children)), value


def le_refine(state: PureState, i: int, j: int, init: Optional[MeasurementPlan] = None,
              settings: Optional[EngineSettings] = None) -> LEResult:
    """
    Subida por coordenadas sobre as direções dos nós da árvore.

    Args:
        state: Estado puro
        i, j: Par alvo
        init: Plano inicial (padrão: o da estratégia construtiva)
        settings: Tolerância e número máximo de varreduras

    Returns:
        LEResult; o valor nunca fica abaixo do valor do plano inicial
    """
    settings = settings or EngineSettings()
    i, j = _check_pair(state, i, j)
    _check_enumeration(state, settings)
    if init is None:
        init = le_constructive(state, i, j, settings=settings).plan
    _resolve_order(state, i, j, init.order)
    labels = tuple(range(state.n_qubits))
    tree = init.as_tree()
    value = _tree_value(state, labels, tree, i, j)
    history = [value]

    for _ in range(settings.refine_max_sweeps):
        candidate, candidate_value = _refine_node(state, labels, tree, i, j, settings.refine_tolerance)
        if candidate_value <= value + settings.refine_tolerance:
            break
        tree, value = candidate, candidate_value
        history.append(value)
    else:
        print(f"⚠️  Refinamento atingiu o limite de {settings.refine_max_sweeps} varreduras")

    plan = MeasurementPlan(ADAPTIVE, init.order, tree=tree)
    details = {"initial_value": history[0], "sweeps": len(history) - 1, "history": history}
    return LEResult(value=min(value, 1.0), plan=plan, method="refined", details=details)


# =============================================================================
# 🎲 AMOSTRAGEM DE RAMOS
# =============================================================================
def le_sampled(state: PureState, i: int, j: int, plan: Optional[MeasurementPlan] = None,
               settings: Optional[EngineSettings] = None) -> LEResult:
    """
    Estimativa de Monte Carlo da concorrência média, sorteando ramos com p_s.

    Sem `plan`, as direções vêm da estratégia construtiva calculada ao longo
    de cada caminho amostrado.

    Args:
        state: Estado puro (até MAX_QUBITS)
        i, j: Par alvo
        plan: Plano fixo opcional
        settings: Número de amostras e semente

    Returns:
        LEResult com erro padrão = desvio amostral / √n
    """
    settings = settings or EngineSettings(method="sampled")
    i, j = _check_pair(state, i, j)
    order = _resolve_order(state, i, j, plan.order if plan is not None else settings.order)
    tree = plan.as_tree() if plan is not None and plan.mode == ADAPTIVE and plan.tree is not None else None
    rng = np.random.default_rng(settings.seed)
    cache: Dict[str, MeasurementDirection] = {}
    samples = np.empty(settings.samples)

    for n in range(settings.samples):
        current, labels, node, path = state, tuple(range(state.n_qubits)), tree, ""
        for depth, site in enumerate(order):
            if plan is not None and plan.mode == PRODUCT:
                direction = plan.directions[depth]
            elif node is not None:
                direction = node.direction
            else:
                if path not in cache:
                    cache[path] = constructive_direction(current, labels, site, i, j)
                direction = cache[path]
            plus, minus = apply_measurement(current, labels.index(site), direction)
            branch = plus if rng.random() < plus.probability else minus
            if branch.is_null:
                branch = minus if branch is plus else plus
            current, labels = branch.state, _without(labels, site)
            node = node.child(branch.outcome) if node is not None else None
            path += "+-"[branch.outcome]
        samples[n] = concurrence_pure(_pair_state(current, labels, i, j))

    mean = float(np.mean(samples))
    error = float(np.std(samples, ddof=1) / np.sqrt(len(samples))) if len(samples) > 1 else 0.0
    result_plan = plan or MeasurementPlan(ADAPTIVE, order)
    details = {"samples": settings.samples, "seed": settings.seed, "distinct_paths": len(cache)}
    return LEResult(value=min(mean, 1.0), plan=result_plan, method="sampled", standard_error=error, details=details)


# =============================================================================
# 🥪 COTAS + ESTIMATIVA
# =============================================================================
def estimate_le(state: PureState, i: int, j: int, settings: Optional[EngineSettings] = None) -> LEResult:
    """Executa o método configurado; acima do limite de enumeração usa amostragem."""
    settings = settings or EngineSettings()
    i, j = _check_pair(state, i, j)
    if state.n_qubits == 2:
        value = concurrence_pure(_pair_state(state, (0, 1), i, j))
        return LEResult(value=value, plan=MeasurementPlan(PRODUCT, ()), method="exact")

    method = settings.method
    if method != "sampled" and state.n_qubits - 2 > settings.enumeration_limit:
        print(f"⚠️  N={state.n_qubits} acima do limite de enumeração, usando amostragem")
        method = "sampled"
    if method == "oracle":
        return le_grid_oracle(state, i, j, settings.grid, settings.order)
    if method == "refined":
        return le_refine(state, i, j, settings=settings)
    if method == "sampled":
        return le_sampled(state, i, j, settings=replace(settings, method="sampled"))
    return le_constructive(state, i, j, settings=settings)


def sandwich(state: PureState, i: int, j: int, settings: Optional[EngineSettings] = None) -> BoundsRecord:
    """
    Cota inferior, estimativa de LE e cota superior para o par (i, j).

    Args:
        state: Estado puro
        i, j: Par alvo
        settings: Método do motor; `parity=True` usa as fórmulas fechadas

    Returns:
        BoundsRecord com o LEResult anexado

    Raises:
        InvariantViolationError: Se a estimativa escapar das cotas
    """
    settings = settings or EngineSettings()
    i, j = _check_pair(state, i, j)
    if settings.parity:
        bounds = parity_bounds(state, i, j)
    else:
        lower, _, _ = max_correlation(correlation_matrix(state, i, j))
        upper = assistance_upper_bound(reduced_density(state, [i, j]))
        bounds = BoundsRecord(lower=min(lower, 1.0), upper=min(upper, 1.0))

    result = estimate_le(state, i, j, settings)
    record = bounds.with_estimate(result.value, result.method, result)
    slack = config.SANDWICH_TOLERANCE + 3.0 * (result.standard_error or 0.0)
    record.check_sandwich(slack)
    return record
