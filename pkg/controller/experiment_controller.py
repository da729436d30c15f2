"""
Experiment Controller
=====================

Controller principal para orquestrar os cenários da CLI (GHZ, cluster,
varredura de Ising, verificação do teorema e cotas de um estado em arquivo).

Os pontos de uma varredura rodam num pool de processos; `Pool.map` devolve os
resultados na ordem das tarefas, então as linhas saem na ordem da grade
independentemente de qual worker termina primeiro.
"""

import time
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations
from multiprocessing import Pool
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import config
from controller.state_controller import StateController
from services.entanglement_service import entropy_from_concurrence, max_correlation
from services.hamiltonian_service import ground_state, ising_saturation_mx2, ising_spec, parity_symmetric
from services.length_service import decay_exponent, entanglement_length
from services.localizable_service import EngineSettings, sandwich
from services.report_service import ReportService, ResultRow, TheoremCheckRow
from services.state_service import PureState, correlation_matrix, make_cluster, make_ghz
from services.theorem_service import constructive_step, inertia, random_mixed_density
from utils.exceptions import InvariantViolationError, LocalizableEntanglementError, ValidationError
from utils.performance_utils import PerformanceUtils


SCENARIOS = ["ghz", "cluster", "ising-sweep", "theorem-check", "bounds"]


# =============================================================================
# 📦 CONFIGURAÇÃO DA EXECUÇÃO
# =============================================================================
@dataclass(frozen=True)
class RunConfig:
    """Configuração efetiva de uma execução (flags > arquivo > padrões)."""

    scenario: str
    n: int = config.DEFAULT_QUBITS
    pair: Optional[Tuple[int, int]] = None
    lambdas: Tuple[float, ...] = tuple(config.DEFAULT_LAMBDA_GRID)
    distances: Optional[Tuple[int, ...]] = None
    epsilon_x: float = 0.0
    periodic: bool = False
    method: str = config.DEFAULT_METHOD
    grid: int = config.DEFAULT_GRID
    samples: int = config.DEFAULT_SAMPLES
    seed: int = config.DEFAULT_SEED
    ensembles: Tuple[str, ...] = tuple(config.THEOREM_ENSEMBLES)
    state_path: Optional[str] = None
    pairs: Optional[Tuple[Tuple[int, int], ...]] = None
    fit_length: bool = False
    timings: bool = False
    output_path: Optional[str] = None
    output_format: str = config.DEFAULT_FORMAT

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError("scenario", f"cenário {self.scenario!r} inválido, use {SCENARIOS}")
        if not 1 <= self.n <= config.MAX_QUBITS:
            raise ValidationError("n", f"deve estar entre 1 e {config.MAX_QUBITS}, recebido {self.n}")
        if self.method not in config.AVAILABLE_METHODS:
            raise ValidationError("method", f"método {self.method!r} inválido, use {config.AVAILABLE_METHODS}")
        if self.output_format not in config.AVAILABLE_FORMATS:
            raise ValidationError("format", f"formato {self.output_format!r} inválido, use {config.AVAILABLE_FORMATS}")
        if self.grid < 1:
            raise ValidationError("grid", "a grade deve ter K >= 1")
        if self.samples < 1:
            raise ValidationError("samples", "são necessárias pelo menos 1 amostra")
        if not self.lambdas:
            raise ValidationError("lambda_grid", "a grade de λ está vazia")
        if any(lam < 0 for lam in self.lambdas):
            raise ValidationError("lambda_grid", "os valores de λ devem ser >= 0")
        if self.distances is not None:
            if not self.distances:
                raise ValidationError("distances", "a lista de distâncias está vazia")
            if any(not 1 <= d < self.n for d in self.distances):
                raise ValidationError("distances", f"as distâncias devem estar em [1, {self.n - 1}]")
        unknown = [name for name in self.ensembles if name not in config.THEOREM_ENSEMBLES]
        if unknown or not self.ensembles:
            raise ValidationError("ensembles", f"ensembles inválidos {unknown}, use {list(config.THEOREM_ENSEMBLES)}")
        if self.pair is not None:
            i, j = self.pair
            if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
                raise ValidationError("pair", f"par ({i},{j}) inválido para n={self.n}")
        if self.scenario == "bounds" and not self.state_path:
            raise ValidationError("state", "o comando bounds requer --state")

    @property
    def resolved_distances(self) -> Tuple[int, ...]:
        if self.distances is not None:
            return tuple(self.distances)
        return tuple(range(1, self.n // 2 + 1))

    def engine_settings(self, parity: bool = False) -> EngineSettings:
        return EngineSettings(method=self.method, grid=self.grid, samples=self.samples, seed=self.seed, parity=parity)

    def to_dict(self) -> Dict[str, Any]:
        """Configuração ecoada no cabeçalho dos resultados (sem o caminho de saída)."""
        document = asdict(self)
        document.pop("output_path")
        for key, value in document.items():
            if isinstance(value, tuple):
                document[key] = [list(v) if isinstance(v, tuple) else v for v in value]
        return document


@dataclass
class CommandResult:
    """Linhas de um comando e o código de saída mais severo observado."""

    rows: List[Any] = field(default_factory=list)
    exit_code: int = 0

    def extend(self, other: "CommandResult"):
        self.rows.extend(other.rows)
        self.exit_code = max(self.exit_code, other.exit_code)


# =============================================================================
# 🧱 TAREFAS DOS WORKERS (nível de módulo para serem serializáveis)
# =============================================================================
def _build_error_response(scenario: str, error: Exception, **fields) -> CommandResult:
    """Linha de erro para um ponto que falhou; a execução continua."""
    exit_code = getattr(error, "exit_code", 1)
    print(f"   ❌ {scenario} {fields}: {error}")
    row = ResultRow(scenario=scenario, error=f"{type(error).__name__}: {error}", **fields)
    return CommandResult([row], exit_code)


def _pair_row(scenario: str, state: PureState, i: int, j: int, settings: EngineSettings,
              timings: bool = False, **fields) -> ResultRow:
    """Correlações, cotas e estimativa de LE para um par."""
    record, elapsed = PerformanceUtils.timed(sandwich, state, i, j, settings)
    cd = correlation_matrix(state, i, j)
    result = record.le_result
    return ResultRow(
        scenario=scenario,
        i=i,
        j=j,
        q_xx=float(cd.q[0, 0]),
        q_yy=float(cd.q[1, 1]),
        q_zz=float(cd.q[2, 2]),
        max_correlation=max_correlation(cd)[0],
        lower=record.lower,
        le_estimate=record.le_estimate,
        le_method=record.le_method,
        upper=record.upper,
        standard_error=result.standard_error if result is not None else None,
        le_entropy=entropy_from_concurrence(record.le_estimate),
        seed=settings.seed,
        wall_time=elapsed if timings else None,
        **fields,
    )


def _evaluate_pair(task: Tuple) -> CommandResult:
    scenario, state, i, j, settings, timings, fields = task
    try:
        return CommandResult([_pair_row(scenario, state, i, j, settings, timings, **fields)])
    except LocalizableEntanglementError as e:
        return _build_error_response(scenario, e, i=i, j=j, seed=settings.seed, **fields)


def central_pair(n: int, distance: int) -> Tuple[int, int]:
    """Par centrado na cadeia com j − i = distância."""
    i = (n - 1 - distance) // 2
    return i, i + distance


def _ising_point(task: Tuple) -> CommandResult:
    """Estado fundamental para um λ e linhas para todas as distâncias."""
    lam, n, distances, epsilon_x, periodic, settings, timings = task
    outcome = CommandResult()
    try:
        spec = ising_spec(n, lam, epsilon_x=epsilon_x, periodic=periodic)
        ground = ground_state(spec)
    except LocalizableEntanglementError as e:
        for distance in distances:
            i, j = central_pair(n, distance)
            outcome.extend(_build_error_response("ising-sweep", e, lam=lam, i=i, j=j, distance=distance,
                                                 seed=settings.seed))
        return outcome

    point_settings = replace(settings, parity=parity_symmetric(spec))
    mx2 = ising_saturation_mx2(lam) if lam > 1 else None
    for distance in distances:
        i, j = central_pair(n, distance)
        fields = {"lam": lam, "distance": distance, "gap": ground.gap}
        point = _evaluate_pair(("ising-sweep", ground.state, i, j, point_settings, timings, fields))
        for row in point.rows:
            if mx2 is not None and row.q_xx is not None:
                row.mx2_closed_form = mx2
                row.mx2_prefactor = row.q_xx / mx2
        outcome.extend(point)
    return outcome


def _theorem_chunk(task: Tuple) -> Dict[str, Any]:
    """Um bloco de amostras de um ensemble, com semente [seed, ensemble, bloco]."""
    seed, ensemble_index, chunk_index, rank, size = task
    rng = np.random.default_rng([seed, ensemble_index, chunk_index])
    gains: List[float] = []
    certificate_failures = 0
    inertia_checked = 0
    inertia_failures = 0
    start_time = time.perf_counter()

    for _ in range(size):
        rho3 = random_mixed_density(rng, rank)
        try:
            _, score, td = constructive_step(rho3, 0, 1, 2)
        except InvariantViolationError:
            certificate_failures += 1
            continue
        gains.append(score.gain)
        if rank == 2 ** 3 and not td.is_degenerate:
            inertia_checked += 1
            if inertia(td.S) != (2, 2):
                inertia_failures += 1

    return {
        "gains": gains,
        "certificate_failures": certificate_failures,
        "inertia_checked": inertia_checked,
        "inertia_failures": inertia_failures,
        "wall_time": time.perf_counter() - start_time,
    }


# =============================================================================
# 🎮 CONTROLLER
# =============================================================================
class ExperimentController:
    """Controller principal dos cenários."""

    def __init__(self, run_config: RunConfig, workers: Optional[int] = None):
        """
        Inicializa o controller.

        Args:
            run_config: Configuração efetiva
            workers: Tamanho do pool (padrão: LE_WORKERS ou todos os núcleos)
        """
        self.run_config = run_config
        self.workers = workers or config.get_worker_count()
        self.report_service = ReportService()
        self.state_controller = StateController()

    def _map(self, function: Callable, tasks: Sequence) -> List:
        """Map ordenado; serial com 1 worker ou 1 tarefa."""
        workers = min(self.workers, len(tasks))
        if workers <= 1:
            return [function(task) for task in tasks]
        with Pool(workers) as pool:
            return pool.map(function, tasks)

    def run(self) -> CommandResult:
        """Executa o cenário configurado."""
        commands = {
            "ghz": self.cmd_ghz,
            "cluster": self.cmd_cluster,
            "ising-sweep": self.cmd_ising_sweep,
            "theorem-check": self.cmd_theorem_check,
            "bounds": self.cmd_bounds,
        }
        print(f"🔄 Executando {self.run_config.scenario} ({self.workers} workers)")
        outcome, total_time = PerformanceUtils.timed(commands[self.run_config.scenario])
        metrics = PerformanceUtils.calculate_performance_metrics(outcome.rows, total_time)
        print(f"✅ {metrics['total_rows']} linhas em {metrics['total_time']:.2f}s")
        return outcome

    # -------------------------------------------------------------------------
    # GHZ e cluster
    # -------------------------------------------------------------------------
    def _default_pair(self) -> Tuple[int, int]:
        return self.run_config.pair or (0, self.run_config.n - 1)

    def cmd_ghz(self) -> CommandResult:
        """
        LE do par pedido num estado GHZ; falha (código 2) se LE < 1 − 1e−6.

        Raises:
            ValidationError: Se n < 3
        """
        rc = self.run_config
        if rc.n < 3:
            raise ValidationError("n", f"o cenário GHZ requer n >= 3 (qubits auxiliares), recebido {rc.n}")
        i, j = self._default_pair()
        outcome = _evaluate_pair(("ghz", make_ghz(rc.n), i, j, rc.engine_settings(), rc.timings, {}))
        for row in outcome.rows:
            if row.le_estimate is not None and row.le_estimate < 1 - config.GHZ_TARGET_TOLERANCE:
                print(f"❌ LE do GHZ = {row.le_estimate:.12g} abaixo de 1")
                outcome.exit_code = max(outcome.exit_code, InvariantViolationError.exit_code)
        return outcome

    def cmd_cluster(self) -> CommandResult:
        """
        LE do par pedido num estado cluster 1D.

        A linha recebe uma nota quando n < 5 (há pares com correlação) ou
        quando o próprio par pedido tem Q não nulo (pares das pontas da cadeia aberta).

        Raises:
            ValidationError: Se n < 3
        """
        rc = self.run_config
        if rc.n < 3:
            raise ValidationError("n", f"o cenário cluster requer n >= 3, recebido {rc.n}")
        i, j = self._default_pair()
        state = make_cluster(rc.n, periodic=rc.periodic)
        outcome = _evaluate_pair(("cluster", state, i, j, rc.engine_settings(), rc.timings, {}))

        note = None
        pair_largest = float(np.max(np.abs(correlation_matrix(state, i, j).q)))
        if rc.n < 5:
            largest = max(
                float(np.max(np.abs(correlation_matrix(state, a, b).q)))
                for a, b in combinations(range(rc.n), 2)
            )
            note = f"n < 5: correlations not all zero (max |Q| over pairs = {largest:.3g})"
        elif pair_largest > config.CLUSTER_ZERO_TOLERANCE:
            note = f"nonzero correlations for pair ({i},{j}) (max |Q| = {pair_largest:.3g})"
            print(f"⚠️  {note}")
        for row in outcome.rows:
            row.note = note
        return outcome

    # -------------------------------------------------------------------------
    # Ising
    # -------------------------------------------------------------------------
    def cmd_ising_sweep(self) -> CommandResult:
        """Uma linha por (λ, distância), mais linhas de ajuste de ξ_E por λ se pedido."""
        rc = self.run_config
        if rc.n < 3:
            raise ValidationError("n", f"a varredura de Ising requer n >= 3, recebido {rc.n}")
        distances = rc.resolved_distances
        settings = rc.engine_settings()
        tasks = [(lam, rc.n, distances, rc.epsilon_x, rc.periodic, settings, rc.timings) for lam in rc.lambdas]
        print(f"📈 {len(tasks)} valores de λ × {len(distances)} distâncias (N = {rc.n})")

        outcome = CommandResult()
        for lam, point in zip(rc.lambdas, self._map(_ising_point, tasks)):
            outcome.extend(point)
            if rc.fit_length:
                outcome.rows.append(self._length_row(lam, point.rows))
        return outcome

    @staticmethod
    def _length_row(lam: float, rows: Sequence[ResultRow]) -> ResultRow:
        """Ajuste de ξ_E sobre a série de distâncias de um λ."""
        valid = [row for row in rows if not row.error and row.le_estimate is not None]
        series = [(row.distance, row.le_estimate) for row in valid]
        if len(series) < config.LENGTH_MIN_POINTS or any(value <= 0 for _, value in series):
            return ResultRow(scenario="ising-length", lam=lam, note="not fitted")

        fit = entanglement_length(series)
        correlations = [(row.distance, abs(row.q_xx)) for row in valid]
        exponent = decay_exponent(correlations) if all(value > 0 for _, value in correlations) else None
        return ResultRow(
            scenario="ising-length",
            lam=lam,
            xi_e=fit.xi_e,
            decay=fit.decay,
            decay_exponent=exponent,
            note=f"window={','.join(str(n) for n in fit.window)}",
        )

    # -------------------------------------------------------------------------
    # Teorema
    # -------------------------------------------------------------------------
    def cmd_theorem_check(self) -> CommandResult:
        """
        Ganho de correlação da direção construída em densidades aleatórias de 3 qubits.

        Returns:
            Uma linha por ensemble; código 2 se houver ganho < −1e−9 ou inércia ≠ (2, 2)
        """
        rc = self.run_config
        chunk_size = config.THEOREM_CHUNK_SIZE
        tasks, owners = [], []
        for ensemble_index, name in enumerate(rc.ensembles):
            rank = config.THEOREM_ENSEMBLES[name]
            for chunk_index, start in enumerate(range(0, rc.samples, chunk_size)):
                tasks.append((rc.seed, ensemble_index, chunk_index, rank, min(chunk_size, rc.samples - start)))
                owners.append(name)
        print(f"🎲 {rc.samples} amostras × {len(rc.ensembles)} ensembles")

        chunks = self._map(_theorem_chunk, tasks)
        outcome = CommandResult()
        for name in rc.ensembles:
            parts = [chunk for owner, chunk in zip(owners, chunks) if owner == name]
            gains = np.array([gain for chunk in parts for gain in chunk["gains"]])
            violations = int(np.sum(gains < -config.THEOREM_GAIN_TOLERANCE))
            violations += sum(chunk["certificate_failures"] for chunk in parts)
            row = TheoremCheckRow(
                scenario="theorem-check",
                ensemble=name,
                rank=config.THEOREM_ENSEMBLES[name],
                samples=rc.samples,
                violations=violations,
                min_gain=float(np.min(gains)) if gains.size else None,
                mean_gain=float(np.mean(gains)) if gains.size else None,
                inertia_checked=sum(chunk["inertia_checked"] for chunk in parts),
                inertia_failures=sum(chunk["inertia_failures"] for chunk in parts),
                seed=rc.seed,
                wall_time=sum(chunk["wall_time"] for chunk in parts) if rc.timings else None,
            )
            if row.violations or row.inertia_failures:
                print(f"❌ {name}: {row.violations} violações, {row.inertia_failures} falhas de inércia")
                outcome.exit_code = InvariantViolationError.exit_code
            else:
                print(f"   ✅ {name}: ganho mínimo {row.min_gain:.3e}")
            outcome.rows.append(row)
        return outcome

    # -------------------------------------------------------------------------
    # Estado em arquivo
    # -------------------------------------------------------------------------
    def cmd_bounds(self) -> CommandResult:
        """Cotas e LE para os pares pedidos (padrão: todos) de um estado em arquivo."""
        rc = self.run_config
        state = self.state_controller.load_state(rc.state_path)
        self.state_controller.print_state_report(state)
        pairs = self.state_controller.validate_pairs(state.n_qubits, rc.pairs)
        parity = self.state_controller.has_definite_parity(state)
        if parity:
            print("⚖️  Estado com paridade definida: usando cotas em forma fechada")
        settings = rc.engine_settings(parity=parity)
        tasks = [("bounds", state, i, j, settings, rc.timings, {}) for i, j in pairs]

        outcome = CommandResult()
        for point in self._map(_evaluate_pair, tasks):
            outcome.extend(point)
        return outcome

    # -------------------------------------------------------------------------
    # Saída
    # -------------------------------------------------------------------------
    def save(self, outcome: CommandResult) -> str:
        """
        Grava as linhas no caminho configurado.

        Returns:
            Caminho do arquivo gravado
        """
        rc = self.run_config
        output_file = config.get_output_path(rc.output_path or f"{rc.scenario}.{rc.output_format}")
        path = self.report_service.write(outcome.rows, rc.to_dict(), output_file, rc.output_format)
        summary = self.report_service.generate_summary_report(outcome.rows)
        self.report_service.print_summary(summary)
        print(f"💾 Resultados salvos em: {path}")
        return str(path)
