# config/settings.py

"""
Configurações Essenciais - Localizable Entanglement
===================================================
Configure aqui os diretórios, limites e tolerâncias principais do sistema
"""
import os
from pathlib import Path

# =============================================================================
# 📁 DIRETÓRIOS DO PROGRAMA (ALTERE AQUI CONFORME NECESSÁRIO)
# =============================================================================
# Diretório raiz do projeto
PROJECT_ROOT = Path(__file__).parent.parent

# 📊 Diretório de resultados
OUTPUT_DIR = PROJECT_ROOT / "output"                # ← Tabelas CSV/JSON geradas pela CLI

# =============================================================================
# ⚛️ LIMITES DO REGISTRADOR DE QUBITS
# =============================================================================
# Número máximo de qubits num vetor de estado (2^20 amplitudes complexas ≈ 16MB)
MAX_QUBITS = 20

# Abaixo deste tamanho o estado fundamental é obtido por diagonalização densa
DENSE_SOLVER_MAX_QUBITS = 10

# Número máximo de qubits auxiliares para enumeração completa dos ramos
ENUMERATION_LIMIT = 16

# =============================================================================
# 🎯 TOLERÂNCIAS NUMÉRICAS
# =============================================================================
NORM_TOLERANCE = 1e-12            # Normalização de estados e traços
NULL_BRANCH_PROBABILITY = 1e-14   # Ramos abaixo disto são impossíveis
PSD_TOLERANCE = 1e-10             # Autovalores negativos tolerados em ρ
SANDWICH_TOLERANCE = 1e-9         # lower ≤ LE ≤ upper
DEGENERATE_ALPHA = 1e-12          # |α| abaixo disto → regra degenerada do teorema
THEOREM_VERIFY_TOLERANCE = 1e-9   # x̄ᵀMx̄ abaixo de -tol indica falha de implementação

# =============================================================================
# 🔧 SOLVER DE AUTOVALORES (LANCZOS / ARPACK)
# =============================================================================
LANCZOS_TOLERANCE = 1e-12
LANCZOS_MAX_ITERATIONS = 5000
LANCZOS_SEED = 7
PARITY_DEGENERACY_TOLERANCE = 1e-10

# =============================================================================
# 🧮 MOTOR DE LOCALIZABLE ENTANGLEMENT
# =============================================================================
DEFAULT_METHOD = "constructive"
AVAILABLE_METHODS = ["constructive", "refined", "oracle", "sampled"]
ORACLE_MAX_QUBITS = 6
ORACLE_ADAPTIVE_MAX_QUBITS = 5
DEFAULT_GRID = 24
DEFAULT_SAMPLES = 1000
DEFAULT_SEED = 1
REFINE_TOLERANCE = 1e-9
REFINE_MAX_SWEEPS = 20

# Comprimento de emaranhamento (ξ_E)
LENGTH_SLOPE_THRESHOLD = 0.02
LENGTH_RESIDUAL_THRESHOLD = 0.05
LENGTH_SATURATION_EXPONENT = 0.05
LENGTH_MIN_POINTS = 3

# =============================================================================
# 🧪 CENÁRIOS DA CLI
# =============================================================================
DEFAULT_QUBITS = 8
DEFAULT_LAMBDA_GRID = [0.5, 1.0, 2.0]
GHZ_TARGET_TOLERANCE = 1e-6        # cmd_ghz falha se LE < 1 − tol
CLUSTER_ZERO_TOLERANCE = 1e-10     # |Q_αβ| abaixo disto conta como zero
THEOREM_ENSEMBLES = {"pure": 1, "rank2": 2, "full": 8}
THEOREM_GAIN_TOLERANCE = 1e-9      # ganho < −tol conta como violação
THEOREM_CHUNK_SIZE = 500           # Amostras por tarefa do pool

# =============================================================================
# 📄 SAÍDA
# =============================================================================
AVAILABLE_FORMATS = ["csv", "json"]
DEFAULT_FORMAT = "csv"
SIGNIFICANT_DIGITS = 12

# Variável de ambiente com o tamanho do pool de workers
WORKERS_ENV_VAR = "LE_WORKERS"

# =============================================================================
# 🔧 CLASSE DE CONFIGURAÇÃO (NÃO ALTERE ESTA PARTE)
# =============================================================================
class Config:
    """Configurações centralizadas do sistema."""

    # Diretórios principais
    PROJECT_ROOT = PROJECT_ROOT
    OUTPUT_DIR = OUTPUT_DIR

    # Limites
    MAX_QUBITS = MAX_QUBITS
    DENSE_SOLVER_MAX_QUBITS = DENSE_SOLVER_MAX_QUBITS
    ENUMERATION_LIMIT = ENUMERATION_LIMIT

    # Tolerâncias
    NORM_TOLERANCE = NORM_TOLERANCE
    NULL_BRANCH_PROBABILITY = NULL_BRANCH_PROBABILITY
    PSD_TOLERANCE = PSD_TOLERANCE
    SANDWICH_TOLERANCE = SANDWICH_TOLERANCE
    DEGENERATE_ALPHA = DEGENERATE_ALPHA
    THEOREM_VERIFY_TOLERANCE = THEOREM_VERIFY_TOLERANCE

    # Solver
    LANCZOS_TOLERANCE = LANCZOS_TOLERANCE
    LANCZOS_MAX_ITERATIONS = LANCZOS_MAX_ITERATIONS
    LANCZOS_SEED = LANCZOS_SEED
    PARITY_DEGENERACY_TOLERANCE = PARITY_DEGENERACY_TOLERANCE

    # Motor LE
    DEFAULT_METHOD = DEFAULT_METHOD
    AVAILABLE_METHODS = AVAILABLE_METHODS
    ORACLE_MAX_QUBITS = ORACLE_MAX_QUBITS
    ORACLE_ADAPTIVE_MAX_QUBITS = ORACLE_ADAPTIVE_MAX_QUBITS
    DEFAULT_GRID = DEFAULT_GRID
    DEFAULT_SAMPLES = DEFAULT_SAMPLES
    DEFAULT_SEED = DEFAULT_SEED
    REFINE_TOLERANCE = REFINE_TOLERANCE
    REFINE_MAX_SWEEPS = REFINE_MAX_SWEEPS
    LENGTH_SLOPE_THRESHOLD = LENGTH_SLOPE_THRESHOLD
    LENGTH_RESIDUAL_THRESHOLD = LENGTH_RESIDUAL_THRESHOLD
    LENGTH_SATURATION_EXPONENT = LENGTH_SATURATION_EXPONENT
    LENGTH_MIN_POINTS = LENGTH_MIN_POINTS

    # Cenários da CLI
    DEFAULT_QUBITS = DEFAULT_QUBITS
    DEFAULT_LAMBDA_GRID = DEFAULT_LAMBDA_GRID
    GHZ_TARGET_TOLERANCE = GHZ_TARGET_TOLERANCE
    CLUSTER_ZERO_TOLERANCE = CLUSTER_ZERO_TOLERANCE
    THEOREM_ENSEMBLES = THEOREM_ENSEMBLES
    THEOREM_GAIN_TOLERANCE = THEOREM_GAIN_TOLERANCE
    THEOREM_CHUNK_SIZE = THEOREM_CHUNK_SIZE

    # Configurações de saída
    AVAILABLE_FORMATS = AVAILABLE_FORMATS
    DEFAULT_FORMAT = DEFAULT_FORMAT
    SIGNIFICANT_DIGITS = SIGNIFICANT_DIGITS
    WORKERS_ENV_VAR = WORKERS_ENV_VAR

    def get_worker_count(self) -> int:
        """
        Retorna o tamanho do pool de workers.

        Lê a variável de ambiente LE_WORKERS; sem ela usa todos os núcleos.

        Returns:
            Número de processos (>= 1)
        """
        raw_value = os.environ.get(self.WORKERS_ENV_VAR, "").strip()
        if raw_value:
            try:
                return max(1, int(raw_value))
            except ValueError:
                print(f"⚠️  {self.WORKERS_ENV_VAR}={raw_value!r} inválido, usando todos os núcleos")
        return max(1, os.cpu_count() or 1)

    def get_output_path(self, file_name: str) -> Path:
        """
        Retorna o caminho completo para um arquivo de resultados.

        Args:
            file_name: Nome do arquivo ou caminho absoluto

        Returns:
            Caminho absoluto do arquivo
        """
        path = Path(file_name)
        if path.is_absolute():
            return path
        return self.OUTPUT_DIR / path


# Instância global da configuração
config = Config()
