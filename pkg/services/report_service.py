"""
Report Service
==============

Serviço para geração das tabelas de resultados (CSV/JSON) e relatórios resumidos.
"""

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import pandas as pd

from config.settings import config
from utils.exceptions import InvariantViolationError, ValidationError
from utils.file_utils import FileUtils


# =============================================================================
# 📦 LINHAS DE RESULTADO
# =============================================================================
@dataclass
class ResultRow:
    """Uma linha por par (i, j) e ponto da varredura."""

    scenario: str
    lam: Optional[float] = None
    i: Optional[int] = None
    j: Optional[int] = None
    distance: Optional[int] = None
    q_xx: Optional[float] = None
    q_yy: Optional[float] = None
    q_zz: Optional[float] = None
    max_correlation: Optional[float] = None
    lower: Optional[float] = None
    le_estimate: Optional[float] = None
    le_method: Optional[str] = None
    upper: Optional[float] = None
    standard_error: Optional[float] = None
    le_entropy: Optional[float] = None
    gap: Optional[float] = None
    xi_e: Optional[float] = None
    decay: Optional[str] = None
    decay_exponent: Optional[float] = None
    mx2_closed_form: Optional[float] = None
    mx2_prefactor: Optional[float] = None
    seed: Optional[int] = None
    note: Optional[str] = None
    error: Optional[str] = None
    wall_time: Optional[float] = None

    def violates_sandwich(self) -> bool:
        """True se lower ≤ le_estimate ≤ upper falhar além da tolerância."""
        if self.error or None in (self.lower, self.le_estimate, self.upper):
            return False
        slack = config.SANDWICH_TOLERANCE + 3.0 * (self.standard_error or 0.0)
        return not self.lower - slack <= self.le_estimate <= self.upper + slack


@dataclass
class TheoremCheckRow:
    """Resumo da verificação do teorema para um ensemble de densidades aleatórias."""

    scenario: str
    ensemble: str
    rank: int
    samples: int
    violations: int
    min_gain: Optional[float] = None
    mean_gain: Optional[float] = None
    inertia_checked: int = 0
    inertia_failures: int = 0
    seed: Optional[int] = None
    error: Optional[str] = None
    wall_time: Optional[float] = None


# =============================================================================
# 📄 SERVIÇO
# =============================================================================
class ReportService:
    """Serviço de geração de relatórios."""

    @staticmethod
    def format_value(value: Any) -> Any:
        """Floats com 12 algarismos significativos; inf/nan como texto."""
        if isinstance(value, bool) or value is None:
            return value
        if isinstance(value, float):
            if math.isinf(value) or math.isnan(value):
                return str(value)
            return float(f"{value:.{config.SIGNIFICANT_DIGITS}g}")
        return value

    @classmethod
    def row_to_dict(cls, row: Any) -> Dict[str, Any]:
        return {key: cls.format_value(value) for key, value in asdict(row).items()}

    @staticmethod
    def check_rows(rows: Sequence[Any]) -> None:
        """
        Recusa linhas que violam a cota lower ≤ LE ≤ upper.

        Raises:
            InvariantViolationError: Na primeira linha violadora
        """
        for row in rows:
            if isinstance(row, ResultRow) and row.violates_sandwich():
                raise InvariantViolationError(
                    f"linha ({row.scenario}, λ={row.lam}, {row.i},{row.j}) viola "
                    f"{row.lower} ≤ {row.le_estimate} ≤ {row.upper}"
                )

    @classmethod
    def to_frame(cls, rows: Sequence[Any]) -> pd.DataFrame:
        """DataFrame com colunas na ordem de declaração da dataclass."""
        if not rows:
            return pd.DataFrame(columns=[f.name for f in fields(ResultRow)])
        columns = [f.name for f in fields(type(rows[0]))]
        return pd.DataFrame([cls.row_to_dict(row) for row in rows], columns=columns)

    @staticmethod
    def _csv_cell(value: Any) -> str:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return ""
        if isinstance(value, float):
            return f"{value:.{config.SIGNIFICANT_DIGITS}g}"
        return str(value)

    @classmethod
    def write_csv(cls, rows: Sequence[Any], run_config: Dict[str, Any], output_file: Path) -> Path:
        """Cabeçalho com a configuração efetiva em linhas '#', depois a tabela."""
        frame = cls.to_frame(rows).astype(object)
        frame = frame.apply(lambda column: column.map(cls._csv_cell))
        FileUtils.ensure_parent_exists(output_file)
        with open(output_file, "w", encoding="utf-8", newline="") as f:
            for key in sorted(run_config):
                f.write(f"# {key}={json.dumps(run_config[key], sort_keys=True)}\n")
            frame.to_csv(f, index=False)
        return Path(output_file)

    @classmethod
    def write_json(cls, rows: Sequence[Any], run_config: Dict[str, Any], output_file: Path) -> Path:
        """Objeto {"config": ..., "rows": [...]}."""
        document = {
            "config": run_config,
            "rows": [cls.row_to_dict(row) for row in rows],
        }
        FileUtils.ensure_parent_exists(output_file)
        with open(output_file, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, ensure_ascii=False, sort_keys=False)
            f.write("\n")
        return Path(output_file)

    @classmethod
    def write(cls, rows: Sequence[Any], run_config: Dict[str, Any], output_file: Path,
              output_format: str = config.DEFAULT_FORMAT) -> Path:
        """
        Verifica as linhas e grava no formato pedido.

        Args:
            rows: Linhas de resultado
            run_config: Configuração efetiva (ecoada no cabeçalho)
            output_file: Caminho de saída
            output_format: "csv" ou "json"

        Returns:
            Caminho gravado
        """
        if output_format not in config.AVAILABLE_FORMATS:
            raise ValidationError("format", f"formato {output_format!r} inválido, use {config.AVAILABLE_FORMATS}")
        cls.check_rows(rows)
        if output_format == "json":
            return cls.write_json(rows, run_config, output_file)
        return cls.write_csv(rows, run_config, output_file)

    @staticmethod
    def generate_summary_report(rows: Sequence[Any]) -> Dict[str, Any]:
        """Gera relatório resumido dos resultados."""
        total_rows = len(rows)
        failed_rows = [row for row in rows if getattr(row, "error", None)]
        pair_rows = [row for row in rows if isinstance(row, ResultRow) and not row.error and row.le_estimate is not None]

        methods: Dict[str, int] = {}
        for row in pair_rows:
            methods[row.le_method] = methods.get(row.le_method, 0) + 1

        gaps = [row.le_estimate - row.lower for row in pair_rows if row.lower is not None]
        summary = {
            'total_rows': total_rows,
            'successful_rows': total_rows - len(failed_rows),
            'failed_rows': len(failed_rows),
            'methods_used': methods,
            'max_le_minus_lower': max(gaps) if gaps else None,
            'min_le': min((row.le_estimate for row in pair_rows), default=None),
            'max_le': max((row.le_estimate for row in pair_rows), default=None),
        }
        return summary

    @staticmethod
    def print_summary(summary: Dict[str, Any]):
        print("\n📊 RESUMO:")
        print(f"   📄 Linhas: {summary['successful_rows']}/{summary['total_rows']}")
        if summary['failed_rows']:
            print(f"   ❌ Linhas com erro: {summary['failed_rows']}")
        if summary['methods_used']:
            methods = ", ".join(f"{name}={count}" for name, count in sorted(summary['methods_used'].items()))
            print(f"   🧮 Métodos: {methods}")
        if summary['max_le_minus_lower'] is not None:
            print(f"   📏 Maior LE − cota inferior: {summary['max_le_minus_lower']:.3e}")
