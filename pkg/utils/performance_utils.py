"""
Performance Utilities
=====================

Utilitários para medição de performance.
"""

import time
from typing import Any, Callable, Dict, Sequence, Tuple


class PerformanceUtils:
    """Utilitários de performance."""

    @staticmethod
    def timed(function: Callable, *args, **kwargs) -> Tuple[Any, float]:
        """
        Executa `function` e mede o tempo de parede.

        Returns:
            (resultado, segundos)
        """
        start_time = time.perf_counter()
        result = function(*args, **kwargs)
        return result, time.perf_counter() - start_time

    @staticmethod
    def calculate_performance_metrics(rows: Sequence[Any], total_time: float) -> Dict[str, float]:
        """
        Calcula métricas de performance de uma execução.

        Args:
            rows: Linhas de resultado emitidas
            total_time: Tempo total de processamento

        Returns:
            Dicionário com métricas de performance
        """
        total_rows = len(rows)
        failed_rows = sum(1 for row in rows if getattr(row, "error", None))

        return {
            'total_time': total_time,
            'rows_per_second': total_rows / total_time if total_time > 0 else 0,
            'average_time_per_row': total_time / total_rows if total_rows > 0 else 0,
            'total_rows': total_rows,
            'failed_rows': failed_rows,
        }
