"""
Exceptions
==========

Hierarquia de erros do sistema; cada classe carrega o código de saída da CLI.
"""


class LocalizableEntanglementError(Exception):
    """Erro base do sistema."""

    exit_code = 1


class ValidationError(LocalizableEntanglementError, ValueError):
    """Entrada ou configuração inválida (código 1)."""

    exit_code = 1

    def __init__(self, field: str, message: str):
        """
        Args:
            field: Nome do campo ou parâmetro inválido
            message: Descrição do problema
        """
        self.field = field
        super().__init__(f"{field}: {message}")


class InvariantViolationError(LocalizableEntanglementError):
    """Uma invariante numérica foi violada (código 2)."""

    exit_code = 2


class SolverError(LocalizableEntanglementError):
    """Falha do solver de autovalores ou do otimizador (código 3)."""

    exit_code = 3
