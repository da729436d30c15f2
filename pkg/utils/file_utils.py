"""
File Utilities
==============

Utilitários para manipulação de arquivos e diretórios.
"""

import json
from pathlib import Path
from typing import Any, Dict

from utils.exceptions import ValidationError


class FileUtils:
    """Utilitários para arquivos."""

    @staticmethod
    def ensure_parent_exists(file_path: str) -> Path:
        """Cria o diretório pai de um arquivo de saída, se necessário."""
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    @staticmethod
    def read_json(file_path: str) -> Dict[str, Any]:
        """
        Lê um documento JSON (arquivo de configuração ou especificação).

        Args:
            file_path: Caminho do arquivo

        Returns:
            Dicionário com o conteúdo

        Raises:
            ValidationError: Se o arquivo não existir ou não for JSON válido
        """
        path = Path(file_path)
        if not path.exists():
            raise ValidationError("config", f"arquivo não encontrado: {file_path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError("config", f"JSON inválido em {file_path}: {e}") from e
        if not isinstance(document, dict):
            raise ValidationError("config", "o documento deve ser um objeto JSON")
        return document

