"""
State Controller
================

Controlador para leitura, validação e gravação de arquivos de estado usados pelo comando `bounds`.

Formato: texto puro, primeira linha com o número de qubits n, seguida de 2^n
linhas "re im" com as amplitudes na ordem big-endian (sítio 0 = bit mais significativo).
"""

from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import config
from services.hamiltonian_service import parity_sectors
from services.state_service import PureState
from utils.exceptions import ValidationError
from utils.file_utils import FileUtils


# Desvio de norma abaixo do qual o estado é renormalizado com aviso
RENORMALIZE_TOLERANCE = 1e-6


class StateController:
    """Controlador para arquivos de estado puro."""

    def __init__(self, renormalize_tolerance: float = RENORMALIZE_TOLERANCE):
        """
        Inicializa o controlador.

        Args:
            renormalize_tolerance: Desvio máximo de Σ|a|² aceito com renormalização
        """
        self.renormalize_tolerance = renormalize_tolerance

    def load_state(self, state_path: str) -> PureState:
        """
        Lê um estado puro de um arquivo texto.

        Args:
            state_path: Caminho do arquivo

        Returns:
            PureState validado

        Raises:
            ValidationError: Arquivo ausente, mal formado ou muito longe da normalização
        """
        path = Path(state_path)
        if not path.exists():
            raise ValidationError("state", f"arquivo não encontrado: {state_path}")

        lines = [line.strip() for line in path.read_text(encoding="utf-8").splitlines()]
        lines = [line for line in lines if line and not line.startswith("#")]
        if not lines:
            raise ValidationError("state", "arquivo de estado vazio")

        try:
            n_qubits = int(lines[0])
        except ValueError as e:
            raise ValidationError("state", f"primeira linha deve ser o número de qubits, recebido {lines[0]!r}") from e
        if not 1 <= n_qubits <= config.MAX_QUBITS:
            raise ValidationError("n_qubits", f"deve estar entre 1 e {config.MAX_QUBITS}, recebido {n_qubits}")

        expected = 2 ** n_qubits
        rows = lines[1:]
        if len(rows) != expected:
            raise ValidationError("state", f"esperadas {expected} linhas de amplitude, encontradas {len(rows)}")

        amplitudes = np.empty(expected, dtype=complex)
        for index, row in enumerate(rows):
            amplitudes[index] = self._parse_amplitude(row, index)

        return self._normalize(n_qubits, amplitudes)

    @staticmethod
    def _parse_amplitude(row: str, index: int) -> complex:
        parts = row.split()
        if len(parts) != 2:
            raise ValidationError("state", f"linha {index + 2}: esperado 're im', recebido {row!r}")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError as e:
            raise ValidationError("state", f"linha {index + 2}: número inválido em {row!r}") from e

    def _normalize(self, n_qubits: int, amplitudes: np.ndarray) -> PureState:
        norm = float(np.vdot(amplitudes, amplitudes).real)
        deviation = abs(norm - 1.0)
        if deviation > self.renormalize_tolerance:
            raise ValidationError("state", f"estado não normalizado (Σ|a|² = {norm:.12g})")
        if deviation > config.NORM_TOLERANCE:
            print(f"⚠️  Renormalizando estado (Σ|a|² = {norm:.12g})")
            amplitudes = amplitudes / np.sqrt(norm)
        return PureState(n_qubits, amplitudes)

    @staticmethod
    def save_state(state: PureState, state_path: str) -> Path:
        """
        Grava um estado no formato de arquivo de estado.

        Args:
            state: Estado puro
            state_path: Caminho de saída

        Returns:
            Caminho gravado
        """
        path = FileUtils.ensure_parent_exists(state_path)
        lines = [str(state.n_qubits)]
        lines += [f"{a.real:.17g} {a.imag:.17g}" for a in state.amplitudes]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    @staticmethod
    def validate_pairs(n_qubits: int, pairs: Optional[Sequence[Tuple[int, int]]] = None) -> List[Tuple[int, int]]:
        """
        Valida os pares pedidos; sem pares retorna todos os i < j.

        Args:
            n_qubits: Número de qubits do estado
            pairs: Pares (i, j) ou None

        Returns:
            Lista de pares válidos, na ordem pedida
        """
        if n_qubits < 2:
            raise ValidationError("n_qubits", "são necessários pelo menos 2 qubits para formar um par")
        if not pairs:
            return list(combinations(range(n_qubits), 2))

        valid_pairs = []
        for i, j in pairs:
            if not (0 <= i < n_qubits and 0 <= j < n_qubits):
                raise ValidationError("pair", f"par ({i},{j}) fora de [0, {n_qubits - 1}]")
            if i == j:
                raise ValidationError("pair", f"par ({i},{j}) com sítios repetidos")
            valid_pairs.append((int(i), int(j)))
        return valid_pairs

    @staticmethod
    def has_definite_parity(state: PureState) -> bool:
        """True se o estado vive inteiramente num setor de paridade ⊗σz."""
        even, odd = parity_sectors(state.n_qubits)
        weights = np.abs(state.amplitudes) ** 2
        return min(float(np.sum(weights[even])), float(np.sum(weights[odd]))) < config.NULL_BRANCH_PROBABILITY

    @staticmethod
    def describe_state(state: PureState) -> Dict[str, Any]:
        """Resumo do estado carregado."""
        probabilities = np.abs(state.amplitudes) ** 2
        return {
            'n_qubits': state.n_qubits,
            'dimension': state.amplitudes.size,
            'nonzero_amplitudes': int(np.sum(probabilities > config.NULL_BRANCH_PROBABILITY)),
            'largest_probability': float(np.max(probabilities)),
        }

    def print_state_report(self, state: PureState):
        report = self.describe_state(state)
        print("\n📋 ESTADO CARREGADO:")
        print(f"   🔢 Qubits: {report['n_qubits']} (dimensão {report['dimension']})")
        print(f"   🧮 Amplitudes não nulas: {report['nonzero_amplitudes']}")
        print(f"   📈 Maior probabilidade: {report['largest_probability']:.6f}")
