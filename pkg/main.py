#!/usr/bin/env python3
"""
Localizable Entanglement - CLI
==============================

Executa os cenários (GHZ, cluster, varredura de Ising, verificação do teorema
e cotas de um estado em arquivo) e grava as tabelas de resultados em CSV ou JSON.

Códigos de saída: 0 sucesso, 1 validação, 2 invariante violada, 3 falha do solver.
"""

import argparse
import sys
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from config.settings import config
from controller.experiment_controller import SCENARIOS, ExperimentController, RunConfig
from utils.exceptions import LocalizableEntanglementError, ValidationError
from utils.file_utils import FileUtils


class CliParser(argparse.ArgumentParser):
    """ArgumentParser que converte erros de uso em ValidationError (código 1)."""

    def error(self, message):
        raise ValidationError("args", message)


# =============================================================================
# 🔤 CONVERSORES DE ARGUMENTOS
# =============================================================================
def parse_pair(text: str) -> Tuple[int, int]:
    """'i,j' → (i, j)."""
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ValidationError("pair", f"esperado 'i,j', recebido {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as e:
        raise ValidationError("pair", f"índices inválidos em {text!r}") from e


def parse_lambda_grid(text: str) -> Tuple[float, ...]:
    """
    'start:stop:step' (stop incluso) ou lista 'a,b,c'.

    Returns:
        Tupla de valores de λ em ordem
    """
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0:
                raise ValidationError("lambda_grid", "o passo deve ser positivo")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            if count < 1:
                raise ValidationError("lambda_grid", f"grade vazia: {text!r}")
            return tuple(round(start + k * step, 12) for k in range(count))
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError("lambda_grid", f"grade inválida: {text!r}") from e


def parse_distances(text: str) -> Tuple[int, ...]:
    """'1,2,3' ou intervalo '1:6' (inclusivo)."""
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop = (int(part) for part in text.split(":"))
            return tuple(range(start, stop + 1))
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ValidationError("distances", f"distâncias inválidas: {text!r}") from e


# =============================================================================
# 🧰 PARSER
# =============================================================================
def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--n", type=int, help="número de qubits")
    common.add_argument("--pair", type=str, help="par alvo 'i,j'")
    common.add_argument("--lambda-grid", dest="lambda_grid", type=str, help="'start:stop:step' ou 'a,b,c'")
    common.add_argument("--distances", type=str, help="'1,2,3' ou '1:6'")
    common.add_argument("--epsilon-x", dest="epsilon_x", type=float, help="campo de perturbação em x")
    common.add_argument("--periodic", action="store_true", default=None, help="contorno periódico")
    common.add_argument("--method", choices=config.AVAILABLE_METHODS, help="método de estimativa da LE")
    common.add_argument("--grid", type=int, help="resolução K do oráculo em grade")
    common.add_argument("--samples", type=int, help="amostras (sampled / theorem-check)")
    common.add_argument("--seed", type=int, help="semente")
    common.add_argument("--out", type=str, help="arquivo de saída")
    common.add_argument("--format", dest="format", choices=config.AVAILABLE_FORMATS, help="formato de saída")
    common.add_argument("--config", type=str, help="arquivo JSON de configuração")
    common.add_argument("--timings", action="store_true", default=None, help="inclui a coluna wall_time")
    common.add_argument("--state", type=str, help="arquivo de estado (bounds)")
    common.add_argument("--pairs", nargs="+", type=str, help="pares 'i,j' (bounds; padrão: todos)")
    common.add_argument("--ensembles", nargs="+", choices=list(config.THEOREM_ENSEMBLES), help="ensembles do theorem-check")
    common.add_argument("--fit-length", dest="fit_length", action="store_true", default=None,
                        help="ajusta ξ_E por λ (ising-sweep)")

    parser = CliParser(prog="main.py", description="Localizable entanglement: cotas, estimativas e varreduras")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in SCENARIOS:
        subparsers.add_parser(name, parents=[common])
    return parser


# Chave do arquivo/flag → campo de RunConfig e conversor
FIELD_MAP = {
    "n": ("n", int),
    "pair": ("pair", parse_pair),
    "lambda_grid": ("lambdas", parse_lambda_grid),
    "distances": ("distances", parse_distances),
    "epsilon_x": ("epsilon_x", float),
    "periodic": ("periodic", bool),
    "method": ("method", str),
    "grid": ("grid", int),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "out": ("output_path", str),
    "format": ("output_format", str),
    "timings": ("timings", bool),
    "state": ("state_path", str),
    "pairs": ("pairs", lambda value: tuple(parse_pair(p) if isinstance(p, str) else tuple(p) for p in value)),
    "ensembles": ("ensembles", tuple),
    "fit_length": ("fit_length", bool),
}


def _convert(key: str, value: Any) -> Tuple[str, Any]:
    target, converter = FIELD_MAP[key]
    if key in ("lambda_grid", "distances") and isinstance(value, (list, tuple)):
        value = ",".join(str(v) for v in value)
    if key == "pair" and isinstance(value, (list, tuple)):
        value = ",".join(str(v) for v in value)
    try:
        return target, converter(value)
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(key, f"valor inválido {value!r}") from e


def build_run_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Monta a RunConfig com precedência flags > arquivo --config > padrões.

    Raises:
        ValidationError: Argumentos, arquivo ou valores inválidos
    """
    args = build_parser().parse_args(argv)
    values: Dict[str, Any] = {}

    if args.config:
        document = FileUtils.read_json(args.config)
        unknown = sorted(set(document) - set(FIELD_MAP))
        if unknown:
            raise ValidationError("config", f"chaves desconhecidas {unknown}")
        for key, value in document.items():
            target, converted = _convert(key, value)
            values[target] = converted

    for key in FIELD_MAP:
        value = getattr(args, key, None)
        if value is not None:
            target, converted = _convert(key, value)
            values[target] = converted

    return RunConfig(scenario=args.command, **values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Ponto de entrada da CLI; retorna o código de saída."""
    print("⚛️  LOCALIZABLE ENTANGLEMENT")
    print("=" * 40)
    try:
        run_config = build_run_config(argv)
        controller = ExperimentController(run_config)
        outcome = controller.run()
        controller.save(outcome)
    except LocalizableEntanglementError as e:
        print(f"❌ {type(e).__name__}: {e}")
        return e.exit_code

    if outcome.exit_code:
        print(f"❌ Processo concluído com código {outcome.exit_code}")
    else:
        print("\n✅ Processo concluído!")
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
