import json

import pytest

from main import build_run_config, main, parse_distances, parse_lambda_grid, parse_pair
from utils.exceptions import ValidationError


# -----------------------------------------------------------------------------
# Conversores
# -----------------------------------------------------------------------------
def test_parse_pair():
    assert parse_pair("2,5") == (2, 5)
    with pytest.raises(ValidationError):
        parse_pair("2")
    with pytest.raises(ValidationError):
        parse_pair("a,b")


@pytest.mark.parametrize("text, expected", [
    ("0.5:1.5:0.5", (0.5, 1.0, 1.5)),
    ("0.1:0.3:0.1", (0.1, 0.2, 0.3)),
    ("1,2.5", (1.0, 2.5)),
    ("0.7", (0.7,)),
])
def test_parse_lambda_grid(text, expected):
    assert parse_lambda_grid(text) == expected


@pytest.mark.parametrize("text", ["1:0:0", "2:1:0.5", "a:b:c", "1,x"])
def test_parse_lambda_grid_rejects_bad_grids(text):
    with pytest.raises(ValidationError):
        parse_lambda_grid(text)


def test_parse_distances():
    assert parse_distances("1:4") == (1, 2, 3, 4)
    assert parse_distances("1,3") == (1, 3)
    with pytest.raises(ValidationError):
        parse_distances("x")


# -----------------------------------------------------------------------------
# Configuração efetiva
# -----------------------------------------------------------------------------
def test_flags_build_run_config():
    run_config = build_run_config(["ghz", "--n", "5", "--pair", "1,3", "--method", "oracle", "--grid", "4"])
    assert run_config.scenario == "ghz"
    assert run_config.n == 5
    assert run_config.pair == (1, 3)
    assert run_config.method == "oracle"
    assert run_config.periodic is False


def test_flags_override_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"n": 6, "seed": 4, "lambda_grid": [0.5, 1.0], "periodic": True}), encoding="utf-8")
    run_config = build_run_config(["ising-sweep", "--config", str(path), "--n", "7"])
    assert run_config.n == 7
    assert run_config.seed == 4
    assert run_config.lambdas == (0.5, 1.0)
    assert run_config.periodic is True


def test_config_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"qubits": 6}), encoding="utf-8")
    with pytest.raises(ValidationError) as info:
        build_run_config(["ghz", "--config", str(path)])
    assert info.value.field == "config"


def test_list_flags():
    run_config = build_run_config(["theorem-check", "--ensembles", "pure", "rank2", "--samples", "5"])
    assert run_config.ensembles == ("pure", "rank2")
    run_config = build_run_config(["bounds", "--state", "s.txt", "--pairs", "0,1", "2,3"])
    assert run_config.pairs == ((0, 1), (2, 3))


# -----------------------------------------------------------------------------
# Códigos de saída
# -----------------------------------------------------------------------------
@pytest.mark.parametrize("argv", [[], ["ghz", "--bogus"], ["ghz", "--method", "greedy"], ["ghz", "--n", "x"]])
def test_usage_errors_exit_with_one(argv):
    assert main(argv) == 1


def test_ghz_with_two_qubits_exits_with_one(tmp_path):
    assert main(["ghz", "--n", "2", "--out", str(tmp_path / "ghz.csv")]) == 1
    assert not (tmp_path / "ghz.csv").exists()


def test_missing_state_file_exits_with_one(tmp_path):
    assert main(["bounds", "--state", str(tmp_path / "missing.txt")]) == 1


def test_successful_run_writes_csv(tmp_path, serial_workers):
    target = tmp_path / "ghz.csv"
    assert main(["ghz", "--n", "4", "--out", str(target)]) == 0
    lines = target.read_text(encoding="utf-8").splitlines()
    assert '# scenario="ghz"' in lines
    assert any(line.startswith("scenario,lam,i,j") for line in lines)


def test_successful_run_writes_json(tmp_path, serial_workers):
    target = tmp_path / "cluster.json"
    assert main(["cluster", "--n", "5", "--format", "json", "--out", str(target)]) == 0
    document = json.loads(target.read_text(encoding="utf-8"))
    assert document["config"]["scenario"] == "cluster"
    assert document["rows"][0]["le_estimate"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("argv", [
    ["ising-sweep", "--n", "5", "--lambda-grid", "0.5,1.5", "--distances", "1,2", "--fit-length"],
    ["theorem-check", "--samples", "20", "--seed", "5"],
    ["ghz", "--n", "5", "--method", "sampled", "--samples", "50", "--seed", "3", "--format", "json"],
])
def test_repeated_runs_are_byte_identical(tmp_path, serial_workers, argv):
    first, second = tmp_path / "first.out", tmp_path / "second.out"
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
