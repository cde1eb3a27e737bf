import json

import numpy as np
import pytest

from lpsubspace import Dataset, Subspace
from lpsubspace.cli import cli
from conftest import line_at, two_line_model


@pytest.fixture
def model_json(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(two_line_model().to_json_dict()))
    return str(path)


@pytest.fixture
def data_csv(tmp_path):
    rng = np.random.default_rng(0)
    pts = np.vstack([np.stack([rng.uniform(-1, 1, 30), np.zeros(30)], axis=1),
                     rng.uniform(-1, 1, size=(10, 2))])
    path = tmp_path / "data.csv"
    Dataset(pts).to_csv(path)
    return str(path)


@pytest.fixture
def basis_csv(tmp_path):
    path = tmp_path / "basis.csv"
    line_at(0.0).to_csv(path)
    return str(path)


def test_gen_deterministic(model_json, tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert cli(["gen", "--config", model_json, "--n", "100", "--seed", "1",
                "--out", str(out1)]) == 0
    assert cli(["gen", "--config", model_json, "--n", "100", "--seed", "1",
                "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header = out1.read_text().splitlines()[0]
    assert header == "x0,x1,label"
    # different seed differs
    out3 = tmp_path / "c.csv"
    cli(["gen", "--config", model_json, "--n", "100", "--seed", "2", "--out", str(out3)])
    assert out1.read_bytes() != out3.read_bytes()


def test_gen_stdout_and_json(model_json, capsys):
    assert cli(["gen", "--config", model_json, "--n", "5", "--seed", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x0,x1,label"
    assert len(lines) == 6
    assert cli(["gen", "--config", model_json, "--n", "5", "--seed", "1",
                "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["points"]) == 5


def test_energy_prints_zero_for_on_subspace_data(tmp_path, basis_csv, capsys):
    data = Dataset(np.array([[1.0, 0.0], [-2.0, 0.0]]))
    data_path = tmp_path / "on.csv"
    data.to_csv(data_path)
    assert cli(["energy", "--data", str(data_path), "--subspace", basis_csv,
                "--p", "1"]) == 0
    assert float(capsys.readouterr().out.strip()) == 0.0


def test_energy_json_format(data_csv, basis_csv, capsys):
    assert cli(["energy", "--data", data_csv, "--subspace", basis_csv, "--p", "1.5",
                "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["energy"] > 0


def test_certify_json_output(data_csv, basis_csv, capsys):
    assert cli(["certify", "--data", data_csv, "--subspace", basis_csv,
                "--p", "1", "--seed", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload) == {"verdict", "margin", "witness", "samples_used"}
    assert cli(["certify", "--data", data_csv, "--subspace", basis_csv,
                "--p", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] in ("NecessaryConditionHolds", "NecessaryConditionFails")
    assert cli(["certify", "--data", data_csv, "--subspace", basis_csv,
                "--p", "0.5"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] in ("CertifiedLocalMin", "Inconclusive")


def test_minimize_outputs(data_csv, tmp_path, capsys):
    basis_out = tmp_path / "best.csv"
    assert cli(["minimize", "--data", data_csv, "--d", "1", "--p", "1",
                "--restarts", "10", "--seed", "4",
                "--basis-out", str(basis_out)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["energy"] > 0
    best = Subspace.from_csv(basis_out)
    assert np.allclose(best.basis, np.asarray(payload["basis"]), atol=1e-15)
    # descent trace is monotone
    energies = [t["energy"] for t in payload["trace"]]
    assert all(b < a for a, b in zip(energies, energies[1:]))


def test_bounds_json(capsys):
    assert cli(["bounds", "--p", "1", "--d", "1", "--k", "2", "--alpha0", "0.3",
                "--alpha1", "0.5", "--eps", "0.01"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["xi1"] == pytest.approx(0.5)
    assert payload["f"] == pytest.approx(np.pi * 0.5 * 0.01 / 0.075)


def test_experiment_csv(tmp_path, capsys):
    model = two_line_model()
    spec = {
        "kind": "recovery",
        "model": model.to_json_dict(),
        "n_grid": [30],
        "p_grid": [1.0],
        "eps_grid": [0.0],
        "trials": 3,
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    out = tmp_path / "results.csv"
    assert cli(["experiment", "--spec", str(spec_path), "--seed", "5",
                "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "p,eps,n,trial,seed,distance,energy,success,runtime_ms"
    assert len(lines) == 4
    summary = capsys.readouterr().out.strip().splitlines()
    assert summary[0].startswith("p,eps,n,trials,successes")


def test_unknown_flag_exits_1(capsys):
    assert cli(["energy", "--nope"]) == 1
    err = capsys.readouterr().err
    assert "usage" in err.lower()
    assert cli(["not-a-command"]) == 1


def test_numeric_error_exits_2(tmp_path, data_csv, basis_csv, capsys):
    # p <= 0 is a parameter domain error
    assert cli(["energy", "--data", data_csv, "--subspace", basis_csv,
                "--p", "-1"]) == 2
    assert "error" in capsys.readouterr().err
    # mismatched dimensions
    b3 = tmp_path / "b3.csv"
    from lpsubspace import random_subspace

    random_subspace(3, 1, 0).to_csv(b3)
    assert cli(["energy", "--data", data_csv, "--subspace", str(b3), "--p", "1"]) == 2


def test_missing_file_exits_1(capsys):
    assert cli(["energy", "--data", "/nonexistent.csv", "--subspace", "/nope.csv",
                "--p", "1"]) == 1


def test_threads_default_from_env(monkeypatch, tmp_path, capsys):
    import json as _json

    monkeypatch.setenv("HLM_THREADS", "2")
    spec = {
        "kind": "recovery",
        "model": two_line_model().to_json_dict(),
        "n_grid": [20],
        "p_grid": [1.0],
        "eps_grid": [0.0],
        "trials": 2,
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(_json.dumps(spec))
    assert cli(["experiment", "--spec", str(spec_path), "--seed", "1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("p,eps,n,trial")
