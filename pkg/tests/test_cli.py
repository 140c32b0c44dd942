import csv
import json
import subprocess
import sys

import pytest

from dynkin.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def neq(tmp_path):
    path = tmp_path / "neq.json"
    assert run("example", "four-state-neq", "--arithmetic", "rational", "--out", path) == 0
    return path


def test_solve_recipe_writes_outputs(tmp_path):
    out = tmp_path / "o"
    assert run("solve", "--recipe", "birth-death-1", "--out", out) == 0
    sol = json.loads((out / "solution.json").read_text())
    assert sol["outer_iterations"] == 3
    rows = list(csv.reader((out / "values.csv").open()))
    assert rows[0] == ["state", "psi", "phi", "V0", "V1", "V2", "V3", "V"]
    assert len(rows) == 51
    trace = json.loads((out / "trace.json").read_text())
    assert [r["k"] for r in trace["outer"]] == [1, 2, 3]


def test_solve_lattice_terminates_at_v4(tmp_path):
    assert run("solve", "--recipe", "lattice-2", "--out", tmp_path) == 0
    assert json.loads((tmp_path / "solution.json").read_text())["outer_iterations"] == 4


def test_solve_single_state(tmp_path):
    spec = tmp_path / "one.json"
    spec.write_text(json.dumps({"states": ["s"], "generator": [[0]], "beta": 1, "psi": [1], "phi": [2]}))
    assert run("solve", spec, "--out", tmp_path / "o") == 0


def test_solve_is_byte_deterministic(tmp_path, neq):
    for d in ("a", "b"):
        assert run("solve", neq, "--out", tmp_path / d) == 0
    for f in ("solution.json", "trace.json", "values.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_rational_solution_uses_fractions(tmp_path, neq):
    assert run("solve", neq, "--out", tmp_path / "o") == 0
    sol = json.loads((tmp_path / "o" / "solution.json").read_text())
    assert sol["value"] == ["5", "7", "60/11", "5"]
    assert sol["inf_stop"] == ["0", "3"]
    assert run("solve", neq, "--mode", "weak", "--out", tmp_path / "w") == 0
    assert json.loads((tmp_path / "w" / "solution.json").read_text())["inf_stop"] == ["0", "2", "3"]


def test_verify_round_trip_and_perturbation(tmp_path):
    out = tmp_path / "o"
    assert run("solve", "--recipe", "four-state-equal", "--out", out) == 0
    spec = out / "spec.json"
    assert run("verify", spec, "--solution", out / "solution.json") == 0
    sol = json.loads((out / "solution.json").read_text())
    sol["value"][1] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(sol))
    assert run("verify", spec, "--solution", bad) == 4
    sol = json.loads((out / "solution.json").read_text())
    sol["inf_stop"] = sol["sup_stop"]
    bad.write_text(json.dumps(sol))
    assert run("verify", spec, "--solution", bad) == 4


def test_oracle_compare(capsys, neq):
    assert run("oracle", neq, "--compare") == 0
    out = capsys.readouterr().out
    assert "S_inf={0,3}, weak S_inf={0,2,3}" in out and "values equal" in out
    assert run("oracle", "--recipe", "four-state-equal", "--compare") == 0
    assert "S_inf = weak S_inf = {3}" in capsys.readouterr().out


def test_oracle_gap_exit_code(tmp_path, monkeypatch):
    import dynkin.cli as cli

    monkeypatch.setattr(cli, "value_iteration", lambda spec, tol: spec.psi + 1.0)
    assert run("oracle", "--recipe", "birth-death-1") == 5


def test_simulate(capsys, neq):
    assert run("simulate", neq, "--B", "1", "--C", "0,3", "--x", "2", "--paths", 200000, "--seed", 42) == 0
    first = capsys.readouterr().out
    run("simulate", neq, "--B", "1", "--C", "0,3", "--x", "2", "--paths", 200000, "--seed", 42)
    assert capsys.readouterr().out == first
    assert run("simulate", neq, "--B", "2", "--x", "2") == 0
    assert "stderr: 0.0" in capsys.readouterr().out
    # truncation dominates: estimate 0, covered by the bias bound, flagged
    assert run("simulate", neq, "--B", "1", "--C", "0,3", "--x", "2", "--horizon", 1e-6, "--paths", 1000) == 0
    assert "every path hit the horizon" in capsys.readouterr().out


def test_simulate_discrepancy_exit_code(monkeypatch, neq):
    import dynkin.cli as cli

    monkeypatch.setattr(cli, "hitting_payoff", lambda spec, B, C: spec.phi * 0 + 100.0)
    assert run("simulate", neq, "--B", "1", "--C", "0,3", "--x", "2", "--paths", 1000) == 6


def test_error_exit_codes(tmp_path):
    assert run("solve", tmp_path / "missing.json") == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    assert run("solve", broken) == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"states": ["a"], "generator": [[0]], "beta": 1, "psi": [2], "phi": [1]}))
    assert run("solve", bad) == 2
    overlap = tmp_path / "ok.json"
    overlap.write_text(json.dumps({"states": ["a", "b"], "generator": [[-1, 1], [1, -1]],
                                   "beta": 1, "psi": [1, 1], "phi": [2, 2]}))
    assert run("simulate", overlap, "--B", "a", "--C", "a", "--x", "b") == 2


def test_overflow_exit_code(monkeypatch, tmp_path):
    import dynkin.cli as cli
    from dynkin.errors import IterationOverflow

    def boom(spec, mode):
        raise IterationOverflow("forced")

    monkeypatch.setattr(cli, "solve_game", boom)
    assert run("solve", "--recipe", "four-state-equal", "--out", tmp_path) == 3


def test_example_families(tmp_path):
    for fam in ("birth-death", "lattice", "four-state-equal", "birth-death-3"):
        path = tmp_path / f"{fam}.json"
        assert run("example", fam, "--out", path) == 0
        assert run("solve", path, "--out", tmp_path / fam) == 0


def test_console_script_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "dynkin.cli", "example", "four-state-equal"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["psi"] == [10.0, 4.0, 2.0, 1.0]
