import csv
import io
import json
import math
import shutil
import subprocess
import sys

import pytest

from bellsim import cli
from bellsim.comparison import coherent_alpha_for, coherent_ps, ps_grice, ps_ours
from bellsim.loss import bm_success_prob_lossy, gate_teleport_success_prob


def run(*argv):
    return cli.run([str(a) for a in argv])


def _csv_rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_fmt_and_rounding():
    assert cli.fmt(1 / 3) == "0.333333333"
    assert cli.fmt(True) == "true"
    assert cli.fmt(7) == "7"
    assert cli._round({"a": [0.1 + 0.2, float("nan")]}) == {"a": [0.3, None]}


def test_bs_table(tmp_path):
    out = tmp_path / "bs.json"
    assert run("bs-table", "--out", out) == 0
    data = json.loads(out.read_text())
    assert list(data)[0] == "config"
    assert data["success"] == {"PhiPlus": 0.0, "PhiMinus": 1.0, "PsiPlus": 0.0, "PsiMinus": 1.0}


def test_bs_table_other_target(tmp_path):
    out = tmp_path / "bs.json"
    assert run("bs-table", "--target", "PhiPlus", "PsiPlus", "--out", out) == 0
    assert json.loads(out.read_text())["success"]["PhiPlus"] == 1.0
    assert run("bs-table", "--target", "PhiPlus", "PhiMinus", "--out", out) == 2


def test_logical_bm_json_and_csv(tmp_path):
    js, cs = tmp_path / "a.json", tmp_path / "a.csv"
    assert run("logical-bm", "--n", 1, 2, 8, "--trials", 20000, "--seed", 1, "--out", js) == 0
    rows = json.loads(js.read_text())["results"]
    assert [r["exact"] for r in rows] == [0.5, 0.75, 0.99609375]
    assert run("logical-bm", "--n", 2, "--trials", 20000, "--seed", 1, "--format", "csv", "--out", cs) == 0
    (row,) = _csv_rows(cs)
    assert float(row["exact"]) == 0.75
    assert cli.read_config(cs)["n"] == [2]


def test_logical_bm_bounds():
    assert run("logical-bm", "--n", 21, "--seed", 1) == 2
    assert run("logical-bm", "--n", 2, "--trials", 0, "--seed", 1) == 2


def test_loss_sweep(tmp_path):
    out = tmp_path / "loss.csv"
    assert run("loss-sweep", "--n", 1, 4, "--eta-step", 0.25, "--trials", 5000, "--seed", 3, "--out", out) == 0
    rows = _csv_rows(out)
    assert len(rows) == 2 * 5
    for r in rows:
        assert float(r["p_closed"]) == pytest.approx(bm_success_prob_lossy(int(r["N"]), float(r["eta"])), rel=1e-8)
    assert run("loss-sweep", "--kind", "gate", "--n", 2, "--eta-step", 0.5, "--trials", 100,
               "--seed", 3, "--out", out) == 0
    for r in _csv_rows(out):
        assert float(r["p_closed"]) == pytest.approx(gate_teleport_success_prob(2, float(r["eta"])), rel=1e-8)


def test_loss_sweep_rejects_bad_grids():
    assert run("loss-sweep", "--eta-end", 1.5, "--seed", 1) == 2
    assert run("loss-sweep", "--eta-step", 0, "--seed", 1) == 2
    assert run("loss-sweep", "--eta-start", 0.5, "--eta-end", 0.2, "--seed", 1) == 2


def test_teleport(tmp_path):
    out = tmp_path / "t.json"
    assert run("teleport", "--n", 4, "--trials", 20000, "--samples", 50, "--seed", 2, "--out", out) == 0
    data = json.loads(out.read_text())
    assert data["closed_form"] == 0.9375
    assert data["samples"]["min_fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert sum(data["samples"]["outcomes"].values()) == 50


@pytest.mark.parametrize("kind", ["hadamard", "cz"])
def test_gate(tmp_path, kind):
    out = tmp_path / "g.json"
    assert run("gate", "--kind", kind, "--n", 2, "--samples", 40, "--trials", 5000,
               "--max-attempts", 20, "--seed", 2, "--out", out) == 0
    data = json.loads(out.read_text())
    s = data["samples"]
    assert sum(s["attempts"].values()) + s["gave_up"] == 40
    assert s["min_fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert run("gate", "--kind", kind, "--max-attempts", 0, "--seed", 2) == 2


def test_compare(tmp_path):
    out = tmp_path / "c.csv"
    assert run("compare", "--step", 1, "--out", out) == 0
    rows = _csv_rows(out)
    assert list(rows[0]) == ["scheme", "nbar", "ps", "is_physical_point"]
    assert rows[-1]["scheme"] == "zaidi" and rows[-1]["ps"] == "0.643"
    for r in rows:
        x, ps = float(r["nbar"]), float(r["ps"])
        if r["scheme"] == "ours":
            assert ps == pytest.approx(ps_ours(x), rel=1e-8)
        elif r["scheme"] == "grice":
            assert ps == pytest.approx(ps_grice(x), rel=1e-8)
        elif r["scheme"] == "coherent":
            assert ps == pytest.approx(coherent_ps(coherent_alpha_for(x)), rel=1e-8)
    assert run("compare", "--grid-end", 25) == 2


def test_ft_threshold(tmp_path):
    out = tmp_path / "ft.json"
    args = ("ft-threshold", "--n", 4, "--levels", 3, "--trials", 1000, "--tol", 1e-3, "--seed", 0)
    assert run(*args, "--out", out) == 0
    data = json.loads(out.read_text())
    (res,) = data["results"]
    assert res["N"] == 4 and res["levels_checked"] == 3
    lo, hi = res["bracket"]
    assert lo == res["eta_threshold"] and hi - lo <= 1e-3
    assert sum(data["circuit"]["locations"].values()) > 0


def test_ft_threshold_custom_circuit(tmp_path):
    from bellsim.ftsim.circuit import default_circuit

    circ = tmp_path / "round.circ"
    circ.write_text(default_circuit().to_text())
    out = tmp_path / "ft.json"
    assert run("ft-threshold", "--levels", 3, "--trials", 200, "--tol", 5e-3, "--seed", 0,
               "--circuit", circ, "--out", out) == 0
    circ.write_text("BLOCK D 0 1 2\n")
    assert run("ft-threshold", "--trials", 10, "--seed", 0, "--circuit", circ) == 2


def test_ft_threshold_errors():
    assert run("ft-threshold", "--levels", 2, "--seed", 0) == 2
    assert run("ft-threshold", "--backend", "fortran", "--seed", 0) == 2
    # a single photon never reaches a contracting regime
    assert run("ft-threshold", "--n", 1, "--levels", 3, "--trials", 500, "--seed", 0) == 1


def test_resources(capsys, tmp_path):
    assert run("resources", "--nh", 1, "--ncz", 1, "--nplus", 1) == 0
    assert capsys.readouterr().out == "605\n"
    out = tmp_path / "r.json"
    assert run("resources", "--nh", 2, "--ncz", 0, "--nplus", 1, "--out", out) == 0
    assert json.loads(out.read_text())["total"] == 2 * 98 + 164
    assert run("resources", "--nh", -1, "--ncz", 0, "--nplus", 0) == 2


def test_usage_errors(tmp_path):
    assert run() == 2
    assert run("nope") == 2
    assert run("logical-bm", "--n", 2) == 2  # missing seed
    assert run("teleport", "--eta", 2, "--seed", 1) == 2
    assert run("resources", "--nh", 1, "--ncz", 1, "--nplus", 1, "--out", tmp_path / "missing" / "x") == 2
    assert run("resources", "--nh", 1, "--ncz", 1, "--nplus", 1, "--out", tmp_path) == 2
    assert run("--version") == 0


@pytest.mark.parametrize("argv", [
    ("logical-bm", "--n", 3, 5, "--trials", 30000, "--seed", 9),
    ("loss-sweep", "--n", 2, "--eta-step", 0.2, "--trials", 3000, "--seed", 9),
    ("teleport", "--trials", 3000, "--samples", 20, "--seed", 9),
    ("gate", "--kind", "cz", "--trials", 3000, "--samples", 20, "--seed", 9),
    ("compare", "--step", 0.5),
    ("bs-table",),
])
def test_outputs_are_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(*argv, "--out", a) == 0
    assert run(*argv, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_round_trip(tmp_path):
    out = tmp_path / "a.json"
    assert run("teleport", "--n", 3, "--eta", 0.1, "--trials", 100, "--samples", 0, "--seed", 4, "--out", out) == 0
    cfg = cli.read_config(out)
    assert cfg["command"] == "teleport" and cfg["n"] == 3 and math.isclose(cfg["eta"], 0.1)
    again = tmp_path / "b.json"
    argv = ["teleport", "--out", again]
    for k in ("n", "eta", "trials", "samples", "seed"):
        argv += [f"--{k}", cfg[k]]
    assert run(*argv) == 0
    assert again.read_bytes() == out.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bellsim.cli", "resources", "--nh", "1", "--ncz", "1",
                           "--nplus", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "605\n"
    proc = subprocess.run([sys.executable, "-m", "bellsim.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2


@pytest.mark.skipif(shutil.which("bellsim") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["bellsim", "resources", "--nh", "1", "--ncz", "1", "--nplus", "1"],
                          capture_output=True, text=True)
    assert proc.stdout == "605\n"
