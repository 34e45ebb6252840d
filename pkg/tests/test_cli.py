import json
import subprocess
import sys

import pytest

from skalc.cli import main
from skalc.protocol_sim import scheme_from_json
from skalc.source_model import parse_rational

import _sources


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_mmi_json(capsys, write_source):
    path = write_source(_sources.EXAMPLE1)
    code, out, err = run_cli(capsys, "mmi", path)
    assert code == 0 and err == ""
    data = json.loads(out)
    assert data == {"mmi": "2", "finest": [["1"], ["2"], ["3"]], "minimizers": 3}


def test_outputs_are_reproducible(capsys, write_source):
    path = write_source(_sources.EXAMPLE1)
    outs = set()
    for _ in range(2):
        _, out, _ = run_cli(capsys, "mmi", path)
        outs.add(out)
    for _ in range(2):
        _, out, _ = run_cli(capsys, "sandwich", path, "--grid", "0:4:1/2")
        outs.add(out)
    assert len(outs) == 2


def test_rco_json(capsys, write_source):
    path = write_source(_sources.EXAMPLE1)
    code, out, _ = run_cli(capsys, "rco", path)
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"rco", "rates"}
    assert data["rco"] == "1"
    assert sum(parse_rational(r) for r in data["rates"].values()) == 1


def test_capacity_json(capsys, write_source):
    path = write_source(_sources.TRIANGLE)
    code, out, _ = run_cli(capsys, "capacity", path)
    assert code == 0
    data = json.loads(out)
    assert data["cap"] == "3/2"
    assert data["alpha_s"] == "3"
    assert data["r_s"] == "3/2"
    assert data["compressed"] == [["0", "0"], ["3", "3/2"]]
    assert data["constrained"] == [["0", "0"], ["3/2", "3/2"]]


def test_capacity_rejects_non_pin(capsys, write_source):
    path = write_source(_sources.EXAMPLE1)
    code, out, err = run_cli(capsys, "capacity", path)
    assert code == 2
    assert err.startswith("error:")


def test_sandwich_csv(capsys, write_source, tmp_path):
    path = write_source(_sources.EXAMPLE1)
    upper = tmp_path / "upper.json"
    upper.write_text(json.dumps([["0", "1"], ["1", "2"]]), encoding="utf-8")
    code, out, _ = run_cli(capsys, "sandwich", path, "--grid", "0:4:1/4",
                           "--cs-upper", str(upper))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "alpha,lower,upper,tight"
    assert len(lines) == 18
    assert "2,3/2,3/2,1" in lines
    assert all(line.endswith(",1") for line in lines[1:])


def test_sandwich_without_upper_not_all_tight(capsys, write_source):
    path = write_source(_sources.EXAMPLE1)
    code, out, _ = run_cli(capsys, "sandwich", path, "--grid", "2")
    assert code == 0
    assert out.strip().splitlines()[1] == "2,3/2,2,0"


@pytest.mark.parametrize("grid", ["4:0:1", "0:4:0", "0:4:-1", "1:2", "a:b:c", "0:200:1/100"])
def test_bad_grids_rejected(capsys, write_source, grid):
    path = write_source(_sources.EXAMPLE1)
    code, _, err = run_cli(capsys, "sandwich", path, "--grid", grid)
    assert code == 2
    assert err.startswith("error:")


def test_two_user_csv_and_witness(capsys, write_source, tmp_path):
    path = write_source(_sources.INTRO_PMF)
    wit = tmp_path / "witness.json"
    code, out, _ = run_cli(capsys, "two-user", path, "--grid", "0:2:1",
                           "--emit-witness", str(wit))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,value"
    rows = [line.split(",") for line in lines[1:]]
    assert [r[0] for r in rows] == ["0", "1", "2"]
    assert abs(float(rows[2][1]) - 1.0) <= 1e-3
    payload = json.loads(wit.read_text(encoding="utf-8"))
    assert payload["mode"] == "compressed"
    assert len(payload["points"]) == 3
    first_bytes = wit.read_bytes()
    _, out2, _ = run_cli(capsys, "two-user", path, "--grid", "0:2:1",
                         "--emit-witness", str(wit))
    assert out2 == out
    assert wit.read_bytes() == first_bytes


def test_two_user_constrained_mode(capsys, write_source):
    path = write_source(_sources.BIT_PMF)
    code, out, _ = run_cli(capsys, "two-user", path, "--mode", "constrained",
                           "--grid", "0:1:1/2")
    assert code == 0
    for line in out.strip().splitlines()[1:]:
        assert abs(float(line.split(",")[1]) - 1.0) <= 1e-6


def test_simulate_tree(capsys, write_source):
    path = write_source(_sources.TRIANGLE)
    code, out, _ = run_cli(capsys, "simulate", path, "--scheme", "tree", "-n", "2",
                           "--dump-scheme")
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "tree"
    assert data["trees"] == 3
    assert data["key_bits"] == 3
    assert data["secret"] is True
    assert data["key_uniform"] is True
    assert data["recoverable"] == {"1": True, "2": True, "3": True}
    scheme = scheme_from_json(json.dumps(data["scheme"]))
    assert len(scheme.key) == 3


def test_simulate_binning(capsys, write_source):
    path = write_source(_sources.EXAMPLE1)
    code, out, _ = run_cli(capsys, "simulate", path, "--scheme", "binning",
                           "-n", "16", "--seed", "1")
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "binning"
    assert data["achieved"] is True
    assert data["secret"] is True
    assert data["key_bits"] >= 16
    assert data["seed"] == 1
    assert set(data["rates"]) == {"1", "2", "3"}


def test_resource_cap_exit_code(capsys, write_source):
    import random
    rng = random.Random(0)
    big = _sources.random_hypergraph(rng, n_users=13, n_edges=14)
    path = write_source(big)
    code, _, err = run_cli(capsys, "mmi", path)
    assert code == 3
    assert err.startswith("resource cap:")


def test_validation_exit_code(capsys, write_source):
    path = write_source({"kind": "nonsense"})
    code, _, err = run_cli(capsys, "mmi", path)
    assert code == 2
    assert err.startswith("error:")


def test_threads_env(capsys, write_source, monkeypatch):
    path = write_source(_sources.TRIANGLE)
    monkeypatch.setenv("SKALC_THREADS", "4")
    code, _, _ = run_cli(capsys, "mmi", path)
    assert code == 0
    monkeypatch.setenv("SKALC_THREADS", "0")
    code, _, err = run_cli(capsys, "mmi", path)
    assert code == 2
    monkeypatch.setenv("SKALC_THREADS", "plenty")
    code, _, err = run_cli(capsys, "mmi", path)
    assert code == 2


def test_module_entry_point(write_source):
    path = write_source(_sources.TRIANGLE)
    proc = subprocess.run([sys.executable, "-m", "skalc", "mmi", path],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mmi"] == "3/2"
