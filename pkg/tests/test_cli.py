import json
import subprocess
import sys

import numpy as np
import pytest

import blindgraph as bg
from blindgraph.cli import main
from blindgraph.experiments import draw_instance, gen_graph
from blindgraph.graph import write_edge_list, write_matrix_csv


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def test_identify(capsys):
    code, out = run(["identify", "--L", "4", "--S", "4", "--n", "6"], capsys)
    d = json.loads(out.out)
    assert code == 0 and d["identifiable"] is False and d["witness_support"]
    code, out = run(["identify", "--L", "2", "--S", "2", "--n", "6"], capsys)
    assert json.loads(out.out)["identifiable"] is True


def test_solve_from_files(tmp_path, capsys):
    rng = np.random.default_rng(0)
    g = gen_graph("er", rng, connected=True, n=30, p=0.2)
    write_edge_list(g, tmp_path / "g.edges")
    sp = bg.build_shift(g)
    xs, h = draw_instance(30, 2, 2, rng)
    y = bg.apply_filter(sp, h, xs[0])
    write_matrix_csv(y[:, None], tmp_path / "y.csv")
    out = tmp_path / "sol.json"
    code, _ = run(["solve", "--edges", str(tmp_path / "g.edges"), "--output", str(tmp_path / "y.csv"),
                   "--L", "2", "--solver", "rw", "--seed", "3", "--out", str(out)], capsys)
    d = json.loads(out.read_text())
    assert code == 0 and d["seed"] == 3
    assert bg.rmse(np.array(d["x_hat"]), np.array(d["h_hat"]), xs[0], h) < 0.01


def test_solve_partial_needs_nodes(tmp_path, capsys):
    g = gen_graph("er", 1, n=10, p=0.4)
    write_edge_list(g, tmp_path / "g.edges")
    write_matrix_csv(np.ones((4, 1)), tmp_path / "y.csv")
    code, out = run(["solve", "--edges", str(tmp_path / "g.edges"), "--output", str(tmp_path / "y.csv"),
                     "--L", "2"], capsys)
    assert code == 2 and "observed-nodes" in out.err


def test_missing_file_is_io_error(tmp_path, capsys):
    code, out = run(["solve", "--edges", str(tmp_path / "nope"), "--output", "y", "--L", "1"], capsys)
    assert code == 1


def test_phase_writes_outputs(tmp_path, capsys):
    code, out = run(["phase", "--graph", "er", "--graph-param", "n=20", "--graph-param", "p=0.2",
                     "--S", "1", "2", "--L", "1", "--trials", "2", "--solver", "l1", "--seed", "1",
                     "--out", str(tmp_path)], capsys)
    assert code == 0
    assert len((tmp_path / "results.csv").read_text().splitlines()) == 5
    assert (tmp_path / "phase_l1_P1.svg").exists()


def test_json_spec_and_overrides(tmp_path, capsys):
    spec = {"kind": "rho_correlation", "trials": 1, "solvers": ["l1"], "connected": False,
            "options": {"n_graphs": 2, "n": 15}}
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(spec))
    code, _ = run(["rho", "--json-spec", str(p), "--out", str(tmp_path / "o"), "--tau", "0.5"], capsys)
    assert code == 0
    assert json.loads((tmp_path / "o" / "summary.json").read_text())["kind"] == "rho_correlation"


def test_kind_mismatch(tmp_path, capsys):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps({"kind": "phase"}))
    code, out = run(["rho", "--json-spec", str(p)], capsys)
    assert code == 2


def test_bad_solver_is_config_error(tmp_path, capsys):
    code, out = run(["phase", "--solver", "magic", "--trials", "1", "--out", str(tmp_path)], capsys)
    assert code == 2


def test_sweep_and_epidemic_small(tmp_path, capsys):
    code, _ = run(["sweep", "--graph", "er", "--graph-param", "n=20", "--graph-param", "p=0.3",
                   "--observed", "20", "--trials", "1", "--solver", "ls", "--option", "S=2", "--option", "L=2",
                   "--out", str(tmp_path / "s")], capsys)
    assert code == 0
    code, _ = run(["epidemic", "--observed", "34", "--trials", "1", "--option", "W=50", "--option", 'Q=["N"]',
                   "--out", str(tmp_path / "e")], capsys)
    assert code == 0
    assert "loc_error" in (tmp_path / "e" / "results.csv").read_text().splitlines()[0]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "blindgraph", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "identify" in r.stdout
