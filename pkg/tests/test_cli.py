import csv
import json
import math
import subprocess
import sys

import pytest

from plap.cli import main

DIAMOND_VALUES = (0, 2, 6, 1 + (1 + math.sqrt(2)) ** 2, 8)


@pytest.fixture
def run(capsys, data_dir):
    def _run(*argv):
        argv = [str(a).replace("@", str(data_dir) + "/") for a in argv]
        code = main(argv)
        out, err = capsys.readouterr()
        return code, (json.loads(out) if out.strip() else None), err
    return _run


def test_spectrum_diamond(run):
    code, rep, _ = run("spectrum", "--graph", "@graphs/diamond.graph", "--p", "3", "--restarts", "64", "--seed", "1")
    assert code == 0 and rep["schema"] == "report.v1" and rep["command"] == "spectrum"
    vals = rep["results"]["critical_values"]
    for lam in DIAMOND_VALUES:
        assert any(abs(v - lam) <= 1e-6 * max(1, lam) for v in vals)
    assert all(w["residual"] <= 1e-8 for w in rep["results"]["witnesses"])
    assert rep["provenance"]["seed"] == 1 and rep["timings"]["wall_seconds"] >= 0


def test_spectrum_k3_linear(run):
    code, rep, _ = run("spectrum", "--graph", "@graphs/k3.graph", "--p", "2", "--restarts", "8", "--seed", "0")
    assert code == 0
    assert rep["results"]["linear_eigenvalues"] == pytest.approx([0, 3, 3])


def test_spectrum_degenerate_modes(run):
    _, rep, _ = run("spectrum", "--graph", "@graphs/p7.graph", "--p", "1")
    assert rep["results"]["critical_values"] == pytest.approx([0, 1 / 3, 1 / 2, 2 / 3, 1, 2])
    _, rep, _ = run("spectrum", "--graph", "@graphs/p7.graph", "--p", "inf")
    assert rep["results"]["critical_values"] == pytest.approx([0] + sorted(2 / l for l in range(1, 7)))


def test_omitted_seed_is_echoed(run):
    _, rep, _ = run("spectrum", "--graph", "@graphs/k3.graph", "--p", "3", "--restarts", "4")
    seed = rep["inputs"]["seed"]
    assert isinstance(seed, int) and rep["provenance"]["seed"] == seed


def test_determinism_across_threads(run):
    base = ("spectrum", "--graph", "@graphs/diamond.graph", "--p", "3", "--restarts", "16", "--seed", "7")
    _, a, _ = run(*base, "--threads", "1")
    _, b, _ = run(*base, "--threads", "3")
    assert a["results"] == b["results"]


def test_verify_examples(run):
    code, rep, _ = run("verify", "--graph", "@graphs/p7.graph", "--f", "@functions/p7_ind123.json",
                       "--p", "1", "--Lambda", str(1 / 3))
    assert code == 0 and rep["results"]["pass"] and rep["results"]["certificate"]["feasible"]
    code, rep, _ = run("verify", "--graph", "@graphs/star.graph", "--f", "@functions/star_inf.json",
                       "--p", "inf", "--Lambda", "2")
    assert code == 0 and rep["results"]["sp_witness"]["path"] == ["3", "1"]
    code, rep, _ = run("verify", "--graph", "@graphs/p7.graph", "--f", "@functions/p7_ind123.json",
                       "--p", "1", "--Lambda", "0.5")
    assert code == 1 and rep["results"]["reason"] == "rayleigh-mismatch"
    code, rep, _ = run("verify", "--graph", "@graphs/diamond.graph", "--f", "@functions/diamond_0_1_0_m1.json",
                       "--p", "3", "--lambda", "6")
    assert code == 0 and rep["results"]["residual"] <= 1e-12


def test_witness_round_trip(run, tmp_path):
    _, rep, _ = run("spectrum", "--graph", "@graphs/diamond.graph", "--p", "3", "--restarts", "32", "--seed", "2")
    for w in rep["results"]["witnesses"]:
        path = tmp_path / "f.json"
        path.write_text(json.dumps(w["f"]))
        code, v, _ = run("verify", "--graph", "@graphs/diamond.graph", "--f", path, "--p", "3",
                         "--lambda", repr(w["lambda"]))
        assert code == 0, v["results"]
        code, n, _ = run("nodal", "--graph", "@graphs/diamond.graph", "--f", path, "--p", "3")
        assert code == 0 and n["results"]["SN"] >= 1
        if w["lambda"] > 0:
            code, d, _ = run("dual", "--graph", "@graphs/diamond.graph", "--f", path, "--p", "3",
                             "--lambda", repr(w["lambda"]))
            assert code == 0 and d["results"]["dual"]["residual"] <= 1e-8


def test_geometry_examples(run):
    _, rep, _ = run("geometry", "--graph", "@graphs/p7.graph", "--quantity", "cheeger", "--k", "3")
    assert rep["results"]["h_k"] == pytest.approx(2 / 3)
    _, rep, _ = run("geometry", "--graph", "@graphs/p7.graph", "--quantity", "packing", "--k", "4")
    assert rep["results"]["R_k"] == pytest.approx(1)
    _, rep, _ = run("geometry", "--graph", "@graphs/p7.graph", "--quantity", "packing", "--k", "1")
    assert rep["results"]["R_k"] == "inf"
    _, rep, _ = run("geometry", "--graph", "@graphs/p7.graph", "--quantity", "isoperimetric", "--set", "1,2,3")
    assert rep["results"]["c"] == pytest.approx(1 / 3)
    _, rep, _ = run("geometry", "--graph", "@graphs/p7.graph", "--quantity", "matching")
    assert rep["results"]["beta"] == 3


def test_partition_example(run):
    code, rep, _ = run("partition", "--graph", "@graphs/p7.graph", "--k", "2", "--mode", "nonadjacent", "--order", "1")
    assert code == 0 and rep["results"]["inverse"] == pytest.approx(3)


def test_dual_kernel_dims(run):
    _, rep, _ = run("dual", "--graph", "@graphs/c5.graph")
    assert rep["results"]["kernel_dims"] == {"d1": 1, "d2": 1}
    code, rep, _ = run("dual", "--graph", "@graphs/star.graph", "--f", "@functions/star_inf.json",
                       "--p", "inf", "--Lambda", "2")
    assert code == 0 and rep["results"]["dual"]["feasible"]


def test_scan_csv(run, tmp_path):
    out = tmp_path / "scan.csv"
    code, rep, _ = run("scan", "--graph", "@graphs/k3.graph", "--p-grid", "2,3,4", "--k", "3",
                       "--seed", "0", "--csv", out)
    assert code == 0 and len(rep["results"]["rows"]) == 3
    rows = list(csv.reader(out.open()))
    assert rows[0][:2] == ["p", "lambda_1"] and len(rows) == 4
    assert [float(r[0]) for r in rows[1:]] == [2, 3, 4]


def test_exit_codes(run, tmp_path):
    assert run("spectrum", "--graph", tmp_path / "missing.graph", "--p", "3")[0] == 2
    bad = tmp_path / "bad.graph"
    bad.write_text("GRAPH v1\nnode 1\nedge 1 2 -1.0\n")
    code, rep, err = run("geometry", "--graph", bad, "--quantity", "matching")
    assert code == 2 and rep is None and "input error" in err
    big = tmp_path / "p17.graph"
    big.write_text("GRAPH v1\n" + "".join(f"node {i}\n" for i in range(1, 18))
                   + "".join(f"edge {i} {i + 1} 1.0\n" for i in range(1, 17)))
    code, rep, err = run("geometry", "--graph", big, "--quantity", "cheeger", "--k", "2")
    assert code == 4 and rep is None and err
    code, _, _ = run("verify", "--graph", "@graphs/p7.graph", "--f", "@functions/p7_ind123.json", "--p", "1")
    assert code == 2


def test_bad_p_is_input_error(data_dir):
    proc = subprocess.run([sys.executable, "-m", "plap", "spectrum", "--graph", str(data_dir / "graphs/p7.graph"),
                           "--p", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == ""


def test_stdout_is_strict_json(data_dir):
    proc = subprocess.run([sys.executable, "-m", "plap", "geometry", "--graph", str(data_dir / "graphs/p7.graph"),
                           "--quantity", "packing", "--k", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    json.loads(proc.stdout, parse_constant=lambda c: pytest.fail(f"non-strict constant {c}"))
