import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pstqudit import catalog
from pstqudit.cli import (
    EXIT_DIMENSION,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_TOLERANCE,
    CliError,
    RunConfig,
    dumps,
    run,
)


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def k3_file(tmp_path):
    p = tmp_path / "k3.json"
    p.write_text(json.dumps(catalog.complete_graph(3).to_document()))
    return p


def test_catalog_list_and_export(capsys):
    code, out, _ = call(capsys, "catalog", "list")
    assert code == 0 and out.split() == list(catalog.CATALOG)
    code, out, _ = call(capsys, "catalog", "export", "C4")
    assert code == 0 and len(json.loads(out)["edges"]) == 4
    code, _, err = call(capsys, "catalog", "export", "nope")
    assert code == EXIT_PARSE and "error" in err


def test_analyze_catalog(capsys):
    code, out, _ = call(capsys, "analyze", "--catalog", "G2")
    doc = json.loads(out)
    assert code == 0
    assert doc["valencies"] == [1, 2, 4, 2, 1]
    assert doc["pseudo_distance_regular"] and not doc["regular"] and doc["feasible"]


def test_analyze_k3_infeasible(capsys, k3_file):
    code, out, _ = call(capsys, "analyze", "--input", str(k3_file), "--ref", "0")
    doc = json.loads(out)
    assert code == 0 and doc["feasible"] is False
    assert "kappa_D = 2" in doc["infeasibility"]


def test_analyze_star_not_pdr_from_leaf(capsys, tmp_path):
    # K_{1,4} with an extra edge between two leaves breaks pseudo-distance-regularity at the hub
    from pstqudit.graph import Graph

    g = Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)], name="kite")
    p = tmp_path / "kite.json"
    p.write_text(json.dumps(g.to_document()))
    code, out, _ = call(capsys, "analyze", "--input", str(p))
    doc = json.loads(out)
    assert code == 0 and doc["pseudo_distance_regular"] is False and "witness" in doc
    code, _, _ = call(capsys, "spectrum", "--input", str(p))
    assert code == EXIT_INFEASIBLE


def test_spectrum(capsys):
    code, out, _ = call(capsys, "spectrum", "--catalog", "icosahedron")
    doc = json.loads(out)
    assert code == 0
    assert doc["alpha"] == [0, 2, 2, 0] and doc["omega"] == [5, 4, 5]
    assert sorted(doc["weights"]) == pytest.approx(sorted([5 / 12, 1 / 12, 1 / 4, 1 / 4]), abs=1e-11)


def test_design_icosahedron_published_couplings(capsys):
    code, out, _ = call(capsys, "design", "--catalog", "icosahedron", "--theta", "0", "--t0", "1", "--paper-couplings")
    doc = json.loads(out)
    assert code == 0
    assert doc["J"][1] == 0 and doc["J"][2] == 0
    assert doc["J"][3] == pytest.approx(math.pi / 4, abs=1e-11)
    assert doc["J"][0] == pytest.approx(-math.pi / 4, abs=1e-11)


def test_design_default_and_branch(capsys):
    code, out, _ = call(capsys, "design", "--catalog", "C4", "--t0", "2")
    assert code == 0 and json.loads(out)["f"] == [0, 1, 0]
    code, out, _ = call(capsys, "design", "--catalog", "C4", "--branch", "1,0,2")
    assert code == 0 and json.loads(out)["branch_l"] == [1, 0, 2]
    code, _, err = call(capsys, "design", "--catalog", "C4", "--branch", "1,0")
    assert code == EXIT_PARSE and "--branch" in err


def test_evolve_hypercube_published_couplings(capsys, tmp_path):
    code, _, _ = call(capsys, "evolve", "--catalog", "hypercube4", "--paper-couplings", "--t0", "1", "--out", str(tmp_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "curve.csv").read_text())))
    at = next(r for r in rows if float(r["t"]) == 1.0)
    assert float(at["abs_f_4"]) == pytest.approx(1, abs=1e-9)
    doc = json.loads((tmp_path / "transfer.json").read_text())
    assert doc["perfect_transfer"] and doc["max_leakage"] < 1e-9


def test_evolve_grid(capsys, tmp_path):
    code, _, _ = call(capsys, "evolve", "--catalog", "G2", "--t0", "1.5", "--grid", "0,3,4", "--out", str(tmp_path))
    assert code == 0
    text = (tmp_path / "curve.csv").read_bytes()
    assert b"\r" not in text
    lines = text.decode().splitlines()
    assert lines[0] == "t,abs_f_0,abs_f_1,abs_f_2,abs_f_3,abs_f_4,re_f_D,im_f_D"
    assert len(lines) == 1 + 5  # 1.5 is inserted into the 4-sample grid


def test_exit_parse_errors(capsys):
    assert call(capsys, "design")[0] == EXIT_PARSE
    assert call(capsys, "bogus")[0] == EXIT_PARSE
    assert call(capsys, "design", "--catalog", "C4", "--t0", "-1")[0] == EXIT_PARSE
    assert call(capsys, "evolve", "--catalog", "C4", "--t0", "5", "--grid", "0,1,5")[0] == EXIT_PARSE
    assert call(capsys, "evolve", "--catalog", "C4", "--grid", "0,1")[0] == EXIT_PARSE
    assert call(capsys, "analyze", "--input", "/nonexistent.json")[0] == EXIT_PARSE
    assert call(capsys, "verify", "--catalog", "C4", "--ref", "9")[0] == EXIT_PARSE


def test_exit_parse_bad_document(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n_vertices": 3, "edges": [[0, 0]]}')
    code, _, err = call(capsys, "analyze", "--input", str(p))
    assert code == EXIT_PARSE and err


def test_exit_infeasible(capsys, k3_file):
    assert call(capsys, "design", "--input", str(k3_file))[0] == EXIT_INFEASIBLE
    assert call(capsys, "design", "--catalog", "modified_G2")[0] == EXIT_INFEASIBLE


def test_exit_tolerance_unresolved_phase(capsys):
    # the literal Hamiltonian matches neither c = 1 nor c = 2
    code, out, err = call(capsys, "verify", "--catalog", "K2", "--d", "2")
    assert code == EXIT_TOLERANCE and "phase factor" in err
    assert json.loads(out)["phase_factor_resolved"] is None


def test_verify_with_half_candidate(capsys):
    code, out, _ = call(capsys, "verify", "--catalog", "C4", "--d", "3", "--phase-candidates", "0.5,1,2")
    doc = json.loads(out)
    assert code == 0 and doc["phase_factor_resolved"] == 0.5
    assert doc["checks"]["nu_independence"] < 1e-9


def test_exit_dimension_cap(capsys):
    assert call(capsys, "verify", "--catalog", "hypercube4", "--d", "3")[0] == EXIT_DIMENSION


def test_verify_needs_graph(capsys):
    assert call(capsys, "verify", "--catalog", "modified_G2")[0] in (EXIT_PARSE, EXIT_INFEASIBLE)


def test_env_tolerance(capsys, monkeypatch):
    # the published modified couplings are not used here; loosen the tolerance on a rounded design instead
    monkeypatch.setenv("PST_SEED_TOLERANCE", "abc")
    assert call(capsys, "design", "--catalog", "C4")[0] == EXIT_PARSE
    monkeypatch.setenv("PST_SEED_TOLERANCE", "-1")
    assert call(capsys, "design", "--catalog", "C4")[0] == EXIT_PARSE
    monkeypatch.setenv("PST_SEED_TOLERANCE", "1e-6")
    assert call(capsys, "design", "--catalog", "C4")[0] == EXIT_OK


def test_run_config_invariants():
    with pytest.raises(CliError):
        RunConfig(t0=0)
    with pytest.raises(CliError):
        RunConfig(tolerance=0)
    assert len(RunConfig(t0=0.3, grid=(0, 1, 4)).time_grid) == 5


def test_dumps_rounding():
    text = dumps({"x": 1 / 3, "z": -0.0, "v": [1e-20, 2]})
    assert json.loads(text) == {"x": 0.333333333333, "z": 0.0, "v": [1e-20, 2]}
    assert text.endswith("\n")


@pytest.mark.parametrize(
    "argv,files",
    [
        (["spectrum", "--catalog", "modified_G2"], ["spectrum.json"]),
        (["design", "--catalog", "simplex3", "--theta", "0.3", "--t0", "1.7"], ["design.json"]),
        (["evolve", "--catalog", "G2", "--theta", "0.3", "--t0", "1.7"], ["curve.csv", "transfer.json"]),
    ],
)
def test_byte_identical_reruns(tmp_path, argv, files):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        proc = subprocess.run(
            [sys.executable, "-m", "pstqudit.cli", *argv, "--out", str(out)], capture_output=True
        )
        assert proc.returncode == 0, proc.stderr
        outputs.append([(out / f).read_bytes() for f in files])
    assert outputs[0] == outputs[1]
