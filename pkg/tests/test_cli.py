import json

import pytest

from src import build_gadget, solve, sweep_single, sweep_two_constraint
from src.experiments import read_csv

CHEAP = ["--restarts", "2", "--max-evals", "300", "--metrics", ""]


def pair_instance_doc():
    return {
        "n": 2,
        "q": [[0, 0, 3], [1, 1, 4], [0, 1, 1]],
        "constraints": [{"coeffs": [1, 1], "sense": "EQ", "rhs": 1}],
    }


def test_build_gadget_trains_then_hits_library(tmp_path, capsys):
    store = str(tmp_path / "store.json")
    out = tmp_path / "summary.json"
    assert build_gadget.main(["x0 + x1 = 1", "--store", store, "--out", str(out), *CHEAP]) == 0
    first = json.loads(out.read_text())
    assert first["from_store"] is False
    assert first["qubits"] == 3 and first["mode"] == "ma-qaoa"

    assert build_gadget.main(["x4 + x2 = 1", "--store", store, "--out", str(out), *CHEAP]) == 0
    second = json.loads(out.read_text())
    assert second["from_store"] is True
    assert second["key"] == first["key"]
    assert second["gadget_ar"] == pytest.approx(first["gadget_ar"], abs=1e-9)
    assert "gadget_ar=" in capsys.readouterr().out


def test_build_gadget_reports_parse_errors():
    with pytest.raises(SystemExit) as err:
        build_gadget.main(["x0 ++ 1", "--no-store", "--metrics", ""])
    assert str(err.value).startswith("Parse error")


def test_build_gadget_rejects_corrupt_library(tmp_path):
    store = tmp_path / "store.json"
    store.write_text("[]")
    with pytest.raises(SystemExit):
        build_gadget.main(["x0 + x1 = 1", "--store", str(store), *CHEAP])


def test_solve_writes_report(tmp_path):
    inst = tmp_path / "instance.json"
    inst.write_text(json.dumps(pair_instance_doc()))
    out = tmp_path / "report.json"
    argv = [str(inst), "--no-store", "--grid", "8", "--solve-restarts", "1", "--shots", "100", "--out", str(out), *CHEAP]
    assert solve.main(argv) == 0
    doc = json.loads(out.read_text())
    assert doc["optimal"] == ["10"]
    assert doc["delta"] == 5.0
    assert sum(doc["counts"].values()) == 100
    assert all(len(e["ket"]) == 3 for e in doc["distribution"])


def test_solve_refuses_infeasible_instance(tmp_path):
    doc = pair_instance_doc()
    doc["constraints"][0]["rhs"] = 3
    inst = tmp_path / "instance.json"
    inst.write_text(json.dumps(doc))
    with pytest.raises(SystemExit) as err:
        solve.main([str(inst), "--no-store", *CHEAP])
    assert "Refusing" in str(err.value)


def test_solve_rejects_bad_documents(tmp_path):
    doc = pair_instance_doc()
    doc["q"].append([0, 2, 1])
    inst = tmp_path / "instance.json"
    inst.write_text(json.dumps(doc))
    with pytest.raises(SystemExit):
        solve.main([str(inst), "--no-store", *CHEAP])


def test_solve_separate_gadgets_need_disjoint_supports(tmp_path):
    doc = {
        "n": 3,
        "q": [[0, 0, 1]],
        "constraints": [
            {"coeffs": [1, 1, 0], "sense": "EQ", "rhs": 1},
            {"coeffs": [1, 0, 1], "sense": "EQ", "rhs": 1},
        ],
    }
    inst = tmp_path / "instance.json"
    inst.write_text(json.dumps(doc))
    with pytest.raises(SystemExit) as err:
        solve.main([str(inst), "--no-store", "--gadgets", "separate", *CHEAP])
    assert "share variables" in str(err.value)


def test_sweep_single_cli(tmp_path):
    out = tmp_path / "sweep.csv"
    argv = [
        "--n-max", "1", "--b-max", "1", "--senses", "eq", "--instances", "1", "--restarts", "2",
        "--max-evals", "200", "--grid", "4", "--out", str(out), "--metrics", "",
    ]
    assert sweep_single.main(argv) == 0
    df = read_csv(str(out))
    assert len(df[df["row_type"] == "gadget"]) == 2
    assert len(df[df["row_type"] == "qcbo"]) == 2
    with pytest.raises(SystemExit):
        sweep_single.main(["--senses", "NE", "--out", str(out), "--metrics", ""])


def test_sweep_two_constraint_cli(tmp_path):
    out = tmp_path / "two.csv"
    argv = [
        "--case", "1", "--sets", "1", "--instances", "0", "--restarts", "1", "--max-evals", "50",
        "--out", str(out), "--metrics", "",
    ]
    assert sweep_two_constraint.main(argv) == 0
    assert out.read_text().startswith("# sweep_two_case1 v1\n")
    df = read_csv(str(out))
    assert sorted(df["flag_mode"]) == ["per-constraint", "single"]


def test_solve_rejects_gadget_beyond_training_limit(tmp_path):
    doc = {"n": 12, "q": [[0, 0, 1]], "constraints": [{"coeffs": [1] * 12, "sense": "LE", "rhs": 3}]}
    inst = tmp_path / "instance.json"
    inst.write_text(json.dumps(doc))
    with pytest.raises(SystemExit) as err:
        solve.main([str(inst), "--no-store", *CHEAP])
    assert "13 qubits" in str(err.value)


def test_solve_rejects_register_beyond_simulation_limit(tmp_path):
    doc = {"n": 24, "q": [[0, 0, 1]], "constraints": [{"coeffs": [1, 1] + [0] * 22, "sense": "EQ", "rhs": 1}]}
    inst = tmp_path / "instance.json"
    inst.write_text(json.dumps(doc))
    with pytest.raises(SystemExit) as err:
        solve.main([str(inst), "--no-store", *CHEAP])
    assert "25 qubits" in str(err.value)
