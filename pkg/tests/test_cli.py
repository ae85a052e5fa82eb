import json

import numpy as np
import pytest

from spiral import cli
from spiral._io import read_csv, write_csv
from spiral.deorbit import Debris, GridSpec, build_surrogate
from spiral.optimize.pareto import ParetoFront


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def surrogate_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("sur") / "surrogate_1.json"
    build_surrogate(Debris(500.0, 6828.16, "1"), grid=GridSpec(n_m=3, n_a1=10, n_af=10)).save(p)
    return p


def test_propagate_with_oracle(capsys):
    code, out, _ = run(capsys, "propagate", "--state", "7000,0,0.01,0,0,0", "--dl", "3.0",
                       "--eps", "1e-7", "--alpha", "1.5707963", "--oracle")
    assert code == 0
    doc = json.loads(out)
    assert doc["analytic"]["a"] == pytest.approx(doc["oracle"]["a"], abs=1e-3)


def test_bad_state_is_usage_error(capsys):
    code, _, err = run(capsys, "propagate", "--state", "7000,0", "--dl", "1", "--eps", "0")
    assert code == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "usage"


def test_surrogate_query_in_and_out_of_domain(capsys, surrogate_file):
    code, out, _ = run(capsys, "surrogate", "query", "--surrogate", str(surrogate_file), "--tof", "20", "--mibs0", "900")
    assert code == 0
    assert json.loads(out)["dv_kms"] > 0
    code, _, err = run(capsys, "surrogate", "query", "--surrogate", str(surrogate_file), "--tof", "0.5", "--mibs0", "900")
    assert code == cli.EXIT_INFEASIBLE
    e = json.loads(err)
    assert e["status"] == "infeasible" and e["variable"] == "tof_days"
    lo, hi = e["valid_range"]
    assert 0.5 < lo < hi
    code, _, err = run(capsys, "surrogate", "query", "--surrogate", str(surrogate_file), "--tof", "20", "--mibs0", "100")
    assert code == cli.EXIT_INFEASIBLE and json.loads(err)["variable"] == "m_ibs0_kg"


def test_deorbit_writes_history(capsys, tmp_path):
    h = tmp_path / "h.csv"
    out_json = tmp_path / "d.json"
    code, _, _ = run(capsys, "deorbit", "--paper-scenario", "--debris", "1", "--mibs0", "1000",
                     "--controls", "3.14159,3.14159", "--out", str(out_json), "--history", str(h))
    assert code == 0
    doc = json.loads(out_json.read_text())
    assert doc["kind"] == "deorbit_result" and doc["converged"]
    header, rows = read_csv(h)
    assert header[0] == "orbit" and len(rows) == doc["n_orbits"] + 1
    assert h.read_text().startswith("# run:")


def test_unknown_debris_and_missing_catalog(capsys):
    code, _, err = run(capsys, "deorbit", "--paper-scenario", "--debris", "9", "--mibs0", "1000", "--controls", "1,1")
    assert code == cli.EXIT_ERROR and json.loads(err)["error"] == "not_found"
    code, _, err = run(capsys, "deorbit", "--debris", "1", "--mibs0", "1000", "--controls", "1,1")
    assert json.loads(err)["error"] == "usage"


def test_bad_catalog_reports_location(capsys, tmp_path):
    p = tmp_path / "cat.json"
    p.write_text(json.dumps([{"id": "1", "mass": -5, "a": 7000, "e": 0, "i": 0, "raan": 0}]))
    code, _, err = run(capsys, "deorbit", "--catalog", str(p), "--debris", "1", "--mibs0", "900", "--controls", "1,1")
    e = json.loads(err)
    assert code == cli.EXIT_ERROR and e["index"] == 0 and e["field"] == "mass"


def test_bad_config_rejected(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"spacecraft": {"warp": 9}}))
    code, _, err = run(capsys, "propagate", "--config", str(p), "--state", "7000,0,0,0,0,0", "--dl", "1", "--eps", "0")
    assert code == cli.EXIT_ERROR and "spacecraft" in json.loads(err)["message"]


def test_transfer_first_leg(capsys, tmp_path):
    out = tmp_path / "t.json"
    hist = tmp_path / "t.csv"
    code, _, _ = run(capsys, "transfer", "--from", "6628.16,0.01", "--to", "6828.16,0,0", "--tof", "5",
                     "--multistart", "0", "--out", str(out), "--history", str(hist))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["feasible"] and doc["dv_kms"] == pytest.approx(0.115, rel=0.03)
    header, rows = read_csv(hist)
    assert header[:3] == ["rev", "t_s", "a_km"]


def test_rank_from_front_files(capsys, tmp_path):
    d = tmp_path / "fronts"
    d.mkdir()
    a = ParetoFront("13", [[10.0, 1.0], [20.0, 0.5]], np.ones((2, 4)))
    b = ParetoFront("31", [[12.0, 1.2]], np.ones((1, 4)))
    for fr in (a, b):
        cli.write_front_csv(d / f"front_{fr.order}.csv", fr)
    header, rows = read_csv(d / "front_13.csv")
    assert header == ["order", "tof_days", "dv_kms", "x1", "x2", "x3", "x4"]
    out = tmp_path / "rank.csv"
    code, _, _ = run(capsys, "rank", "--fronts", str(d), "--out", str(out))
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["rank", "order", "conv"]
    assert rows[0][:2] == ["1", "13"] and float(rows[0][2]) == 0.0


def test_rank_needs_fronts(capsys, tmp_path):
    code, _, err = run(capsys, "rank", "--fronts", str(tmp_path))
    assert code == cli.EXIT_ERROR and json.loads(err)["error"] == "not_found"


def test_phasing_from_result(capsys, tmp_path):
    res = {
        "kind": "sequence_result",
        "tof_tot_days": 100.0,
        "phases": [
            {"kind": "rendezvous", "a": 6828.16, "e": 0.0},
            {"kind": "deorbit", "a": 6750.0, "e": 0.011},
            {"kind": "rendezvous", "a": 6978.16, "e": 0.0},
            {"kind": "deorbit", "a": 6826.0, "e": 0.022},
        ],
    }
    p = tmp_path / "r.json"
    p.write_text(json.dumps(res))
    code, out, _ = run(capsys, "phasing", "--result", str(p))
    doc = json.loads(out)
    assert code == 0 and doc["strategy"] == "eccentric-coasting"
    code, out, _ = run(capsys, "phasing", "--result", str(p), "--strategy", "quasi-circular")
    assert json.loads(out)["fraction_of_nominal"] < 0.05


def test_threads_validated(capsys):
    code, _, err = run(capsys, "propagate", "--threads", "0", "--state", "7000,0,0,0,0,0", "--dl", "1", "--eps", "0")
    assert code == cli.EXIT_ERROR


def test_front_csv_round_trip(tmp_path):
    fr = ParetoFront("12", [[1.0, 2.0]], [[5.0, 6.0, 7.0, 8.0]], {"evaluations": 3})
    p = tmp_path / "f.csv"
    cli.write_front_csv(p, fr, "abc")
    back = cli.read_front_csv(p)
    assert back.order == "12"
    np.testing.assert_allclose(back.objectives, fr.objectives)
    np.testing.assert_allclose(back.decisions, fr.decisions)
    write_csv(p, "a,b", [[1, 2]])
    with pytest.raises(cli.CliError):
        cli.read_front_csv(p)
