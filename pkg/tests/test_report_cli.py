import json
import math

import numpy as np
import pytest

from subsparse import cli
from subsparse.conditions import analyze_conditions
from subsparse.geometry import Dictionary, dictionary_to_json
from subsparse.randomized import RandomModelParams, drc_probability_bound, monte_carlo_drc
from subsparse.report import (
    dumps_csv,
    dumps_json,
    emit_report,
    format_float,
    load_csv_report,
    load_json_report,
)


@pytest.fixture
def dict_path(tmp_path):
    dic = Dictionary(np.eye(3), partition=((0, 1), (2,)))
    path = tmp_path / "dict.json"
    path.write_text(json.dumps(dictionary_to_json(dic)))
    return path


class TestReport:
    def test_float_format(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(2.0) == "2.0"
        assert format_float(math.inf) == "Infinity"
        assert format_float(math.nan) == "NaN"
        assert float(format_float(1e300)) == 1e300

    def test_condition_report_keys(self, tmp_path):
        rep = analyze_conditions(Dictionary(np.eye(3), partition=((0, 1), (2,))))
        data = json.loads(dumps_json(rep))
        for key in ("gamma0", "dist_ac_s0", "dist_ac_d0", "prc_holds", "drc_holds"):
            assert key in data

    def test_round_trip_bit_exact(self, tmp_path):
        rep = monte_carlo_drc(RandomModelParams(20, 2, 10, 1.0), 5, seed=2)
        path = tmp_path / "mc.json"
        emit_report(rep, "json", path)
        data = load_json_report(path)
        for rec, row in zip(rep.per_trial, data["per_trial"]):
            assert row["gamma0"] == rec.gamma0 and row["dist_ac_d0"] == rec.dist_ac_d0
        assert data["theoretical_lower_bound"] == rep.theoretical_lower_bound

    def test_csv_rows(self, tmp_path):
        rep = monte_carlo_drc(RandomModelParams(20, 2, 10, 1.0), 7, seed=2)
        path = tmp_path / "mc.csv"
        emit_report(rep, "csv", path)
        assert len(path.read_text().splitlines()) == 7 + 1
        rows = load_csv_report(path)
        assert [float(r["gamma0"]) for r in rows] == [t.gamma0 for t in rep.per_trial]

    def test_infinity_round_trip(self):
        data = json.loads(dumps_json({"x": math.inf, "y": [1, 2.5, None]}))
        assert data == {"x": math.inf, "y": [1, 2.5, None]}

    def test_no_csv_form(self):
        with pytest.raises(TypeError):
            dumps_csv({"a": 1})


class TestCLI:
    def test_check(self, dict_path, capsys):
        assert cli.main(["check", "--input", str(dict_path)]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["report"]["prc_holds"] is True
        assert data["degrees"]["gamma0"] == pytest.approx(45.0)

    def test_bound_matches_library(self, capsys):
        assert cli.main(["bound", "--D", "50", "--d0", "2", "--rho0", "100", "--lambda", "1"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["bound"] == drc_probability_bound(RandomModelParams(50, 2, 200, 1.0))

    def test_recover(self, dict_path, capsys):
        assert cli.main(["recover", "--input", str(dict_path), "--method", "omp",
                         "--b", "1,2,0"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["signals"][0]["result"]["support"] == [0, 1]
        assert data["signals"][0]["subspace_sparse"] is True

    def test_mc_csv(self, tmp_path):
        out = tmp_path / "mc.csv"
        assert cli.main(["mc", "--D", "20", "--d0", "2", "--s0", "10", "--trials", "6",
                         "--format", "csv", "-o", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 7

    def test_parallel_same_bytes(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SUBSPARSE_THREADS", "2")
        args = ["mc", "--D", "20", "--d0", "2", "--s0", "10", "--trials", "6", "--seed", "3"]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert cli.main(args + ["-o", str(a)]) == 0
        assert cli.main(args + ["--parallel", "-o", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_gen_then_check(self, tmp_path):
        path = tmp_path / "g.json"
        assert cli.main(["gen", "--D", "10", "--d0", "2", "--s0", "6", "-o", str(path)]) == 0
        assert cli.main(["check", "--input", str(path), "-o", str(tmp_path / "r.json")]) == 0

    def test_src(self, tmp_path):
        out = tmp_path / "src.csv"
        assert cli.main(["src", "--D", "20", "--dims", "2,2", "--counts", "10,10",
                         "--queries", "3", "--format", "csv", "-o", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "query_id,true_group,method,predicted,single_group"
        assert len(lines) == 1 + 2 * 3 * 2

    def test_missing_input_exit_1(self, tmp_path, capsys):
        assert cli.main(["check", "--input", str(tmp_path / "nope.json")]) == 1
        assert "nope.json" in capsys.readouterr().err

    def test_schema_error_names_field(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"D": 2, "atoms": [[3.0, 0.0]]}))
        assert cli.main(["check", "--input", str(path)]) == 1
        assert "atoms" in capsys.readouterr().err

    def test_domain_error_exit_1(self, capsys):
        assert cli.main(["bound", "--D", "50", "--d0", "6", "--rho0", "10"]) == 1
        assert "sqrt" in capsys.readouterr().err

    def test_resource_error_exit_2(self, tmp_path, capsys):
        path = tmp_path / "g.json"
        assert cli.main(["gen", "--D", "10", "--d0", "3", "--s0", "30", "-o", str(path)]) == 0
        code = cli.main(["check", "--input", str(path), "--vertex-method", "enumerate",
                         "--budget", "10"])
        assert code == 2
        err = capsys.readouterr().err
        assert "cap 10" in err and "required" in err

    def test_bad_output_dir_exit_2(self, dict_path):
        assert cli.main(["check", "--input", str(dict_path), "-o", "/no/such/dir/x.json"]) == 2
