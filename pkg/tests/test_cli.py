import json
import subprocess
import sys

import jsonschema
import pytest

from fifam.canon import canonical_form
from fifam.cli import EXIT_INCOMPLETE, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, REPORT_SCHEMA, main
from fifam.constructions import bisection_max, hadamard_family
from fifam.formats import read_family, write_family


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, "--format", "structured", *argv)
    rep = json.loads(out)
    jsonschema.validate(rep, REPORT_SCHEMA)
    assert rep["exit_code"] == code
    return code, rep


@pytest.fixture
def bmax6(tmp_path):
    p = tmp_path / "b6.txt"
    write_family(bisection_max(6), p)
    return str(p)


@pytest.fixture
def had4(tmp_path):
    p = tmp_path / "h4.txt"
    write_family(hadamard_family(4), p)
    return str(p)


class TestVerify:
    def test_ok(self, capsys, bmax6):
        code, rep = run_json(capsys, "verify", bmax6, "--r", "3")
        assert code == EXIT_OK and rep["outputs"]["ok"]

    def test_hadamard_triple(self, capsys, had4):
        code, rep = run_json(capsys, "verify", had4, "--r", "3")
        assert code == EXIT_VIOLATION
        assert len(rep["outputs"]["witness"]) == 3

    def test_hadamard_pairs_ok(self, capsys, had4):
        assert run(capsys, "verify", had4, "--r", "2")[0] == EXIT_OK

    def test_duplicate_set(self, capsys, tmp_path):
        p = tmp_path / "dup.txt"
        p.write_text("n=4 r=3 theta=1/2\n1 2\n1 3\n2 1\n")
        code, rep = run_json(capsys, "verify", str(p))
        assert code == EXIT_INPUT and "line 4" in rep["outputs"]["error"]

    def test_decimal_theta_rejected(self, capsys, bmax6):
        with pytest.raises(SystemExit) as exc:
            main(["verify", bmax6, "--theta", "0.5"])
        assert exc.value.code == EXIT_INPUT

    def test_min_set_size(self, capsys, bmax6):
        code, rep = run_json(capsys, "verify", bmax6, "--min-set-size", "3")
        assert code == EXIT_VIOLATION and rep["outputs"]["reason"] == "undersized"


class TestAnalyze:
    def test_bisection_max8(self, capsys, tmp_path):
        p = tmp_path / "b8.txt"
        write_family(bisection_max(8), p)
        code, rep = run_json(capsys, "analyze", str(p))
        st = rep["outputs"]["structure"]
        assert code == EXIT_OK and st["S_nor"] == [2, 4]
        F = bisection_max(8)
        assert F.as_lists()[st["E_nor"]] == [1, 2]
        assert all(c["passed"] for c in rep["outputs"]["audit"]["checks"])

    def test_chain(self, capsys, tmp_path):
        path = str(tmp_path / "c.txt")
        assert main(["construct", "chain", "--n", "10", "--out", path]) == EXIT_OK
        capsys.readouterr()
        code, rep = run_json(capsys, "analyze", path)
        st = rep["outputs"]["structure"]
        assert code == EXIT_OK and st["S_nor"] == [2, 4] and st["S_exc"] == [6]

    def test_refusal(self, capsys, had4):
        code, rep = run_json(capsys, "analyze", had4)
        assert code == EXIT_VIOLATION and "refused" in rep["outputs"]

    def test_text_output(self, capsys, bmax6):
        code, out = run(capsys, "analyze", bmax6)
        assert code == EXIT_OK and "S_nor  [2, 4]" in out and "FAIL" not in out


class TestConstruct:
    @pytest.mark.parametrize("argv,count", [
        (["bisection-max", "--n", "10"], 13),
        (["hadamard", "--m", "4"], 10),
        (["chain", "--n", "30", "--theta", "1/3"], 4),
        (["layered", "--n", "10", "--theta", "1/3", "--layers", "3:max"], 4),
    ])
    def test_counts(self, capsys, tmp_path, argv, count):
        out = tmp_path / "f.txt"
        code, _ = run(capsys, "construct", *argv, "--out", str(out))
        assert code == EXIT_OK and len(read_family(out)) == count

    def test_stdout_is_text_family(self, capsys):
        code, out = run(capsys, "construct", "bisection-max", "--n", "4")
        assert code == EXIT_OK and out.splitlines()[0] == "n=4 r=3 theta=1/2"

    def test_bad_params(self, capsys):
        assert run(capsys, "construct", "imin", "--n", "20", "--k", "5")[0] == EXIT_INPUT
        assert run(capsys, "construct", "bisection-max")[0] == EXIT_INPUT

    @pytest.mark.parametrize("argv", [
        ["bisection-max", "--n", "9"],
        ["layered", "--n", "12", "--theta", "1/2", "--layers", "2:2,4:max"],
        ["two-layer", "--n", "14", "--theta", "2/5"],
        ["two-layer", "--n", "20", "--theta", "3/4"],
        ["three-layer", "--n", "20", "--theta", "1/3"],
        ["three-layer", "--n", "24", "--theta", "1/4"],
        ["imin", "--n", "20", "--k", "4"],
        ["chain", "--n", "40", "--theta", "2/5"],
    ])
    @pytest.mark.parametrize("fmt", ["text", "structured"])
    def test_round_trip(self, capsys, tmp_path, argv, fmt):
        path = str(tmp_path / "fam")
        assert main(["--format", fmt, "construct", *argv, "--out", path]) == EXIT_OK
        assert main(["verify", path]) == EXIT_OK
        assert main(["analyze", path]) == EXIT_OK
        capsys.readouterr()

    def test_hadamard_round_trip_stops_at_analyze(self, capsys, tmp_path):
        path = str(tmp_path / "h")
        assert main(["construct", "hadamard", "--m", "4", "--out", path]) == EXIT_OK
        assert main(["verify", path]) == EXIT_OK  # written with r = 2
        assert main(["analyze", path]) == EXIT_VIOLATION
        capsys.readouterr()


class TestBound:
    def test_bisection(self, capsys):
        code, rep = run_json(capsys, "bound", "--n", "6", "--theta", "1/2")
        assert code == EXIT_OK and rep["outputs"]["value"] == 7
        assert {m["case"] for m in rep["outputs"]["main"]} == {"3a", "3b"}

    def test_case_one(self, capsys):
        _, rep = run_json(capsys, "bound", "--n", "10", "--theta", "2/3")
        assert rep["outputs"]["value"] == 10

    def test_case_two(self, capsys):
        _, rep = run_json(capsys, "bound", "--n", "20", "--theta", "2/5")
        (main_rep,) = rep["outputs"]["main"]
        assert main_rep["case"] == "2" and abs(main_rep["value"] - 23.99548878) < 1e-6

    def test_text(self, capsys):
        code, out = run(capsys, "bound", "--n", "20", "--theta", "2/5")
        assert "case 2" in out and "23.995489" in out


class TestSearch:
    def test_enumerate_n4(self, capsys):
        code, rep = run_json(capsys, "search", "--n", "4", "--theta", "1/2", "--r", "3",
                             "--min-set-size", "2", "--enumerate")
        assert code == EXIT_OK
        assert rep["outputs"]["max_size"] == 4 and rep["outputs"]["classes"] == 1

    def test_enumerate_n6(self, capsys):
        _, rep = run_json(capsys, "search", "--n", "6", "--min-set-size", "2", "--enumerate")
        assert rep["outputs"]["max_size"] == 7 and rep["outputs"]["classes"] == 1
        assert rep["outputs"]["witnesses"][0] == canonical_form(bisection_max(6)).as_lists()

    def test_budget_incomplete(self, capsys):
        code, rep = run_json(capsys, "search", "--n", "9", "--min-set-size", "2", "--budget", "10^3")
        assert code == EXIT_INCOMPLETE and not rep["outputs"]["complete"]

    def test_above_limit_without_budget(self, capsys):
        assert run(capsys, "search", "--n", "9")[0] == EXIT_INPUT

    def test_chain(self, capsys):
        _, rep = run_json(capsys, "search", "--n", "6", "--min-set-size", "2", "--chain")
        assert rep["outputs"]["max_size"] == 3

    def test_report_file(self, capsys, tmp_path):
        out = tmp_path / "rep.json"
        run(capsys, "search", "--n", "4", "--format", "structured", "--out", str(out))
        jsonschema.validate(json.loads(out.read_text()), REPORT_SCHEMA)


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_INPUT


def test_module_entry_point(tmp_path):
    p = tmp_path / "b.txt"
    write_family(bisection_max(5), p)
    proc = subprocess.run([sys.executable, "-m", "fifam.cli", "verify", str(p)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "ok" in proc.stdout
