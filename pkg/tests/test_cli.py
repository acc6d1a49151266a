import json
import subprocess
import sys

import pytest

from modalip.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


MODEL = {"worlds": ["a", "b"], "edges": [["a", "b"]], "valuation": {"p": ["b"]}, "point": "a"}


class TestFormulaCommands:
    def test_parse_json(self, capsys):
        code, out, _ = run(capsys, "parse", "--format", "json", "<>p & [](p|q)")
        data = json.loads(out)
        assert code == 0
        assert data["signature"] == ["p", "q"]
        assert data["polarity"] == {"positive": ["p", "q"], "negative": []}

    def test_global_flag_before_command(self, capsys):
        code, out, _ = run(capsys, "--json", "nnf", "~<>p")
        assert code == 0 and json.loads(out)["formula"] == "[]~p"

    def test_nabla_nf(self, capsys):
        code, out, _ = run(capsys, "nabla-nf", "[]p")
        assert code == 0 and "nabla" in out

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "parse", "p &")
        assert code == 2 and "parse error" in err

    def test_usage_errors(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2
        assert run(capsys, "parse", "--json", "--format", "text", "p")[0] == 2
        assert run(capsys, "parse", "--format", "csv", "p")[0] == 2

    def test_file_input(self, capsys, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("<>p\n")
        code, out, _ = run(capsys, "nnf", f"@{path}")
        assert code == 0 and out.strip() == "<>p"
        assert run(capsys, "nnf", f"@{tmp_path / 'missing'}")[0] == 2


class TestDecisionCommands:
    def test_sat(self, capsys):
        assert run(capsys, "sat", "p & ~p")[1].strip() == "UNSAT"
        assert run(capsys, "sat", "p & ~p")[0] == 1
        code, out, _ = run(capsys, "sat", "<>(p & q)")
        assert code == 0 and out.strip() == "SAT"

    def test_sat_explain_is_deterministic(self, capsys):
        a = run(capsys, "sat", "--explain", "--seed", "3", "<>p & []~p")
        b = run(capsys, "sat", "--explain", "--seed", "3", "<>p & []~p")
        assert a == b and "DiamondUnwitnessed" in a[1]

    def test_valid(self, capsys):
        assert run(capsys, "valid", "[]p & []q", "[](p & q)")[0] == 0
        code, out, _ = run(capsys, "valid", "--json", "<>p", "[]p")
        assert code == 1 and json.loads(out)["countermodel"]["worlds"]
        assert run(capsys, "valid", "p | ~p")[0] == 0

    def test_max_types_guard(self, capsys):
        code, _, err = run(capsys, "sat", "--max-types", "1", "<>p")
        assert code == 3 and "limit" in err


class TestInterpolate:
    def test_nabla(self, capsys):
        code, out, _ = run(capsys, "interpolate", "--method", "nabla", "<>(p&q)", "<>(p|r)")
        assert code == 0
        assert "verified: left=True right=True signature=True" in out

    def test_all_methods(self, capsys):
        code, out, _ = run(capsys, "interpolate", "--method", "all", "[]p & []q", "[](p & q | r)")
        assert code == 0 and "all methods equivalent: True" in out

    def test_report_json(self, capsys):
        code, out, _ = run(capsys, "interpolate", "--json", "--report", "<>(p&q)", "<>(p|r)")
        data = json.loads(out)
        assert code == 0
        assert set(data["report"]) >= {"left_valid", "right_valid", "signature_ok", "lyndon_ok", "sizes"}

    def test_invalid(self, capsys):
        code, out, _ = run(capsys, "interpolate", "<>p", "[]p")
        assert code == 1 and out.startswith("INVALID")


class TestOtherCommands:
    def test_uniform(self, capsys):
        code, out, _ = run(capsys, "uniform", "<>(p & q)", "--keep", "p")
        assert code == 0 and "q" not in out

    def test_check_model(self, capsys, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(MODEL))
        assert run(capsys, "check-model", str(path), "<>p")[1].strip() == "TRUE"
        assert run(capsys, "check-model", json.dumps(MODEL), "[]~p")[0] == 1
        assert run(capsys, "check-model", f"@{path}", "p", "--world", "b")[0] == 0

    def test_bisim(self, capsys):
        other = {"worlds": ["x", "y", "z"], "edges": [["x", "y"], ["x", "z"]],
                 "valuation": {"p": ["y", "z"]}, "point": "x"}
        code, out, _ = run(capsys, "bisim", json.dumps(MODEL), json.dumps(other))
        assert code == 0 and out.strip() == "BISIMILAR"
        other["valuation"]["p"] = ["y"]
        code, out, _ = run(capsys, "bisim", json.dumps(MODEL), json.dumps(other), "--letters", "p")
        assert code == 1 and out.strip() == "NOT BISIMILAR"

    def test_prove(self, capsys):
        code, out, _ = run(capsys, "prove", "--explain", "[]p, []q => [](p & q)")
        assert code == 0 and "R_box" in out
        assert run(capsys, "prove", "p => q")[0] == 1
        code, out, _ = run(capsys, "prove", "[]p & []q", "[](p & q | r)")
        assert code == 0 and "interpolant:" in out

    def test_bench(self, capsys):
        code, out, _ = run(capsys, "bench", "lower-bound", "--n", "1", "--method", "all", "--format", "json")
        rows = json.loads(out)
        assert code == 0 and len(rows) == 4 and all(r["verified"] for r in rows)
        code, out, _ = run(capsys, "bench", "lower-bound", "--n", "1", "--method", "nabla", "--format", "csv")
        assert code == 0 and out.splitlines()[0] == "n,method,size_string,size_dag,millis,verified"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modalip", "sat", "p"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "SAT"


@pytest.mark.parametrize("argv", [["--help"], ["sat", "--help"]])
def test_help(capsys, argv):
    assert run(capsys, *argv)[0] == 0
