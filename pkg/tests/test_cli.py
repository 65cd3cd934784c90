import json
import subprocess
import sys

import pytest

from gl2cherednik.cli import RunConfig, UsageError, emit, expected_character, expected_hilbert, main, verify_theorem
from gl2cherednik.k0ring import HilbertSeries


def run_json(capsys, *argv):
    code = main([*argv, "--output", "json"])
    return code, json.loads(capsys.readouterr().out)


class TestEmit:
    def test_empty_character(self):
        out = json.loads(emit({"character": []}, "json"))
        assert out == {"character": [], "schema": 1}

    def test_round_trip(self):
        rec = {"p": 3, "hilbert": [2, 3, 2], "character": [{"z": 0, "terms": [{"i": 1, "j": 0, "mult": 1}]}]}
        assert {k: v for k, v in json.loads(emit(rec, "json")).items() if k != "schema"} == rec

    def test_table(self):
        text = emit({"p": 3, "hilbert": [2, 3, 2],
                     "character": [{"z": 1, "terms": [{"i": 2, "j": 1, "mult": 2}]}]}, "table")
        assert "hilbert: 2 + 3z + 2z^2" in text
        assert "z^1: 2[S^2 h (x) det^1]" in text
        assert str(HilbertSeries.of([2, 3, 2])) == "2 + 3z + 2z^2"


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(p=4), dict(p=2), dict(p=3, t=2), dict(p=3, i=3),
                                        dict(p=5, j=4), dict(p=3, backend="fast")])
    def test_rejects(self, kwargs):
        with pytest.raises(UsageError):
            RunConfig(**kwargs)

    def test_auto_policy(self):
        assert RunConfig(p=3, t=1, i=1).generic_backend().mode.value == "exact"
        assert RunConfig(p=3, t=1, i=2).generic_backend().mode.value == "random"
        assert RunConfig(p=5).generic_backend().mode.value == "random"

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["irred-char", "--p", "3", "--i", "5"])
        assert exc.value.code == 2


class TestCommands:
    def test_reflections(self, capsys):
        code, out = run_json(capsys, "reflections", "--p", "3", "--lambda", "2")
        assert code == 0 and out["total"] == 20 and out["schema"] == 1
        row = next(r for r in out["classes"] if r["lambda"] == 2)
        assert row["count"] == 12 and len(row["elements"]) == 12

    def test_invariants_and_det(self, capsys):
        code, out = run_json(capsys, "invariants", "--p", "5")
        assert code == 0 and out["degrees"] == [24, 20]
        code, out = run_json(capsys, "det-a", "--p", "3")
        assert code == 0 and out["identity_holds"] and out["expected"] == "-Q1"

    def test_k0_reduce(self, capsys):
        code, out = run_json(capsys, "k0-reduce", "--p", "5", "--a", "6")
        assert code == 0
        assert sorted((t["i"], t["j"], t["mult"]) for t in out["terms"]) == [(0, 1, 1), (2, 0, 1), (2, 2, 1)]

    def test_verma_char(self, capsys):
        code, out = run_json(capsys, "verma-char", "--p", "3", "--i", "0", "--degree", "2")
        assert code == 0 and out["verma_hilbert"] == [1, 2, 3] and out["baby_verma_dim"] == 48

    def test_singular(self, capsys):
        code, out = run_json(capsys, "singular", "--p", "3", "--i", "1", "--degree", "1")
        assert code == 0 and out["dimension"] == 1
        with pytest.raises(SystemExit):
            main(["singular", "--p", "3", "--i", "1", "--degree", "2", "--modulo", "nonsense"])

    def test_irred_char_seed_echo(self, capsys):
        code, out = run_json(capsys, "irred-char", "--p", "5", "--i", "1", "--backend", "random", "--seed", "9")
        assert code == 0 and out["hilbert"] == [2]
        assert out["backend"]["seed"] == 9 and out["backend"]["mode"] == "random"

    def test_irred_char_t1_reduced(self, capsys):
        code, out = run_json(capsys, "irred-char", "--p", "3", "--t", "1", "--i", "1")
        assert code == 0 and out["reduced_hilbert"] == [2, 3, 2]

    def test_irred_char_cap_is_failure(self, capsys):
        code, out = run_json(capsys, "irred-char", "--p", "3", "--i", "2", "--max-degree", "2")
        assert code == 1 and out["status"] == "inconclusive"

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "gl2cherednik", "det-a", "--p", "3"],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0 and "identity_holds: True" in proc.stdout


class TestVerifyTheorem:
    def test_closed_forms(self):
        assert expected_hilbert(5, 3).coeffs == (4, 5, 4)
        assert expected_hilbert(3, 2).total() == 48
        assert expected_character(5, 4, 1).hilbert().total() == 5 * 4 * 24

    def test_p3_t0(self):
        report = verify_theorem(RunConfig(p=3, t=0))
        assert report["ok"] and len(report["cells"]) == 6

    def test_skips_heavy_cells(self):
        report = verify_theorem(RunConfig(p=7, t=0, backend="random"), slow=False)
        assert report["cells"] == [] and len(report["skipped"]) == 42

    def test_exit_code_and_table(self, capsys):
        assert main(["verify-theorem", "--p", "3", "--jobs", "2"]) == 0
        out = capsys.readouterr().out
        assert out.count(") PASS") == 6 and out.rstrip().endswith("ALL PASS")
