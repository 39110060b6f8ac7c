import json
import subprocess
import sys

import numpy as np
import pytest

from ergolab import cli
from ergolab.harmonic import GroupFunction, group_function_to_csv


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def fcsv(tmp_path, rng):
    path = tmp_path / "f.csv"
    group_function_to_csv(GroupFunction.random(16, rng), path)
    return path


class TestGowers:
    def test_three_agreeing_values(self, capsys, fcsv):
        code, out, _ = run(["gowers", "--N", "16", "--k", "2", "--input", str(fcsv)], capsys)
        assert code == 0
        rows = dict(line.split(",") for line in out.splitlines()[1:])
        vals = [float(rows[m]) for m in ("recursive", "closed", "fourier")]
        assert max(vals) - min(vals) < 1e-12

    def test_constant(self, capsys):
        code, out, _ = run(["gowers", "--N", "8", "--k", "1", "--const", "1", "--format", "json"], capsys)
        assert code == 0
        assert json.loads(out)["values"] == {"recursive": 1.0, "closed": 1.0}

    def test_malformed_csv(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("index,re,im\n0,1,0\n1,oops,0\n")
        code, _, err = run(["gowers", "--k", "2", "--input", str(bad)], capsys)
        assert code == 2
        assert "row 3" in err and "replay: ergolab gowers" in err

    def test_size_mismatch(self, capsys, fcsv):
        code, _, err = run(["gowers", "--N", "8", "--input", str(fcsv)], capsys)
        assert code == 2

    def test_budget_flag_and_env(self, capsys, monkeypatch):
        code, _, err = run(["gowers", "--N", "300", "--k", "3", "--budget", "1000000"], capsys)
        assert code == 3 and "replay:" in err
        monkeypatch.setenv("ERGOLAB_BUDGET", "100")
        code, _, _ = run(["gowers", "--N", "10", "--k", "2"], capsys)
        assert code == 3

    def test_disagreement_is_property_failure(self, capsys, monkeypatch):
        real = cli.gw.gowers_norm_recursive
        monkeypatch.setattr(cli.gw, "gowers_norm_recursive", lambda f, k: real(f, k) + 1e-6)
        code, out, err = run(["gowers", "--N", "12", "--k", "2"], capsys)
        assert code == 1
        assert "disagree" in err and "replay: ergolab gowers --N 12 --k 2" in err
        assert out.startswith("method,value")


class TestOtherCommands:
    def test_ap_json(self, capsys):
        code, out, _ = run(["ap", "--N", "32", "--ell", "3", "--set", "0,4,8"], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["nondegenerate_count"] == 2 and rep["set_size"] == 3
        assert rep["inclusive_count"] == 5

    def test_ap_bad_set(self, capsys):
        code, _, _ = run(["ap", "--N", "5", "--set", "0,x"], capsys)
        assert code == 2

    def test_nil_series(self, capsys):
        code, out, _ = run(["nil", "--system", "skew", "--alpha", "golden", "--steps", "100000",
                            "--observable", "e_y"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "N,re,im,abs"
        assert lines[-1].startswith("100000,")

    def test_nil_orbit_exact_rational(self, capsys):
        code, out, _ = run(["nil", "--alpha", "1/4", "--start", "0,0", "--dump", "orbit", "--steps", "3"], capsys)
        assert out.splitlines() == ["n,x,y", "0,0,0", "1,0.25,0.25", "2,0.5,0"]

    def test_heisenberg_orbit(self, capsys):
        code, out, _ = run(["nil", "--system", "heisenberg", "--t", "0,0,1/2", "--start", "0,0,0",
                            "--dump", "orbit", "--steps", "3"], capsys)
        assert out.splitlines() == ["n,x,y,z", "0,0,0,0", "1,0,0,0.5", "2,0,0,0"]

    def test_avg_cubic(self, capsys):
        code, out, _ = run(["avg", "--mode", "cubic", "--k", "2", "--N", "64"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "N,value_re,value_im,l2_norm,cauchy_tail"
        assert lines[-1].startswith("64,")

    def test_avg_polynomial_orbit(self, capsys):
        code, out, _ = run(["avg", "--mode", "polynomial", "--k", "2", "--system", "skew",
                            "--observable", "e_x", "--steps", "1000", "--poly", "0,1;0,0,1"], capsys)
        assert code == 0 and out.splitlines()[-1].startswith("1000,")

    def test_cube_seminorm_and_measure(self, capsys):
        code, out, _ = run(["cube", "--N", "6", "--k", "3", "--format", "json"], capsys)
        vals = json.loads(out)["values"]
        assert code == 0 and max(vals.values()) - min(vals.values()) < 1e-12
        code, out, _ = run(["cube", "--N", "2", "--k", "1", "--dump", "measure"], capsys)
        assert out.splitlines()[0] == "x_0,x_1,weight"

    def test_unknown_flag_is_input_error(self, capsys):
        code, _, _ = run(["gowers", "--bogus"], capsys)
        assert code == 2


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["gowers", "--N", "20", "--k", "3", "--seed", "11"],
        ["nil", "--steps", "5000", "--seed", "4"],
        ["avg", "--N", "9", "--k", "3", "--seed", "5"],
        ["avg", "--system", "heisenberg", "--observable", "e_z", "--steps", "3000", "--seed", "2"],
    ])
    def test_bit_identical_outputs(self, tmp_path, argv):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        assert cli.main(argv + ["--output", str(a)]) == 0
        assert cli.main(argv + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_seed_changes_output(self, tmp_path):
        a, b = tmp_path / "a.out", tmp_path / "b.out"
        cli.main(["nil", "--steps", "50", "--seed", "1", "--output", str(a)])
        cli.main(["nil", "--steps", "50", "--seed", "2", "--output", str(b)])
        assert a.read_bytes() != b.read_bytes()


class TestVerify:
    def test_single_property(self, capsys):
        code, out, _ = run(["verify", "--quick", "--property", "parseval"], capsys)
        assert code == 0
        assert out.startswith("PASS parseval")

    def test_corrupted_tolerance_fails_with_replay(self, capsys, tmp_path):
        report = tmp_path / "report.json"
        code, out, _ = run(["verify", "--quick", "--tol", "1e-15", "--seed", "7",
                            "--property", "heisenberg_group_axioms", "--output", str(report)], capsys)
        assert code == 1
        assert "FAIL heisenberg_group_axioms" in out
        assert "replay: ergolab verify --seed 7 --property heisenberg_group_axioms --case" in out
        failure = json.loads(report.read_text())[0]["failure"]
        assert failure["instance"]["g"]

    def test_replayed_case_reproduces_gap(self, capsys):
        from ergolab import verify as vf
        full = vf.run_battery(seed=3, quick=True, tol=1e-15, names=["coset_canonicity"])[0]
        case = full.failure["case"]
        again = vf.run_battery(seed=3, quick=True, tol=1e-15, names=["coset_canonicity"], only_case=case)[0]
        assert again.worst_gap == full.failure["gap"]

    def test_unknown_property(self, capsys):
        code, _, _ = run(["verify", "--property", "nope"], capsys)
        assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ergolab", "ap", "--N", "4", "--ell", "3", "--set", "0,2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["nondegenerate_count"] == 2


def test_quick_battery_exit_code_and_time():
    import time
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "ergolab", "verify", "--seed", "7", "--quick"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout
    assert time.perf_counter() - t0 < 30
    assert proc.stdout.count("PASS") == len(proc.stdout.splitlines()) - 1


def test_quick_battery_corrupted_tolerance():
    proc = subprocess.run([sys.executable, "-m", "ergolab", "verify", "--seed", "7", "--quick", "--tol", "1e-15"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "FAIL" in proc.stdout and "replay: ergolab verify" in proc.stdout
