"""Exit-code and report-format contract of the command-line tool."""

import json
import os
import subprocess
import sys

BIN = os.environ["DLAMBDA_BIN"]
FIX = os.environ["DLAMBDA_FIXTURES"]


def run(*args):
    return subprocess.run([BIN, *args], capture_output=True, text=True)


def test_check_pass_exit0():
    r = run("check", f"{FIX}/ex2.scheme", "--phi", "1", "--chi", "1+h*u[0]")
    assert r.returncode == 0, r.stdout + r.stderr
    assert "PASS" in r.stdout


def test_check_fail_exit2():
    r = run("check", f"{FIX}/ex2.scheme", "--phi", "1", "--chi", "1")
    assert r.returncode == 2, r.stdout + r.stderr
    assert "FAIL" in r.stdout


def test_check_lambda_option():
    r = run("check", f"{FIX}/ex2.scheme", "--lambda", "log(1+h*u[0])/h")
    assert r.returncode == 0, r.stdout + r.stderr


def test_malformed_expression_exit1():
    r = run("check", f"{FIX}/ex2.scheme", "--chi", "1+h*(u[0]")
    assert r.returncode == 1
    assert "column" in r.stderr or "line" in r.stderr


def test_missing_chi_and_lambda_exit1():
    r = run("check", f"{FIX}/ex2.scheme")
    assert r.returncode == 1


def test_find_reports_the_unique_solution():
    r = run("find", f"{FIX}/ex2.scheme", "--chi-degree", "1", "--emit", "json")
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads(r.stdout)
    assert rep["schema_version"] == 1
    sols = rep["results"]["solutions"]
    assert len(sols) == 1
    assert sols[0]["chi"] == "h*u[0] + 1"
    assert sols[0]["exact"] is True


def test_find_none_is_still_a_successful_run():
    r = run("find", f"{FIX}/ex2.scheme", "--chi-degree", "0", "--emit", "json")
    assert r.returncode == 0
    rep = json.loads(r.stdout)
    assert rep["results"]["count"] == 0
    assert "none found" in rep["results"]["note"]


def test_find_trivial_scheme_degree0():
    r = run("find", f"{FIX}/trivial.scheme", "--chi-degree", "0", "--emit", "json")
    assert r.returncode == 0
    rep = json.loads(r.stdout)
    assert [s["chi"] for s in rep["results"]["solutions"]] == ["1"]


def test_reduce_ex2():
    r = run("reduce", f"{FIX}/ex2.scheme", "--chi", "1+h*u[0]", "--emit", "json")
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads(r.stdout)
    assert rep["results"]["invariant"] == "-h*u[0]^2/2 - u[0] + u[1]"
    assert rep["results"]["reduced_map"] == "-h*v^2/2 + v"
    assert rep["results"]["map_symbolic"] is True


def test_reduce_wrong_chi_exit2():
    r = run("reduce", f"{FIX}/ex2.scheme", "--chi", "1", "--emit", "json")
    assert r.returncode == 2
    rep = json.loads(r.stdout)
    assert "not reducible" in rep["results"]["error"]


def test_reduce_ex1_conservation():
    r = run("reduce", f"{FIX}/ex1_exp.scheme", "--chi", "1+h*f'[0](u[0])", "--h-value", "0.05",
            "--emit", "json")
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads(r.stdout)
    assert rep["results"]["reduced_map"] == "v"


def test_limit_fixture_and_usage_error():
    r = run("limit", "--lambda", "u", "--chi", "1+h*u", "--emit", "json")
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads(r.stdout)
    ratios = rep["checks"][0]["ratios"]
    assert all(1.6 <= x <= 2.4 for x in ratios)

    r1 = run("limit", "--lambda", "u", "--levels", "1")
    assert r1.returncode == 1


def test_limit_lambda_zero_exact():
    r = run("limit", "--lambda", "0", "--emit", "json")
    assert r.returncode == 0
    rep = json.loads(r.stdout)
    assert rep["checks"][0]["exact"] is True


def test_evolve_csv():
    r = run("evolve", f"{FIX}/ex2.scheme", "--init", "0.5,0.55", "--steps", "30",
            "--chi", "1+h*u[0]")
    assert r.returncode == 0, r.stdout + r.stderr
    lines = r.stdout.strip().splitlines()
    assert lines[0] == "n,u_n,v_n"
    assert len(lines) == 33  # header + 2 initial values + 30 steps
    first = lines[1].split(",")
    assert first[0] == "0" and abs(float(first[1]) - 0.5) < 1e-15
    assert lines[-1].endswith(",")  # v_n needs u_{n+1}, absent on the last row


def test_json_reports_are_deterministic():
    a = run("find", f"{FIX}/ex2.scheme", "--chi-degree", "1", "--emit", "json",
            "--seed", "42")
    b = run("find", f"{FIX}/ex2.scheme", "--chi-degree", "1", "--emit", "json",
            "--seed", "42")
    ja, jb = json.loads(a.stdout), json.loads(b.stdout)
    ja.pop("wall_ms")
    jb.pop("wall_ms")
    assert json.dumps(ja, sort_keys=False) == json.dumps(jb, sort_keys=False)


def test_missing_file_exit1():
    r = run("check", "/nonexistent.scheme", "--chi", "1")
    assert r.returncode == 1


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"[PASS] {name}")
            except AssertionError as e:
                print(f"[FAIL] {name}: {e}")
                failures += 1
    sys.exit(failures)
