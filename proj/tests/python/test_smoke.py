"""Smoke tests for the python module: the main operations end to end."""

import os

import dlambda

FIX = os.environ.get("DLAMBDA_FIXTURES", os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"))


def test_version():
    assert dlambda.__version__


def test_expr_roundtrip_and_algebra():
    e = dlambda.parse("(u[1]-2*u[0]+u[-1])/h^2")
    assert "u[1]" in str(e)
    n = dlambda.parse("(u[0]+1)^2 - u[0]^2 - 2*u[0] - 1").normalize()
    assert str(n) == "0"
    d = dlambda.parse("u[0]^2").diff("u[0]")
    assert d.equal_to(dlambda.parse("2*u[0]"))
    s = dlambda.parse("1+h*u[0]").shift(-1)
    assert s.equal_to(dlambda.parse("1+h*u[-1]"))
    v = dlambda.parse("1+h*u[0]").evaluate({"h": 0.1, "u[0]": 0.5})
    assert abs(v - 1.05) < 1e-15


def test_scheme_and_check():
    s = dlambda.load_scheme_file(f"{FIX}/ex2.scheme")
    assert s.name == "ex2"
    assert s.a == 1 and s.b == 1
    rep = dlambda.check(s, chi="1+h*u[0]")
    assert rep["pass"] is True
    rep2 = dlambda.check(s, chi="1")
    assert rep2["pass"] is False
    assert rep2["checks"][0]["max_residual"] >= 1e-4


def test_find():
    s = dlambda.load_scheme_file(f"{FIX}/ex2.scheme")
    rep = dlambda.find(s, 1)
    sols = rep["results"]["solutions"]
    assert len(sols) == 1
    assert sols[0]["chi"] == "h*u[0] + 1"
    assert sols[0]["exact"] is True


def test_reduce():
    s = dlambda.load_scheme_file(f"{FIX}/ex2.scheme")
    rep = dlambda.reduce(s, "1+h*u[0]")
    assert rep["pass"] is True
    assert rep["results"]["reduced_map"] == "-h*v^2/2 + v"
    assert rep["checks"][0]["max_deviation"] <= 1e-10


def test_limit():
    rep = dlambda.limit("u", chi="1+h*u")
    assert rep["pass"] is True
    assert all(1.6 <= r <= 2.4 for r in rep["checks"][0]["ratios"])
