import pytest

from isolab.cli import csv_text
from isolab.density import Density
from isolab.errors import IsolabError
from isolab.suites import COLUMNS, SUITES, random_cap_union, run_suite
from isolab.sampling import instance_rng

SMALL = {"hermite": 20, "linear": 3, "riccati": 3, "bvp": 3, "symmetrization": 5, "isoperimetric": 1}


@pytest.mark.parametrize("name", SUITES)
def test_small_suites_pass(name):
    kw = {"trials": 4} if name == "isoperimetric" else {}
    res = run_suite(name, n=SMALL[name], seed=5, **kw)
    assert res.passed, res.failures[:3]
    assert res.checks
    assert all(set(r) == set(COLUMNS) for r in res.rows)
    s = res.summary()
    assert s["passed"] and s["failing"] == [] and s["count"] == SMALL[name]


@pytest.mark.parametrize("name", ["hermite", "bvp", "symmetrization"])
def test_same_seed_same_bytes(name):
    a = csv_text(COLUMNS, run_suite(name, n=SMALL[name], seed=9).rows)
    b = csv_text(COLUMNS, run_suite(name, n=SMALL[name], seed=9).rows)
    c = csv_text(COLUMNS, run_suite(name, n=SMALL[name], seed=10).rows)
    assert a == b
    assert a != c


def test_worker_count_does_not_change_output(monkeypatch):
    one = csv_text(COLUMNS, run_suite("hermite", n=12, seed=2).rows)
    monkeypatch.setenv("ISOLAB_THREADS", "2")
    two = csv_text(COLUMNS, run_suite("hermite", n=12, seed=2).rows)
    assert one == two


def test_instance_prefix_is_stable():
    # instance i does not depend on the requested count
    short = [r for r in run_suite("bvp", n=2, seed=4).rows if r["instance"] >= 0]
    long = [r for r in run_suite("bvp", n=4, seed=4).rows if 0 <= r["instance"] < 2]
    assert short == long


def test_hermite_reports_equality_only_for_zero_coefficient():
    res = run_suite("hermite", n=30, seed=1)
    eq = [r for r in res.rows if r["statement"].endswith("-equality-case")]
    assert eq and all(r["passed"] for r in eq)
    assert res.info["equality_cases"] >= 2  # the zero-coefficient control


def test_user_density_runs():
    d = Density("linear", (0.5,), 0.0)
    assert run_suite("hermite", density=d, a=1.0, b=2.0).passed
    assert run_suite("linear", n=2, density=d).passed
    assert run_suite("symmetrization", n=2, density=d).passed
    with pytest.raises(IsolabError):
        run_suite("isoperimetric", n=1, density=d)
    with pytest.raises(IsolabError):
        run_suite("nonsense")


def test_random_cap_unions_are_disjoint():
    for i in range(20):
        assert random_cap_union(instance_rng(3, i, 5)).disjoint
