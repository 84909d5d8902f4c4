import json

from paradp.laws import LawReport, check_dp_laws, check_instance_laws, check_monad_laws
from paradp.dp import identity_dp
from paradp.para import include
from paradp.poset import chain


def test_dp_laws_small_run():
    report = check_dp_laws(samples=40, seed=1, exhaustive=False)
    assert report.ok
    names = {r.law for r in report.results}
    assert {"associativity", "interchange", "snake_left", "snake_right", "symmetry_involution", "compose_monotone"} <= names


def test_report_serializes():
    report = check_monad_laws("powerset", samples=10, seed=0)
    doc = report.as_dict()
    json.dumps(doc)
    assert all(r.checked > 0 for r in report.results)
    assert report.get(report.results[0].name) is report.results[0]


def test_reports_are_deterministic():
    a = check_monad_laws("distribution", samples=20, seed=7).as_dict()
    b = check_monad_laws("distribution", samples=20, seed=7).as_dict()
    assert a == b


def test_extend_and_failed():
    r = LawReport()
    r.extend(check_monad_laws("interval", samples=20, seed=0, corrupt=True))
    r.extend(check_monad_laws("identity", samples=5, seed=0))
    assert not r.ok
    assert all(f.name.startswith("monad.interval") for f in r.failed())


def test_instance_laws():
    p = chain((0, 1, 2), "P")
    d = identity_dp(p)
    report = check_instance_laws("powerset", {"d": d}, {"c": include("powerset", d)}, {"P": p})
    assert report.ok
