import itertools

import pytest

from paradp.errors import InvalidValue, KindMismatch, PartialMap, UnorderedCarrier
from paradp.laws import check_monad_laws
from paradp.monad import (
    CorruptedIntervalMonad,
    KleisliMap,
    MonadKind,
    UncertainValue,
    bind,
    kleisli_compose,
    kleisli_identity,
    lift,
    monad,
    strength,
    total_variation,
    unit,
    values_equal,
)

KINDS = list(MonadKind)


def test_units():
    assert unit("powerset", "x") == UncertainValue.of_set(["x"])
    assert unit("interval", 3).payload == (3, 3)
    assert unit("distribution", "x").payload == (("x", 1.0),)
    assert unit("identity", "x").payload == "x"


def test_powerset_join_is_union():
    inner1 = UncertainValue.of_set(["P"])
    inner2 = UncertainValue.of_set(["P", "Q"])
    assert bind(UncertainValue.of_set([inner1, inner2]), lambda m: m) == UncertainValue.of_set(["P", "Q"])


def test_interval_join_end_points():
    outer = UncertainValue.of_interval(UncertainValue.of_interval(0, 1), UncertainValue.of_interval(2, 3))
    assert monad("interval").join(outer).payload == (0, 3)


def test_corrupted_join_gives_inner_ends():
    outer = UncertainValue.of_interval(UncertainValue.of_interval(0, 2), UncertainValue.of_interval(1, 3))
    assert CorruptedIntervalMonad().join(outer).payload == (1, 2)


def test_distribution_bind_mixture():
    m = UncertainValue.of_atoms({"x": 0.5, "y": 0.5})
    k = {"x": UncertainValue.of_atoms({"u": 1.0}), "y": UncertainValue.of_atoms({"u": 0.5, "v": 0.5})}
    out = bind(m, k.__getitem__).mass()
    assert out["u"] == pytest.approx(0.75, abs=1e-12)
    assert out["v"] == pytest.approx(0.25, abs=1e-12)


def test_strength_examples():
    s = strength(UncertainValue.of_set(["P1", "P2"]), UncertainValue.of_set(["Q"]))
    assert set(s.payload) == {("P1", "Q"), ("P2", "Q")}
    i = strength(UncertainValue.of_interval(0, 1), UncertainValue.of_interval(2, 3))
    assert i.payload == ((0, 2), (1, 3))
    d = strength(UncertainValue.of_atoms({"x": 0.3, "y": 0.7}), UncertainValue.of_atoms({"u": 0.5, "v": 0.5}))
    expected = {(a, b): p * q for (a, p), (b, q) in itertools.product([("x", .3), ("y", .7)], [("u", .5), ("v", .5)])}
    got = d.mass()
    assert set(got) == set(expected)
    for key, p in expected.items():
        assert got[key] == pytest.approx(p, abs=1e-12)


def test_strength_kind_mismatch():
    with pytest.raises(KindMismatch):
        strength(unit("powerset", 1), unit("distribution", 1))


def test_invariants_enforced():
    with pytest.raises(InvalidValue):
        UncertainValue.of_set([])
    with pytest.raises(InvalidValue):
        UncertainValue.of_interval(2, 1)
    with pytest.raises(InvalidValue):
        UncertainValue.of_atoms({"x": 0.5})
    with pytest.raises(InvalidValue):
        UncertainValue.of_atoms({"x": 1.5, "y": -0.5})
    with pytest.raises(UnorderedCarrier):
        UncertainValue.of_interval("a", "b")


def test_distribution_merges_duplicates():
    d = UncertainValue.of_atoms([("x", 0.25), ("x", 0.25), ("y", 0.5)])
    assert d.mass() == {"x": 0.5, "y": 0.5}


def test_values_equal():
    v = UncertainValue.of_atoms({"x": 0.6, "y": 0.4})
    w = UncertainValue.of_atoms({"x": 0.4, "y": 0.6})
    assert values_equal("distribution", v, v)
    near = UncertainValue.of_atoms({"x": 1.0 - 1e-12}, tol=1e-9)
    assert values_equal("distribution", UncertainValue.of_atoms({"x": 1.0}), near)
    assert total_variation(v, w) == pytest.approx(0.2)
    assert not values_equal("distribution", v, w)
    with pytest.raises(KindMismatch):
        values_equal("powerset", v, w)


def test_lift_laws(rng):
    dom = list(range(5))
    for kind in ("identity", "powerset", "distribution"):
        f = {a: int(rng.integers(5)) for a in dom}
        g = {b: int(rng.integers(5)) for b in dom}
        lf = lift(kind, f)
        assert lift(kind, lambda a: a, dom).table == kleisli_identity(kind, dom).table
        assert kleisli_compose(lf, lambda x: unit(kind, x)).table == lf.table
        fg = lift(kind, {a: g[f[a]] for a in dom})
        assert kleisli_compose(lf, lift(kind, g)).table == fg.table


def test_kleisli_errors():
    with pytest.raises(PartialMap):
        KleisliMap("powerset", (1, 2), {1: unit("powerset", 1)})
    f = lift("powerset", {1: 1})
    with pytest.raises(KindMismatch):
        kleisli_compose(f, lift("distribution", {1: 1}))


def test_affine_one_point_carrier():
    # M(1) has exactly one inhabitant for every kind
    for kind in KINDS:
        vals = {unit(kind, 0)}
        if kind is MonadKind.POWERSET:
            vals.add(UncertainValue.of_set([0]))
        if kind is MonadKind.DISTRIBUTION:
            vals.add(UncertainValue.of_atoms([(0, 0.5), (0, 0.5)]))
        assert len(vals) == 1


@pytest.mark.parametrize("kind", KINDS)
def test_law_suite_passes(kind):
    report = check_monad_laws(kind, samples=60, seed=3)
    assert report.ok, [r.record() for r in report.failed()]


def test_corrupted_mu_detected():
    report = check_monad_laws("interval", samples=60, seed=0, corrupt=True)
    assert not report.ok
    failed = {r.law for r in report.failed()}
    assert "associativity" in failed
    assert all(r.witness for r in report.failed())
