import pytest

from paradp.dp import cap, compose, cup, identity_dp, leq_dp, sym_dp, tensor
from paradp.errors import InterfaceMismatch, InvalidValue, KindMismatch, Mismatch
from paradp.laws import check_para_laws
from paradp.monad import MonadKind, UncertainValue, monad, values_equal
from paradp.para import (
    ParamCell,
    cells_equal,
    check_2cell,
    coherence_cell,
    hcompose,
    hcompose_2cells,
    identity_cell,
    identity_repar,
    include,
    is_monotone_cell,
    param_space,
    repar_from_function,
    reparametrize,
    swap_repar,
    tensor_cell,
    tensorator,
    vcompose,
)
from paradp.poset import UNIT, GridAxis, chain, opposite, product
from paradp.samples import dp_union, random_cell, random_dp, random_poset, random_repar

KINDS = list(MonadKind)
C2 = chain((0, 1), "C2")
C3 = chain((0, 1, 2), "C3")


@pytest.mark.parametrize("kind", KINDS)
def test_include_functorial(kind, rng):
    p, q, r = (random_poset(rng, 3) for _ in range(3))
    a, b = random_dp(rng, p, q), random_dp(rng, q, r)
    assert cells_equal(hcompose(include(kind, a), include(kind, b)), include(kind, compose(a, b)))
    assert cells_equal(tensor_cell(include(kind, a), include(kind, b)), include(kind, tensor(a, b)))
    assert cells_equal(hcompose(identity_cell(kind, p), include(kind, a)), include(kind, a))


def test_powerset_hcompose_oracle(rng):
    p, q, r = (random_poset(rng, 3) for _ in range(3))
    f1, f2, g = random_dp(rng, p, q), random_dp(rng, p, q), random_dp(rng, q, r)
    dom = param_space(("a", ["a0"]))
    f = ParamCell("powerset", dom, p, q, [UncertainValue.of_set([f1, f2])])
    gc = ParamCell("powerset", param_space(("b", ["b0"])), q, r, [UncertainValue.of_set([g])])
    h = hcompose(f, gc)
    assert h.dom.names == ("a", "b")
    assert h(("a0", "b0")) == UncertainValue.of_set({compose(f1, g), compose(f2, g)})


def test_distribution_hcompose_mixture(rng):
    p, q, r = (random_poset(rng, 3) for _ in range(3))
    f1, f2, g = random_dp(rng, p, q), random_dp(rng, p, q), random_dp(rng, q, r)
    f = ParamCell("distribution", UNIT, p, q, [UncertainValue.of_atoms([(f1, 0.5), (f2, 0.5)])])
    gc = include("distribution", g)
    expected = {}
    for d in (f1, f2):
        c = compose(d, g)
        expected[c] = expected.get(c, 0.0) + 0.5
    assert values_equal("distribution", hcompose(f, gc)(()), UncertainValue.of_atoms(expected))


def test_interval_tensor_end_points(rng):
    p, q = random_poset(rng, 2), random_poset(rng, 2)
    lo1 = random_dp(rng, p, q)
    hi1 = dp_union(lo1, random_dp(rng, p, q))
    lo2 = random_dp(rng, q, p)
    hi2 = dp_union(lo2, random_dp(rng, q, p))
    f = ParamCell("interval", UNIT, p, q, [UncertainValue.of_interval(lo1, hi1)])
    g = ParamCell("interval", UNIT, q, p, [UncertainValue.of_interval(lo2, hi2)])
    assert tensor_cell(f, g)(()).payload == (tensor(lo1, lo2), tensor(hi1, hi2))


def test_unit_cell_neutral_for_tensor(rng):
    c = random_cell(rng, "powerset", C2, C3)
    u = include("powerset", identity_dp(UNIT))
    assert cells_equal(tensor_cell(c, u), c)
    assert cells_equal(tensor_cell(u, c), c)


def test_errors(rng):
    c = random_cell(rng, "powerset", C2, C3)
    with pytest.raises(KindMismatch):
        hcompose(c, include("distribution", identity_dp(C3)))
    with pytest.raises(InterfaceMismatch):
        hcompose(c, include("powerset", identity_dp(C2)))
    with pytest.raises(InvalidValue):
        param_space(("empty", []))


def test_vcompose_identities(rng):
    a = param_space(("a", ["x", "y"]))
    b = param_space(("b", [1, 2, 3]))
    i = vcompose(identity_repar("powerset", a), identity_repar("powerset", a))
    assert i.table == identity_repar("powerset", a).table
    ii = hcompose_2cells(identity_repar("powerset", a), identity_repar("powerset", b))
    assert ii.table == identity_repar("powerset", product(a, b)).table
    with pytest.raises(Mismatch):
        vcompose(identity_repar("powerset", a), identity_repar("powerset", b))


@pytest.mark.parametrize("kind", ["identity", "powerset", "distribution"])
def test_2cells_closed_under_composition(kind, rng):
    for _ in range(10):
        p, q, r = C2, C3, C2
        g1 = random_cell(rng, kind, p, q, prefix="v")
        g2 = random_cell(rng, kind, q, r, prefix="w")
        u1 = param_space(("u", ["u0", "u1"]))
        u2 = param_space(("t", ["t0", "t1", "t2"]))
        phi1 = random_repar(rng, kind, u1, g1.dom)
        phi2 = random_repar(rng, kind, u2, g2.dom)
        f1, f2 = reparametrize(phi1, g1), reparametrize(phi2, g2)
        assert check_2cell(phi1, f1, g1) and check_2cell(phi2, f2, g2)
        phi = hcompose_2cells(phi1, phi2)
        assert check_2cell(phi, hcompose(f1, f2), hcompose(g1, g2))
        assert check_2cell(phi, tensor_cell(f1, f2), tensor_cell(g1, g2))


def test_check_2cell_witness(rng):
    g = random_cell(rng, "identity", C2, C3, dom=param_space(("a", [0, 1])))
    other = ParamCell("identity", g.dom, C2, C3, [g.table[1], g.table[0]])
    res = check_2cell(identity_repar("identity", g.dom), other, g)
    if g.table[0] != g.table[1]:
        assert not res and res.witness == (0,)


def test_tensorator_on_unit_spaces():
    cells = [include("powerset", identity_dp(C2)) for _ in range(4)]
    t = tensorator(*cells)
    assert t.dom == UNIT and t.table == identity_repar("powerset", UNIT).table


def test_tensorator_is_bijective_permutation():
    spaces = [param_space((n, range(k))) for n, k in zip("abcd", (2, 3, 2, 3))]
    cells = [ParamCell("powerset", s, C2, C2, [monad("powerset").unit(identity_dp(C2))] * s.size)
             for s in spaces]
    t = tensorator(*cells)
    assert t.dom.size == 36
    images = [v.payload[0] for v in t.table]
    assert len(set(images)) == 36
    assert t.cod.names == ("a", "c", "b", "d")
    assert images[t.dom.index((1, 2, 0, 1))] == (1, 0, 2, 1)


@pytest.mark.parametrize("kind", KINDS)
def test_interchange_up_to_tensorator(kind, rng):
    for _ in range(10):
        ps = [random_poset(rng, 2) for _ in range(6)]
        f1 = random_cell(rng, kind, ps[0], ps[1], prefix="a")
        g1 = random_cell(rng, kind, ps[1], ps[2], prefix="b")
        f2 = random_cell(rng, kind, ps[3], ps[4], prefix="c")
        g2 = random_cell(rng, kind, ps[4], ps[5], prefix="d")
        lhs = hcompose(tensor_cell(f1, f2), tensor_cell(g1, g2))
        rhs = tensor_cell(hcompose(f1, g1), hcompose(f2, g2))
        assert check_2cell(tensorator(f1, f2, g1, g2), lhs, rhs)


def test_coherence_cells():
    assert cells_equal(coherence_cell("powerset", "lunit", C3), include("powerset", identity_dp(C3)))
    assert cells_equal(coherence_cell("powerset", "assoc", C2, C3, C2),
                       include("powerset", identity_dp(product(C2, C3, C2))))
    s = coherence_cell("powerset", "sym", C2, C3)
    back = coherence_cell("powerset", "sym", C3, C2)
    assert cells_equal(hcompose(s, back), identity_cell("powerset", product(C2, C3)))


def test_hexagon_instances(rng):
    # s_{A,B(x)C} = (s_{A,B} (x) id_C) ; (id_B (x) s_{A,C})
    for _ in range(5):
        a, b, c = (random_poset(rng, int(rng.integers(1, 4))) for _ in range(3))
        lhs = sym_dp(a, product(b, c))
        rhs = compose(tensor(sym_dp(a, b), identity_dp(c)), tensor(identity_dp(b), sym_dp(a, c)))
        assert lhs == rhs


@pytest.mark.parametrize("kind", KINDS)
def test_sym_naturality_up_to_swap(kind, rng):
    for _ in range(5):
        ps = [random_poset(rng, 2) for _ in range(4)]
        f1 = random_cell(rng, kind, ps[0], ps[1], prefix="a")
        f2 = random_cell(rng, kind, ps[2], ps[3], prefix="b")
        lhs = hcompose(tensor_cell(f1, f2), include(kind, sym_dp(ps[1], ps[3])))
        rhs = hcompose(include(kind, sym_dp(ps[0], ps[2])), tensor_cell(f2, f1))
        assert check_2cell(swap_repar(kind, f1.dom, f2.dom), lhs, rhs)


@pytest.mark.parametrize("kind", KINDS)
def test_included_snakes(kind):
    p = C3
    lhs = hcompose(tensor_cell(identity_cell(kind, p), include(kind, cap(p))),
                   tensor_cell(include(kind, cup(p)), identity_cell(kind, p)))
    assert cells_equal(lhs, identity_cell(kind, p))
    po = opposite(p)
    rhs = hcompose(tensor_cell(include(kind, cap(p)), identity_cell(kind, po)),
                   tensor_cell(identity_cell(kind, po), include(kind, cup(p))))
    assert cells_equal(rhs, identity_cell(kind, po))


def test_include_is_injective(rng):
    p, q = random_poset(rng, 3), random_poset(rng, 3)
    dps = {random_dp(rng, p, q) for _ in range(20)}
    for kind in KINDS:
        assert len({include(kind, d).table[0] for d in dps}) == len(dps)


def test_monotone_cells_compose(rng):
    axis = param_space(GridAxis("k", (1, 2, 3)))
    f = ParamCell("identity", axis, C2, C3,
                  [UncertainValue.single(random_dp(rng, C2, C3))] * 3)
    assert is_monotone_cell(f)
    grow = []
    d = random_dp(rng, C3, C2)
    for _ in range(3):
        d = dp_union(d, random_dp(rng, C3, C2))
        grow.append(UncertainValue.single(d))
    g = ParamCell("identity", param_space(GridAxis("j", (1, 2, 3))), C3, C2, grow)
    assert is_monotone_cell(g)
    assert is_monotone_cell(hcompose(f, g))
    assert is_monotone_cell(tensor_cell(f, g))
    rev = ParamCell("identity", g.dom, C3, C2, list(reversed(grow)))
    if not all(leq_dp(grow[i].payload, grow[0].payload) for i in range(3)):
        assert not is_monotone_cell(rev)


def test_repar_from_function(rng):
    dom = param_space(("a", [0, 1]))
    cod = param_space(("b", ["x", "y"]))
    phi = repar_from_function("powerset", dom, cod, lambda p: ("x" if p[0] == 0 else "y",))
    assert phi((1,)).payload == (("y",),)
    g = random_cell(rng, "powerset", C2, C2, dom=cod)
    f = reparametrize(phi, g)
    assert f((0,)) == g(("x",))


@pytest.mark.parametrize("kind", KINDS)
def test_para_law_suite(kind):
    report = check_para_laws(kind, samples=25, seed=5)
    assert report.ok, [r.record() for r in report.failed()]
    laws = {r.law for r in report.results}
    assert {"hcompose_associativity", "interchange_tensorator", "snakes"} <= laws
