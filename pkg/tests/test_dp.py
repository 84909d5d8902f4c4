import itertools

import numpy as np
import pytest

from paradp.dp import (
    HomPoset,
    cap,
    compose,
    cup,
    from_descriptor,
    identity_dp,
    leq_dp,
    mk_dp,
    relation_dp,
    sym_dp,
    tensor,
    threshold_dp,
    trace,
)
from paradp.errors import InterfaceMismatch, MonotonicityViolation, ShapeMismatch
from paradp.poset import BOOL, UNIT, GridAxis, chain, grid_poset, opposite, product
from paradp.samples import all_labelled_posets, random_dp, random_poset

C3 = chain((0, 1, 2), "C3")


def compose_oracle(a, b):
    n, k = a.shape
    m = b.shape[1]
    return np.array([[any(a[i, j] and b[j, l] for j in range(k)) for l in range(m)] for i in range(n)])


def monotone_oracle(feas, fle, rle):
    n, m = feas.shape
    for f, f2, r, r2 in itertools.product(range(n), range(n), range(m), range(m)):
        if feas[f, r] and fle[f2, f] and rle[r, r2] and not feas[f2, r2]:
            return False
    return True


def test_mk_dp_extremes():
    mk_dp(BOOL, BOOL, np.zeros((2, 2)))
    mk_dp(BOOL, BOOL, np.ones((2, 2)))


def test_mk_dp_violation():
    feas = np.zeros((2, 2), dtype=bool)
    feas[1, 0] = True
    with pytest.raises(MonotonicityViolation) as info:
        mk_dp(BOOL, BOOL, feas)
    assert info.value.witness is not None


def test_mk_dp_shape():
    with pytest.raises(ShapeMismatch):
        mk_dp(BOOL, C3, np.zeros((2, 2)))


def test_mk_dp_agrees_with_monotonicity_oracle(rng):
    for _ in range(200):
        f = random_poset(rng, int(rng.integers(1, 4)))
        r = random_poset(rng, int(rng.integers(1, 4)))
        feas = rng.random((f.size, r.size)) < 0.5
        ok = monotone_oracle(feas, f.leq, r.leq)
        try:
            mk_dp(f, r, feas)
            assert ok
        except MonotonicityViolation:
            assert not ok


def test_threshold_examples():
    r01 = grid_poset([GridAxis("r", (0, 1))])
    f01 = grid_poset([GridAxis("v", (0, 1))])
    assert threshold_dp(f01, r01, lambda v: 0).feas.all()
    g = grid_poset([GridAxis("v", (0, 1, 2))])
    r = grid_poset([GridAxis("r", (0, 1, 2))])
    assert np.array_equal(threshold_dp(g, r, "v").feas, np.triu(np.ones((3, 3), bool)))


def test_threshold_sum_recomputed():
    f = grid_poset([GridAxis("v", (0, 1)), GridAxis("l", (0, 1))])
    r = grid_poset([GridAxis("p", (0, 1, 2))])
    d = threshold_dp(f, r, "v + l")
    assert d.feas.size == 12
    for i, (v, l) in enumerate(f.elements):
        for j, (p,) in enumerate(r.elements):
            assert d.feas[i, j] == (v + l <= p)


def test_threshold_rejects_non_monotone_phi():
    f = grid_poset([GridAxis("v", (0, 1, 2))])
    r = grid_poset([GridAxis("p", (0, 1, 2))])
    with pytest.raises(MonotonicityViolation):
        threshold_dp(f, r, lambda v: 2 - v)


def test_compose_units_and_assoc(rng):
    p = [random_poset(rng, 4) for _ in range(4)]
    a, b, c = (random_dp(rng, p[i], p[i + 1]) for i in range(3))
    assert compose(identity_dp(p[0]), a) == a
    assert compose(a, identity_dp(p[1])) == a
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert np.array_equal(compose(a, b).feas, compose_oracle(a.feas, b.feas))


def test_compose_interface_mismatch():
    with pytest.raises(InterfaceMismatch):
        compose(identity_dp(BOOL), identity_dp(C3))


def test_tensor_pointwise_oracle(rng):
    for _ in range(20):
        ps = [random_poset(rng, 2) for _ in range(4)]
        a = random_dp(rng, ps[0], ps[1], 0.5)
        b = random_dp(rng, ps[2], ps[3], 0.5)
        t = tensor(a, b)
        for (i1, i2), (j1, j2) in itertools.product(itertools.product(range(2), repeat=2), repeat=2):
            assert t.feas[i1 * 2 + i2, j1 * 2 + j2] == (a.feas[i1, j1] and b.feas[i2, j2])


def test_tensor_unit_and_top():
    d = identity_dp(C3)
    assert tensor(d, identity_dp(UNIT)) == d
    assert tensor(identity_dp(UNIT), d) == d
    top = HomPoset(BOOL, BOOL).top()
    assert tensor(top, top).feas.all()


def test_identity_dp():
    assert identity_dp(chain(("a",))).feas.tolist() == [[True]]
    assert np.array_equal(identity_dp(BOOL).feas, np.array([[1, 1], [0, 1]], bool))


def test_cap_on_singleton():
    assert cap(chain(("a",))).feas.tolist() == [[True]]


def test_cap_cup_entries():
    c = cap(C3)
    u = cup(C3)
    for i, j in itertools.product(range(3), repeat=2):
        assert c.feas[0, i * 3 + j] == (i <= j)
        assert u.feas[i * 3 + j, 0] == (i <= j)


def test_cup_reversed_formula_is_not_monotone():
    # [p' <= p] on P (x) P^op fails monotonicity, so cup must use [p <= p']
    p = product(C3, opposite(C3))
    feas = np.array([[j <= i] for i in range(3) for j in range(3)])
    with pytest.raises(MonotonicityViolation):
        mk_dp(p, UNIT, feas)
    mk_dp(p, UNIT, cup(C3).feas)


def test_snakes_c3():
    p = C3
    left = compose(tensor(identity_dp(p), cap(p)), tensor(cup(p), identity_dp(p)))
    assert left == identity_dp(p)
    po = opposite(p)
    right = compose(tensor(cap(p), identity_dp(po)), tensor(identity_dp(po), cup(p)))
    assert right == identity_dp(po)


def test_snakes_all_posets_up_to_four():
    for n in range(1, 5):
        for p in all_labelled_posets(n):
            po = opposite(p)
            assert compose(tensor(identity_dp(p), cap(p)), tensor(cup(p), identity_dp(p))) == identity_dp(p)
            assert compose(tensor(cap(p), identity_dp(po)), tensor(identity_dp(po), cup(p))) == identity_dp(po)


def test_leq_dp(rng):
    p, q, s = (random_poset(rng, 3) for _ in range(3))
    a = random_dp(rng, p, q)
    h = HomPoset(p, q)
    assert leq_dp(a, a)
    assert leq_dp(h.bottom(), a) and leq_dp(a, h.top())
    with pytest.raises(InterfaceMismatch):
        leq_dp(a, identity_dp(p))
    for _ in range(50):
        a = random_dp(rng, p, q)
        a2 = mk_dp(p, q, a.feas | random_dp(rng, p, q).feas)
        b = random_dp(rng, q, s)
        assert leq_dp(a, a2)
        assert leq_dp(compose(a, b), compose(a2, b))
        assert leq_dp(tensor(a, b), tensor(a2, b))


def test_interchange(rng):
    for _ in range(30):
        ps = [random_poset(rng, 2) for _ in range(6)]
        a1, b1 = random_dp(rng, ps[0], ps[1]), random_dp(rng, ps[1], ps[2])
        a2, b2 = random_dp(rng, ps[3], ps[4]), random_dp(rng, ps[4], ps[5])
        assert tensor(compose(a1, b1), compose(a2, b2)) == compose(tensor(a1, a2), tensor(b1, b2))


def test_symmetry_relabels_tensor(rng):
    for _ in range(20):
        ps = [random_poset(rng, int(rng.integers(1, 4))) for _ in range(4)]
        a, b = random_dp(rng, ps[0], ps[1]), random_dp(rng, ps[2], ps[3])
        lhs = compose(sym_dp(ps[0], ps[2]), tensor(b, a))
        rhs = compose(tensor(a, b), sym_dp(ps[1], ps[3]))
        assert lhs == rhs
        assert compose(sym_dp(ps[0], ps[2]), sym_dp(ps[2], ps[0])) == identity_dp(product(ps[0], ps[2]))


def test_trace_of_symmetry_is_identity():
    # yanking: tracing the symmetry returns the identity
    assert trace(sym_dp(C3, C3), C3) == identity_dp(C3)


def test_relation_and_descriptor():
    f = grid_poset([GridAxis("p", (0, 1, 2))])
    r = grid_poset([GridAxis("c", (0, 1)), GridAxis("m", (0, 1))])
    d = relation_dp(f, r, "p <= c + m")
    assert d(2, (1, 1)) and not d(2, (1, 0))
    desc = {"relation": {"fun": {"grid": [{"name": "p", "values": [0, 1, 2]}]},
                         "res": {"grid": [{"name": "c", "values": [0, 1]}, {"name": "m", "values": [0, 1]}]},
                         "formula": "p <= c + m"}}
    assert from_descriptor(desc) == d
