import itertools

import numpy as np
import pytest

from paradp import kernels
from paradp.errors import AntisymmetryViolation, DuplicateElement, EmptyAxis, PartialMap, UnknownElement
from paradp.poset import (
    BOOL,
    UNIT,
    Antichain,
    GridAxis,
    antichain_leq,
    chain,
    from_descriptor,
    grid_poset,
    is_monotone,
    minimal_elements,
    mk_poset,
    opposite,
    product,
)
from paradp.samples import random_poset

C2 = chain((0, 1), "C2")
C3 = chain((0, 1, 2), "C3")


def is_partial_order(le):
    n = le.shape[0]
    refl = le.diagonal().all()
    anti = not (le & le.T & ~np.eye(n, dtype=bool)).any()
    trans = all(le[i, k] for i in range(n) for j in range(n) for k in range(n) if le[i, j] and le[j, k])
    return refl and anti and trans


def test_singleton_is_reflexive():
    p = mk_poset(["a"])
    assert p.size == 1 and p.le("a", "a")


def test_two_chain_is_bool():
    p = mk_poset([0, 1], [(0, 1)])
    assert np.array_equal(p.leq, BOOL.leq)


def test_cycle_rejected():
    with pytest.raises(AntisymmetryViolation):
        mk_poset(["x", "y"], [("x", "y"), ("y", "x")])


def test_duplicate_label_rejected():
    with pytest.raises(DuplicateElement):
        mk_poset(["a", "a"])


def test_closure_is_transitive():
    p = mk_poset("abcd", [("a", "b"), ("b", "c"), ("c", "d")])
    assert p.le("a", "d")
    assert is_partial_order(p.leq)


def test_product_with_unit():
    p = product(BOOL, chain(("*",)))
    assert p.size == 2
    assert np.array_equal(p.leq, BOOL.leq)
    assert product(BOOL, UNIT) == BOOL


def test_product_bool_bool():
    p = product(BOOL, BOOL)
    assert p.size == 4
    assert not p.le((0, 1), (1, 0)) and not p.le((1, 0), (0, 1))


def test_product_c3_c2_relation_count():
    # componentwise oracle: 6 elements, 12 strict relations
    p = product(C3, C2)
    pts = list(itertools.product(range(3), range(2)))
    strict = sum(1 for a in pts for b in pts if a != b and a[0] <= b[0] and a[1] <= b[1])
    assert p.size == 6
    assert int(p.leq.sum()) - p.size == strict == 12
    assert list(p.elements) == pts


def test_product_is_associative_and_flat():
    a, b, c = C2, C3, BOOL
    assert product(product(a, b), c) == product(a, product(b, c))
    assert len(product(product(a, b), c).factors) == 3


def test_opposite():
    assert opposite(chain(("a",))) == chain(("a",))
    assert opposite(opposite(C3)) == C3
    o = opposite(C3)
    assert o.le(1, 0) and not o.le(0, 1)


def test_minimal_elements_examples():
    assert minimal_elements(C3, [0, 1, 2]).elements == ((0,),)
    bb = product(BOOL, BOOL)
    got = minimal_elements(bb, [(1, 0), (0, 1), (1, 1)])
    assert set(got.elements) == {(1, 0), (0, 1)}
    assert len(minimal_elements(C3, [])) == 0


def test_minimal_elements_unknown():
    with pytest.raises(UnknownElement):
        minimal_elements(C3, [7])


def test_minimal_elements_matches_double_loop(rng):
    for _ in range(30):
        p = random_poset(rng, 20, density=0.2)
        subset = [e[0] for e, keep in zip(p.elements, rng.random(20) < 0.5) if keep]
        idx = [p.index(x) for x in subset]
        oracle = {i for i in idx if not any(j != i and p.leq[j, i] for j in idx)}
        got = minimal_elements(p, subset)
        assert set(got.members) == oracle
        # every input element dominates some member
        assert all(any(p.leq[m, i] for m in got.members) for i in idx)


def test_antichain_rejects_comparable():
    with pytest.raises(ValueError):
        Antichain(C3, (0, 1))


def test_antichain_members_sorted():
    p = mk_poset("abc")
    assert Antichain(p, (2, 0)).members == (0, 2)


def test_antichain_leq_is_upset_inclusion():
    bb = product(BOOL, BOOL)
    top = minimal_elements(bb, [(1, 1)])
    both = minimal_elements(bb, [(1, 0), (0, 1)])
    empty = Antichain(bb, ())
    assert antichain_leq(top, both)
    assert not antichain_leq(both, top)
    assert antichain_leq(empty, top)


def test_grid_poset():
    g = grid_poset([GridAxis("x", (0, 1, 2))])
    assert np.array_equal(g.leq, C3.leq)
    assert grid_poset([GridAxis("x", (0, 1, 2)), GridAxis("y", (0, 1, 2, 3))]).size == 12
    d = grid_poset([GridAxis("x", (0, 1), "desc")])
    assert d.le(1, 0) and not d.le(0, 1)


def test_grid_errors():
    with pytest.raises(EmptyAxis):
        grid_poset([])
    with pytest.raises(EmptyAxis):
        GridAxis("x", ())
    with pytest.raises(ValueError):
        GridAxis("x", (1, 1))


def test_is_monotone():
    assert is_monotone(C3, C3, lambda x: x)
    assert is_monotone(C3, BOOL, lambda x: 1)
    assert not is_monotone(BOOL, BOOL, {0: 1, 1: 0})
    with pytest.raises(PartialMap):
        is_monotone(BOOL, BOOL, {0: 1})


def test_constructed_posets_are_partial_orders(rng):
    for _ in range(20):
        a = random_poset(rng, int(rng.integers(1, 5)))
        b = random_poset(rng, int(rng.integers(1, 5)))
        for p in (a, opposite(a), product(a, b), product(a, opposite(b))):
            assert is_partial_order(p.leq)


def test_descriptors():
    assert from_descriptor({"chain": [0, 1, 2]}).size == 3
    g = from_descriptor({"grid": [{"name": "v", "values": [0, 0.5, 1]}]})
    assert g.names == ("v",) and g.size == 3
    e = from_descriptor({"explicit": {"elements": ["a", "b"], "leq_pairs": [["a", "b"]]}})
    assert e.le("a", "b")
    p = from_descriptor({"product": [{"chain": [0, 1]}, {"op": {"chain": [0, 1]}}]})
    assert p.size == 4 and p.le((0, 1), (1, 0))


def test_closure_kernel_oracle(rng):
    for _ in range(20):
        n = int(rng.integers(1, 9))
        rel = rng.random((n, n)) < 0.2
        np.fill_diagonal(rel, True)
        closed = rel.copy()
        for k in range(n):
            closed |= closed[:, [k]] & closed[[k], :]
        assert np.array_equal(kernels.transitive_closure(rel), closed)
