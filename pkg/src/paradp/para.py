"""Parametrized uncertain design problems.

A 1-cell ``X -> Y`` is a :class:`ParamCell`: a total table from the points of
a finite parameter space to uncertain values over ``DP(X, Y)``.  A 2-cell is a
:class:`Repar`, a Kleisli map between parameter spaces.  Parameter spaces are
:class:`~paradp.poset.FinPoset` objects (discretely ordered factors when no
order is intended), so tensoring them concatenates factor lists and the
associators and unitors are identities.  Only symmetries and the tensorators
that reorder parameter factors are non-trivial.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Hashable, Mapping, Sequence

import numpy as np

from . import dp as _dp
from .dp import DesignProblem
from .errors import InterfaceMismatch, InvalidValue, KindMismatch, Mismatch, PartialMap
from .monad import DIST_TOL, MonadKind, UncertainValue, as_kind, carrier_leq, monad, values_equal
from .poset import UNIT, Factor, FinPoset, GridAxis, product

ParamSpace = FinPoset


def discrete_factor(name: str, labels: Sequence[Hashable]) -> Factor:
    labels = tuple(labels)
    return Factor(labels, np.eye(len(labels), dtype=bool), name)


def param_space(*factors: Factor | GridAxis | tuple[str, Sequence[Hashable]]) -> ParamSpace:
    """Parameter space from grid axes, ready-made factors or ``(name, labels)`` pairs.

    ``(name, labels)`` pairs become discretely ordered factors.
    """
    out = []
    for f in factors:
        if isinstance(f, GridAxis):
            f = f.factor()
        elif not isinstance(f, Factor):
            f = discrete_factor(*f)
        if len(f) == 0:
            raise InvalidValue(f"parameter factor {f.name!r} has no points")
        out.append(f)
    return FinPoset(out)


def factor_position(space: ParamSpace, name: str) -> int:
    hits = [i for i, n in enumerate(space.names) if n == name]
    if len(hits) != 1:
        raise KeyError(f"parameter factor {name!r} occurs {len(hits)} times in {space.names}")
    return hits[0]


def _concat(a: tuple, b: tuple) -> tuple:
    return a + b


# --- 1-cells ----------------------------------------------------------------

class ParamCell:
    """A parametrized uncertain design problem ``dom -> M DP(src, tgt)``."""

    __slots__ = ("kind", "dom", "src", "tgt", "table")

    def __init__(self, kind: MonadKind | str, dom: ParamSpace, src: FinPoset, tgt: FinPoset,
                 table: Sequence[UncertainValue] | Mapping[Any, UncertainValue], validate: bool = True):
        self.kind = as_kind(kind)
        self.dom = dom
        self.src = src
        self.tgt = tgt
        if isinstance(table, Mapping):
            try:
                table = [table[p] for p in dom.elements]
            except KeyError as exc:
                raise PartialMap(f"cell undefined at parameter point {exc.args[0]!r}") from None
        self.table = tuple(table)
        if len(self.table) != dom.size:
            raise PartialMap(f"cell table has {len(self.table)} entries for {dom.size} points")
        if validate:
            for p, v in zip(dom.elements, self.table):
                if not isinstance(v, UncertainValue) or v.kind is not self.kind:
                    raise KindMismatch(f"value at {p!r} is not a {self.kind} value")
                for d in v.support():
                    if not isinstance(d, DesignProblem) or d.fun != src or d.res != tgt:
                        raise InterfaceMismatch(f"value at {p!r} holds a DP outside DP({src!r}, {tgt!r})")

    def __call__(self, point: Any) -> UncertainValue:
        return self.table[self.dom.index(point)]

    def items(self):
        return zip(self.dom.elements, self.table)

    def __repr__(self) -> str:
        return f"ParamCell({self.kind}, {self.dom!r}: {self.src!r} -> {self.tgt!r})"


def cells_equal(f: ParamCell, g: ParamCell, tol: float = DIST_TOL) -> bool:
    return (
        f.kind is g.kind and f.dom == g.dom and f.src == g.src and f.tgt == g.tgt
        and all(values_equal(f.kind, a, b, tol) for a, b in zip(f.table, g.table))
    )


def constant_cell(kind: MonadKind | str, dom: ParamSpace, d: DesignProblem) -> ParamCell:
    v = monad(kind).unit(d)
    return ParamCell(kind, dom, d.fun, d.res, [v] * dom.size, validate=False)


def family_cell(kind: MonadKind | str, dom: ParamSpace, make: Callable[[tuple], DesignProblem]) -> ParamCell:
    """Deterministic family: point ``a`` maps to ``unit(make(a))``."""
    m = monad(kind)
    dps = [make(p) for p in dom.elements]
    if not dps:
        raise InvalidValue("empty parameter space")
    return ParamCell(kind, dom, dps[0].fun, dps[0].res, [m.unit(d) for d in dps])


def include(kind: MonadKind | str, d: DesignProblem) -> ParamCell:
    """Embed a plain DP as a cell over the one-point parameter space."""
    return ParamCell(kind, UNIT, d.fun, d.res, (monad(kind).unit(d),), validate=False)


def identity_cell(kind: MonadKind | str, p: FinPoset) -> ParamCell:
    return include(kind, _dp.identity_dp(p))


def _lifted(f: ParamCell, g: ParamCell, op: Callable[[DesignProblem, DesignProblem], DesignProblem],
            src: FinPoset, tgt: FinPoset) -> ParamCell:
    if f.kind is not g.kind:
        raise KindMismatch(f"cannot combine {f.kind} and {g.kind} cells")
    m = monad(f.kind)
    memo: dict[tuple[DesignProblem, DesignProblem], DesignProblem] = {}

    def apply(pair):
        out = memo.get(pair)
        if out is None:
            out = memo[pair] = op(*pair)
        return out

    table = [m.fmap(m.strength(a, b), apply) for a in f.table for b in g.table]
    return ParamCell(f.kind, product(f.dom, g.dom), src, tgt, table, validate=False)


def hcompose(f: ParamCell, g: ParamCell) -> ParamCell:
    """Series composition; the parameter space is ``f.dom (x) g.dom``."""
    if f.tgt != g.src:
        raise InterfaceMismatch(f"cannot compose cells: {f.tgt!r} differs from {g.src!r}")
    return _lifted(f, g, _dp.compose, f.src, g.tgt)


def tensor_cell(f: ParamCell, g: ParamCell) -> ParamCell:
    return _lifted(f, g, _dp.tensor, product(f.src, g.src), product(f.tgt, g.tgt))


def coherence_cell(kind: MonadKind | str, which: str, *objects: FinPoset) -> ParamCell:
    """Lifted coherence maps.  With flattened products the associator and unitors
    are identity DPs; only the symmetry has a non-trivial matrix."""
    if which == "assoc":
        a, b, c = objects
        return include(kind, _dp.identity_dp(product(a, b, c)))
    if which in ("lunit", "runit"):
        (a,) = objects
        return include(kind, _dp.identity_dp(a))
    if which == "sym":
        a, b = objects
        return include(kind, _dp.sym_dp(a, b))
    raise ValueError(f"unknown coherence map {which!r}")


def is_monotone_cell(cell: ParamCell) -> bool:
    """Whether ``a <= b`` in the parameter order implies ``cell(a) <= cell(b)``."""
    if cell.kind not in (MonadKind.IDENTITY, MonadKind.INTERVAL):
        raise KindMismatch("monotonicity of cells is defined for identity and interval kinds")
    le = cell.dom.leq
    for i, a in enumerate(cell.table):
        for j, b in enumerate(cell.table):
            if i != j and le[i, j]:
                ok = carrier_leq(a.payload, b.payload) if cell.kind is MonadKind.IDENTITY \
                    else carrier_leq(a, b)
                if not ok:
                    return False
    return True


# --- 2-cells ----------------------------------------------------------------

class Repar:
    """A Kleisli map ``dom -> M cod`` between parameter spaces."""

    __slots__ = ("kind", "dom", "cod", "table")

    def __init__(self, kind: MonadKind | str, dom: ParamSpace, cod: ParamSpace,
                 table: Sequence[UncertainValue] | Mapping[Any, UncertainValue], validate: bool = True):
        self.kind = as_kind(kind)
        self.dom = dom
        self.cod = cod
        if isinstance(table, Mapping):
            try:
                table = [table[p] for p in dom.elements]
            except KeyError as exc:
                raise PartialMap(f"reparametrization undefined at {exc.args[0]!r}") from None
        self.table = tuple(table)
        if len(self.table) != dom.size:
            raise PartialMap(f"reparametrization has {len(self.table)} entries for {dom.size} points")
        if validate:
            for p, v in zip(dom.elements, self.table):
                if not isinstance(v, UncertainValue) or v.kind is not self.kind:
                    raise KindMismatch(f"value at {p!r} is not a {self.kind} value")
                for q in v.support():
                    cod.index(q)

    def __call__(self, point: Any) -> UncertainValue:
        return self.table[self.dom.index(point)]

    def __repr__(self) -> str:
        return f"Repar({self.kind}, {self.dom!r} -> {self.cod!r})"


def repar_from_function(kind: MonadKind | str, dom: ParamSpace, cod: ParamSpace,
                        fn: Callable[[tuple], Any]) -> Repar:
    """Deterministic reparametrization ``a -> unit(fn(a))``."""
    m = monad(kind)
    return Repar(kind, dom, cod, [m.unit(tuple(fn(p)), cod.le) for p in dom.elements])


def identity_repar(kind: MonadKind | str, dom: ParamSpace) -> Repar:
    return repar_from_function(kind, dom, dom, lambda p: p)


def permutation_repar(kind: MonadKind | str, dom: ParamSpace, order: Sequence[int]) -> Repar:
    """Reorder factors: the point ``p`` goes to ``tuple(p[i] for i in order)``."""
    order = list(order)
    if sorted(order) != list(range(len(dom.factors))):
        raise Mismatch(f"{order} is not a permutation of {len(dom.factors)} factors")
    cod = FinPoset(dom.factors[i] for i in order)
    return repar_from_function(kind, dom, cod, lambda p: tuple(p[i] for i in order))


def inverse_permutation(order: Sequence[int]) -> list[int]:
    inv = [0] * len(order)
    for pos, i in enumerate(order):
        inv[i] = pos
    return inv


def repars_equal(a: Repar, b: Repar, tol: float = DIST_TOL) -> bool:
    return (
        a.kind is b.kind and a.dom == b.dom and a.cod == b.cod
        and all(values_equal(a.kind, x, y, tol) for x, y in zip(a.table, b.table))
    )


def vcompose(phi: Repar, psi: Repar) -> Repar:
    """Kleisli composite ``phi ; psi``."""
    if phi.kind is not psi.kind:
        raise Mismatch(f"cannot compose {phi.kind} and {psi.kind} reparametrizations")
    if phi.cod != psi.dom:
        raise Mismatch(f"codomain {phi.cod!r} differs from domain {psi.dom!r}")
    m = monad(phi.kind)
    return Repar(phi.kind, phi.dom, psi.cod, [m.bind(v, psi) for v in phi.table], validate=False)


def reparametrize(phi: Repar, f: ParamCell) -> ParamCell:
    """The cell ``phi ; f`` with parameter space ``phi.dom``."""
    if phi.kind is not f.kind:
        raise KindMismatch(f"cannot reparametrize a {f.kind} cell by a {phi.kind} map")
    if phi.cod != f.dom:
        raise Mismatch(f"reparametrization lands in {phi.cod!r}, cell expects {f.dom!r}")
    m = monad(f.kind)
    return ParamCell(f.kind, phi.dom, f.src, f.tgt, [m.bind(v, f) for v in phi.table], validate=False)


@dataclass(frozen=True)
class TwoCellCheck:
    ok: bool
    witness: tuple | None = None
    expected: UncertainValue | None = None
    got: UncertainValue | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_2cell(phi: Repar, f: ParamCell, g: ParamCell, tol: float = DIST_TOL) -> TwoCellCheck:
    """Whether ``f = phi ; g`` pointwise; the first failing point is the witness."""
    if not (phi.kind is f.kind is g.kind):
        raise Mismatch("2-cell, source and target cells must share a monad kind")
    if phi.dom != f.dom or phi.cod != g.dom:
        raise Mismatch("reparametrization does not connect the two parameter spaces")
    if f.src != g.src or f.tgt != g.tgt:
        raise Mismatch("cells have different interfaces")
    m = monad(f.kind)
    for point, v_phi, v_f in zip(phi.dom.elements, phi.table, f.table):
        rhs = m.bind(v_phi, g)
        if not values_equal(f.kind, v_f, rhs, tol):
            return TwoCellCheck(False, point, v_f, rhs)
    return TwoCellCheck(True)


def hcompose_2cells(phi1: Repar, phi2: Repar) -> Repar:
    """``phi1 (x) phi2`` acting on concatenated parameter points."""
    if phi1.kind is not phi2.kind:
        raise KindMismatch(f"cannot combine {phi1.kind} and {phi2.kind} reparametrizations")
    m = monad(phi1.kind)
    cod = product(phi1.cod, phi2.cod)
    table = [m.strength(a, b, _concat, cod.le) for a in phi1.table for b in phi2.table]
    return Repar(phi1.kind, product(phi1.dom, phi2.dom), cod, table, validate=False)


def tensorator(f1: ParamCell, f2: ParamCell, g1: ParamCell, g2: ParamCell) -> Repar:
    """Interchange 2-cell from ``(f1 (x) f2) ; (g1 (x) g2)`` to ``(f1 ; g1) (x) (f2 ; g2)``.

    It moves parameter factors from the order U1 U2 V1 V2 to U1 V1 U2 V2.
    """
    if f1.tgt != g1.src or f2.tgt != g2.src:
        raise Mismatch("cells do not form an interchange square")
    kinds = {c.kind for c in (f1, f2, g1, g2)}
    if len(kinds) != 1:
        raise Mismatch("interchange cells must share a monad kind")
    n1, n2, n3, n4 = (len(c.dom.factors) for c in (f1, f2, g1, g2))
    u1 = list(range(n1))
    u2 = list(range(n1, n1 + n2))
    v1 = list(range(n1 + n2, n1 + n2 + n3))
    v2 = list(range(n1 + n2 + n3, n1 + n2 + n3 + n4))
    dom = product(f1.dom, f2.dom, g1.dom, g2.dom)
    return permutation_repar(kinds.pop(), dom, u1 + v1 + u2 + v2)


def swap_repar(kind: MonadKind | str, a: ParamSpace, b: ParamSpace) -> Repar:
    """``A (x) B -> B (x) A``; mediates naturality of the lifted symmetry."""
    na, nb = len(a.factors), len(b.factors)
    return permutation_repar(kind, product(a, b), list(range(na, na + nb)) + list(range(na)))


def marginalize(cell: ParamCell, factor: str | int, prior: UncertainValue) -> ParamCell:
    """Average a distribution cell over one parameter factor using ``prior`` on its labels."""
    if cell.kind is not MonadKind.DISTRIBUTION or prior.kind is not MonadKind.DISTRIBUTION:
        raise KindMismatch("marginalization needs distribution kind")
    i = factor if isinstance(factor, int) else factor_position(cell.dom, factor)
    rest = FinPoset(f for j, f in enumerate(cell.dom.factors) if j != i)
    atoms = []
    for p in rest.elements:
        dist = {p[:i] + (d,) + p[i:]: w for d, w in prior.payload}
        atoms.append(UncertainValue.of_atoms(dist))
    return reparametrize(Repar(cell.kind, rest, cell.dom, atoms), cell)


def fix_factor(cell: ParamCell, factor: str | int, value: Any) -> ParamCell:
    """Restrict a cell to the points where one factor equals ``value``."""
    i = factor if isinstance(factor, int) else factor_position(cell.dom, factor)
    cell.dom.factors[i].index(value)
    rest = FinPoset(f for j, f in enumerate(cell.dom.factors) if j != i)
    m = monad(cell.kind)
    phi = Repar(cell.kind, rest, cell.dom,
                [m.unit(p[:i] + (value,) + p[i:], cell.dom.le) for p in rest.elements])
    return reparametrize(phi, cell)
