"""Design problems: monotone feasibility relations between finite posets.

``feas[f, r]`` says resource ``r`` suffices for functionality ``f``.  Rows are
indexed by functionality positions and columns by resource positions, both in
the lexicographic element order of the interface posets.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import InterfaceMismatch, MonotonicityViolation, ShapeMismatch
from .formula import Formula
from .poset import UNIT, FinPoset, from_descriptor as poset_from_descriptor, opposite, product

DEBUG_CHECKS = bool(os.environ.get("PARADP_DEBUG"))


class DesignProblem:
    __slots__ = ("fun", "res", "feas", "_bytes", "_hash")

    def __init__(self, fun: FinPoset, res: FinPoset, feas: np.ndarray):
        # unchecked; use mk_dp for validated construction
        self.fun = fun
        self.res = res
        a = np.ascontiguousarray(feas, dtype=bool)
        a.setflags(write=False)
        self.feas = a
        self._bytes = a.tobytes()
        self._hash = hash((fun, res, self._bytes))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DesignProblem):
            return NotImplemented
        if self is other:
            return True
        return (
            self._hash == other._hash
            and self._bytes == other._bytes
            and self.fun == other.fun
            and self.res == other.res
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"DesignProblem({self.fun!r} -> {self.res!r}, {int(self.feas.sum())}/{self.feas.size} feasible)"

    def _sort_key(self):
        return (self.feas.shape, self._bytes)

    def __call__(self, f: Any, r: Any) -> bool:
        return bool(self.feas[self.fun.index(f), self.res.index(r)])

    def __rshift__(self, other: "DesignProblem") -> "DesignProblem":
        return compose(self, other)

    def __matmul__(self, other: "DesignProblem") -> "DesignProblem":
        return tensor(self, other)


@dataclass(frozen=True)
class HomPoset:
    """The hom-poset DP(fun, res) under the pointwise order; never enumerated."""

    fun: FinPoset
    res: FinPoset

    def __contains__(self, d: object) -> bool:
        return isinstance(d, DesignProblem) and d.fun == self.fun and d.res == self.res

    def leq(self, a: DesignProblem, b: DesignProblem) -> bool:
        if a not in self or b not in self:
            raise InterfaceMismatch("design problems are not in this hom-poset")
        return leq_dp(a, b)

    def bottom(self) -> DesignProblem:
        return DesignProblem(self.fun, self.res, np.zeros((self.fun.size, self.res.size), bool))

    def top(self) -> DesignProblem:
        return DesignProblem(self.fun, self.res, np.ones((self.fun.size, self.res.size), bool))


def mk_dp(fun: FinPoset, res: FinPoset, feas: Any) -> DesignProblem:
    a = np.asarray(feas, dtype=bool)
    if a.shape != (fun.size, res.size):
        raise ShapeMismatch(f"matrix shape {a.shape} does not match |F|x|R| = {fun.size}x{res.size}")
    w = kernels.monotone_witness(a, fun.leq, res.leq)
    if w is not None:
        f, f2, r, r2 = w
        lab = (fun.element(f), fun.element(f2), res.element(r), res.element(r2))
        raise MonotonicityViolation(
            f"feasible at (f={lab[0]}, r={lab[2]}) but not at (f'={lab[1]}, r'={lab[3]})", lab
        )
    return DesignProblem(fun, res, a)


def _checked(d: DesignProblem) -> DesignProblem:
    if DEBUG_CHECKS:
        mk_dp(d.fun, d.res, d.feas)
    return d


def _coords(p: FinPoset, names: Sequence[str] | None = None):
    names = names or p.names
    if any(n is None for n in names) or len(set(names)) != len(names):
        raise ValueError(f"formula evaluation needs distinct factor names, got {names}")
    return [dict(zip(names, e)) for e in p.elements]


def threshold_dp(fun: FinPoset, res: FinPoset, phi: Callable[..., Any] | str | Formula) -> DesignProblem:
    """``feas(f, r) = [phi(f) <= r]`` over a one-axis resource grid.

    ``phi`` is either a callable on the functionality coordinate tuple or a
    formula over the functionality axis names.
    """
    if len(res.factors) != 1:
        raise ShapeMismatch("threshold_dp needs a single resource axis")
    if isinstance(phi, (str, Formula)):
        form = phi if isinstance(phi, Formula) else Formula(phi)
        costs = [form(env) for env in _coords(fun)]
    else:
        costs = [phi(*e) for e in fun.elements]
    rvals = [e[0] for e in res.elements]
    feas = np.array([[c <= r for r in rvals] for c in costs], dtype=bool).reshape(fun.size, res.size)
    return mk_dp(fun, res, feas)


def relation_dp(fun: FinPoset, res: FinPoset, predicate: Callable[..., Any] | str | Formula) -> DesignProblem:
    """``feas(f, r) = predicate(f, r)``; formulas see both sides' axis names."""
    if isinstance(predicate, (str, Formula)):
        form = predicate if isinstance(predicate, Formula) else Formula(predicate)
        fenv, renv = _coords(fun), _coords(res)
        clash = set(fun.names) & set(res.names)
        if clash:
            raise ValueError(f"axis names {sorted(clash)} appear on both sides")
        feas = [[bool(form({**fe, **re})) for re in renv] for fe in fenv]
    else:
        feas = [[bool(predicate(fe, re)) for re in res.elements] for fe in fun.elements]
    return mk_dp(fun, res, np.array(feas, dtype=bool).reshape(fun.size, res.size))


def identity_dp(p: FinPoset) -> DesignProblem:
    return DesignProblem(p, p, p.leq)


def compose(phi: DesignProblem, psi: DesignProblem) -> DesignProblem:
    if phi.res != psi.fun:
        raise InterfaceMismatch(f"cannot compose: {phi.res!r} differs from {psi.fun!r}")
    return _checked(DesignProblem(phi.fun, psi.res, kernels.bool_matmul(phi.feas, psi.feas)))


def tensor(phi1: DesignProblem, phi2: DesignProblem) -> DesignProblem:
    a, b = phi1.feas, phi2.feas
    n1, m1 = a.shape
    n2, m2 = b.shape
    feas = (a[:, None, :, None] & b[None, :, None, :]).reshape(n1 * n2, m1 * m2)
    return DesignProblem(product(phi1.fun, phi2.fun), product(phi1.res, phi2.res), feas)


def cap(p: FinPoset) -> DesignProblem:
    """Unit -> P^op (x) P with ``feas(*, (p, p')) = [p <= p']``."""
    return DesignProblem(UNIT, product(opposite(p), p), p.leq.reshape(1, -1))


def cup(p: FinPoset) -> DesignProblem:
    """P (x) P^op -> Unit with ``feas((p, p'), *) = [p <= p']``."""
    return DesignProblem(product(p, opposite(p)), UNIT, p.leq.reshape(-1, 1))


def sym_dp(p: FinPoset, q: FinPoset) -> DesignProblem:
    """Symmetry P (x) Q -> Q (x) P: ``feas((p, q), (q', p')) = [p <= p'] and [q <= q']``."""
    n, m = p.size, q.size
    # axes (p, q, q', p') -> rows (p, q), cols (q', p')
    feas = p.leq[:, None, None, :] & q.leq[None, :, :, None]
    return DesignProblem(product(p, q), product(q, p), feas.reshape(n * m, m * n))


def leq_dp(phi: DesignProblem, psi: DesignProblem) -> bool:
    if phi.fun != psi.fun or phi.res != psi.res:
        raise InterfaceMismatch("leq_dp needs design problems with equal interfaces")
    return bool((phi.feas <= psi.feas).all())


def trace(phi: DesignProblem, x: FinPoset) -> DesignProblem:
    """Feed the trailing ``x`` factors of the resource back into the functionality.

    ``phi : A (x) X -> B (x) X`` becomes ``A -> B`` via compact closure.
    """
    k = len(x.factors)
    a, xf = phi.fun.split(len(phi.fun.factors) - k)
    b, xr = phi.res.split(len(phi.res.factors) - k)
    if xf != x or xr != x:
        raise InterfaceMismatch(f"trace wire {x!r} is not the trailing factor of both interfaces")
    xo = opposite(x)
    step1 = tensor(identity_dp(a), cap(xo))
    step2 = tensor(phi, identity_dp(xo))
    step3 = tensor(identity_dp(b), cup(x))
    return compose(compose(step1, step2), step3)


def from_descriptor(desc: Mapping[str, Any], posets: Mapping[str, FinPoset] | None = None,
                    env: Mapping[str, Any] | None = None) -> DesignProblem:
    """Build a DP from a JSON descriptor.

    ``env`` supplies extra formula variables (parameters of a family).
    """
    posets = posets or {}
    if len(desc) != 1:
        raise ValueError("DP descriptor must have exactly one key")
    (tag, body), = desc.items()
    fun = poset_from_descriptor(body["fun"] if "fun" in body else body["fun_grid"], posets)
    res = poset_from_descriptor(body["res"] if "res" in body else body["res_grid"], posets)
    if tag == "matrix":
        return mk_dp(fun, res, np.array(body["rows"], dtype=bool).reshape(fun.size, res.size))
    if tag == "identity":
        return identity_dp(fun)
    extra = dict(env or {})
    if tag == "threshold":
        form = Formula(body["formula"])
        fn = lambda *coords: form({**dict(zip(fun.names, coords)), **extra})  # noqa: E731
        return threshold_dp(fun, res, fn)
    if tag == "relation":
        form = Formula(body["formula"])
        fn = lambda f, r: form({**dict(zip(fun.names, f)), **dict(zip(res.names, r)), **extra})  # noqa: E731
        return relation_dp(fun, res, fn)
    raise ValueError(f"unknown DP descriptor {tag!r}")
