"""Random and exhaustive instance generators for law checking and tests.

All randomness flows through an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import itertools
from typing import Iterator

import numpy as np

from . import kernels
from .dp import DesignProblem, mk_dp
from .errors import MonotonicityViolation
from .monad import MonadKind, UncertainValue, as_kind, monad
from .para import ParamCell, Repar, discrete_factor, param_space
from .poset import Factor, FinPoset, chain, mk_poset


def random_poset(rng: np.random.Generator, n: int, density: float = 0.35, name: str | None = None) -> FinPoset:
    """Random order on ``n`` labelled points: a random DAG along a random
    permutation, transitively closed."""
    perm = rng.permutation(n)
    rel = np.eye(n, dtype=bool)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                rel[perm[i], perm[j]] = True
    closed = kernels.transitive_closure(rel)
    labels = tuple(f"{name or 'x'}{i}" for i in range(n))
    return FinPoset((Factor(labels, closed, name),))


def random_dp(rng: np.random.Generator, fun: FinPoset, res: FinPoset, density: float = 0.25) -> DesignProblem:
    """Monotone closure of a random set of (f, r) generators.

    ``feas(f', r')`` holds iff some generator ``(f, r)`` has ``f' <= f`` and ``r <= r'``.
    """
    gen = rng.random((fun.size, res.size)) < density
    feas = kernels.bool_matmul(kernels.bool_matmul(fun.leq, gen), res.leq)
    return DesignProblem(fun, res, feas)


def dp_union(a: DesignProblem, b: DesignProblem) -> DesignProblem:
    return DesignProblem(a.fun, a.res, a.feas | b.feas)


def all_dps(fun: FinPoset, res: FinPoset) -> list[DesignProblem]:
    """Every monotone feasibility relation between two (small) posets."""
    n = fun.size * res.size
    if n > 16:
        raise ValueError("exhaustive enumeration is limited to 16 matrix entries")
    out = []
    for bits in itertools.product((False, True), repeat=n):
        try:
            out.append(mk_dp(fun, res, np.array(bits, dtype=bool).reshape(fun.size, res.size)))
        except MonotonicityViolation:
            continue
    return out


def small_posets(max_size: int = 2) -> list[FinPoset]:
    """One representative per isomorphism class of posets with 1..max_size (<= 2) points."""
    out = [chain(("a",), "P1")]
    if max_size >= 2:
        out.append(chain(("a", "b"), "C2"))
        out.append(mk_poset(("a", "b"), (), "A2"))
    return out


def all_labelled_posets(n: int) -> Iterator[FinPoset]:
    """Every partial order on the labels ``0..n-1`` (labelled, not up to isomorphism)."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    seen = set()
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = np.eye(n, dtype=bool)
        for (i, j), b in zip(pairs, bits):
            rel[i, j] = b
        closed = kernels.transitive_closure(rel)
        if not np.array_equal(closed, rel):
            continue
        if (closed & closed.T & ~np.eye(n, dtype=bool)).any():
            continue
        key = closed.tobytes()
        if key not in seen:
            seen.add(key)
            yield FinPoset((Factor(tuple(range(n)), closed, f"P{n}"),))


# --- uncertain values and cells --------------------------------------------

def random_uncertain_dp(rng: np.random.Generator, kind: MonadKind, fun: FinPoset, res: FinPoset,
                        max_support: int = 3) -> UncertainValue:
    kind = as_kind(kind)
    m = monad(kind)
    if kind is MonadKind.IDENTITY:
        return m.unit(random_dp(rng, fun, res))
    if kind is MonadKind.INTERVAL:
        lo = random_dp(rng, fun, res)
        return UncertainValue.of_interval(lo, dp_union(lo, random_dp(rng, fun, res)))
    k = int(rng.integers(1, max_support + 1))
    dps = [random_dp(rng, fun, res) for _ in range(k)]
    if kind is MonadKind.POWERSET:
        return UncertainValue.of_set(dps)
    w = rng.random(k) + 0.05
    w = w / w.sum()
    return UncertainValue.of_atoms(list(zip(dps, w.tolist())))


def random_param_space(rng: np.random.Generator, max_factors: int = 2, max_points: int = 3,
                       prefix: str = "u") -> FinPoset:
    nf = int(rng.integers(0, max_factors + 1))
    factors = []
    for i in range(nf):
        n = int(rng.integers(1, max_points + 1))
        factors.append(discrete_factor(f"{prefix}{i}", tuple(f"{prefix}{i}_{j}" for j in range(n))))
    return param_space(*factors)


def random_cell(rng: np.random.Generator, kind: MonadKind, fun: FinPoset, res: FinPoset,
                dom: FinPoset | None = None, prefix: str = "u") -> ParamCell:
    dom = dom if dom is not None else random_param_space(rng, prefix=prefix)
    table = [random_uncertain_dp(rng, kind, fun, res) for _ in range(dom.size)]
    return ParamCell(kind, dom, fun, res, table)


def random_repar(rng: np.random.Generator, kind: MonadKind, dom: FinPoset, cod: FinPoset) -> Repar:
    """Random Kleisli map between parameter spaces.  Interval repars need ordered
    codomains; over discrete factors they are degenerate (``[a, a]``)."""
    kind = as_kind(kind)
    pts = cod.elements
    m = monad(kind)
    table = []
    for _ in dom.elements:
        if kind in (MonadKind.IDENTITY, MonadKind.INTERVAL):
            table.append(m.unit(pts[int(rng.integers(len(pts)))], cod.le))
            continue
        k = int(rng.integers(1, min(3, len(pts)) + 1))
        picks = [pts[int(i)] for i in rng.choice(len(pts), size=k, replace=False)]
        if kind is MonadKind.POWERSET:
            table.append(UncertainValue.of_set(picks))
        else:
            w = rng.random(k) + 0.05
            table.append(UncertainValue.of_atoms(list(zip(picks, (w / w.sum()).tolist()))))
    return Repar(kind, dom, cod, table)
