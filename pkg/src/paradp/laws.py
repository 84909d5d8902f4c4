"""Executable law suites for the monads, the DP category and parametrized cells.

Every check produces a :class:`LawResult`; failures carry a short witness
instead of raising.  All sampling goes through a seeded numpy generator, so a
report is a pure function of its arguments.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import dp as _dp
from .dp import DesignProblem
from .errors import ParadpError
from .monad import (
    DIST_TOL,
    CorruptedIntervalMonad,
    Monad,
    MonadKind,
    UncertainValue,
    as_kind,
    monad,
    values_equal,
)
from .para import (
    ParamCell,
    cells_equal,
    check_2cell,
    coherence_cell,
    hcompose,
    identity_cell,
    include,
    swap_repar,
    tensor_cell,
    tensorator,
)
from .poset import FinPoset, product
from .samples import (
    all_dps,
    all_labelled_posets,
    random_cell,
    random_dp,
    random_poset,
    small_posets,
)

ALL_KINDS = (MonadKind.IDENTITY, MonadKind.POWERSET, MonadKind.INTERVAL, MonadKind.DISTRIBUTION)


@dataclass
class LawResult:
    suite: str
    law: str
    checked: int = 0
    failures: int = 0
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checked > 0

    @property
    def name(self) -> str:
        return f"{self.suite}.{self.law}"

    def record(self, ok: bool, witness: Callable[[], str] | str | None = None) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.witness is None and witness is not None:
                self.witness = witness() if callable(witness) else witness

    def as_dict(self) -> dict:
        return {"law": self.name, "passed": self.passed, "checked": self.checked,
                "failures": self.failures, "witness": self.witness}


@dataclass
class LawReport:
    results: list[LawResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def extend(self, other: "LawReport | Iterable[LawResult]") -> "LawReport":
        self.results.extend(other.results if isinstance(other, LawReport) else other)
        return self

    def failed(self) -> list[LawResult]:
        return [r for r in self.results if not r.passed]

    def get(self, name: str) -> LawResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "laws": [r.as_dict() for r in self.results]}


class _Suite:
    def __init__(self, suite: str):
        self.suite = suite
        self.results: dict[str, LawResult] = {}

    def __getitem__(self, law: str) -> LawResult:
        r = self.results.get(law)
        if r is None:
            r = self.results[law] = LawResult(self.suite, law)
        return r

    def check(self, law: str, thunk: Callable[[], bool], witness: Callable[[], str]) -> None:
        try:
            ok = bool(thunk())
        except ParadpError as exc:
            self[law].record(False, f"{witness()}: {type(exc).__name__}: {exc}")
            return
        self[law].record(ok, witness)

    def report(self) -> LawReport:
        return LawReport(list(self.results.values()))


# --- monad laws --------------------------------------------------------------

class _Gen:
    """Random uncertain values over integer chains ``0..n-1``.

    Interval continuations are drawn monotone so that the bind is defined.
    """

    def __init__(self, kind: MonadKind, rng: np.random.Generator, n: int = 3):
        self.kind, self.rng, self.n = kind, rng, n

    def value(self, pts: list | None = None) -> UncertainValue:
        rng = self.rng
        pts = list(range(self.n)) if pts is None else pts
        if self.kind is MonadKind.IDENTITY:
            return UncertainValue.single(pts[int(rng.integers(len(pts)))])
        if self.kind is MonadKind.INTERVAL:
            i, j = sorted(int(v) for v in rng.integers(len(pts), size=2))
            return UncertainValue.of_interval(pts[i], pts[j])
        k = int(rng.integers(1, min(3, len(pts)) + 1))
        picks = [pts[int(i)] for i in rng.choice(len(pts), size=k, replace=False)]
        if self.kind is MonadKind.POWERSET:
            return UncertainValue.of_set(picks)
        w = rng.random(k) + 0.05
        return UncertainValue.of_atoms(list(zip(picks, (w / w.sum()).tolist())))

    def nested(self) -> UncertainValue:
        """A value of ``M M X``."""
        if self.kind is MonadKind.IDENTITY:
            return UncertainValue.single(self.value())
        if self.kind is MonadKind.INTERVAL:
            a1, a2, b1, b2 = self._two_intervals()
            return UncertainValue.of_interval(UncertainValue.of_interval(a1, a2),
                                              UncertainValue.of_interval(b1, b2))
        inner = [self.value() for _ in range(int(self.rng.integers(1, 4)))]
        if self.kind is MonadKind.POWERSET:
            return UncertainValue.of_set(inner)
        w = self.rng.random(len(inner)) + 0.05
        return UncertainValue.of_atoms(list(zip(inner, (w / w.sum()).tolist())))

    def _two_intervals(self) -> tuple[int, int, int, int]:
        # [a1, a2] <= [b1, b2] in the end-point order
        a1 = int(self.rng.integers(self.n))
        a2 = int(self.rng.integers(a1, self.n))
        b1 = int(self.rng.integers(a1, self.n))
        b2 = int(self.rng.integers(max(a2, b1), self.n))
        return a1, a2, b1, b2

    def point_map(self) -> Callable[[int], int]:
        """A carrier map; monotone for intervals."""
        vals = self.rng.integers(self.n, size=self.n)
        if self.kind is MonadKind.INTERVAL:
            vals = np.sort(vals)
        table = [int(v) for v in vals]
        return table.__getitem__

    def kleisli(self) -> Callable[[int], UncertainValue]:
        if self.kind is MonadKind.INTERVAL:
            lo = np.sort(self.rng.integers(self.n, size=self.n))
            hi = np.maximum(lo, np.sort(self.rng.integers(self.n, size=self.n)))
            table = [UncertainValue.of_interval(int(a), int(b)) for a, b in zip(lo, hi)]
        else:
            table = [self.value() for _ in range(self.n)]
        return table.__getitem__


def _swap(p: tuple) -> tuple:
    return (p[1], p[0])


def check_monad_laws(kind: MonadKind | str, samples: int = 200, seed: int = 0,
                     corrupt: bool = False, carrier_size: int = 3,
                     tol: float = DIST_TOL) -> LawReport:
    """Sample the monad and symmetric-monoidal-monad laws for one kind.

    ``corrupt=True`` swaps in an interval multiplication ``[[a,b],[c,d]] -> [c,b]``
    (interval kind only) to show that the suite notices broken structure.
    """
    kind = as_kind(kind)
    m: Monad = monad(kind)
    if corrupt:
        if kind is not MonadKind.INTERVAL:
            raise ValueError("only the interval monad has a corrupted variant")
        m = CorruptedIntervalMonad()
    rng = np.random.default_rng(seed)
    gen = _Gen(kind, rng, carrier_size)
    s = _Suite(f"monad.{kind.value}")
    eq = lambda a, b: values_equal(kind, a, b, tol)  # noqa: E731

    for _ in range(samples):
        x = int(rng.integers(carrier_size))
        v, w, u = gen.value(), gen.value(), gen.value()
        k, g = gen.kleisli(), gen.kleisli()
        h1, h2 = gen.point_map(), gen.point_map()
        mm = gen.nested()

        s.check("left_unit", lambda: eq(m.bind(m.unit(x), k), k(x)),
                lambda: f"x={x}, k(x)={k(x)!r}")
        s.check("right_unit", lambda: eq(m.bind(v, m.unit), v), lambda: f"m={v!r}")
        s.check("associativity",
                lambda: eq(m.bind(m.bind(v, k), g), m.bind(v, lambda y: m.bind(k(y), g))),
                lambda: f"m={v!r}, k={[k(i) for i in range(carrier_size)]!r}, "
                        f"g={[g(i) for i in range(carrier_size)]!r}")
        s.check("join_unit",
                lambda: eq(m.join(m.unit(v)), v) and eq(m.join(m.fmap(v, m.unit)), v),
                lambda: f"m={v!r}")
        s.check("join_naturality",
                lambda: eq(m.fmap(m.join(mm), h1), m.join(m.fmap(mm, lambda i: m.fmap(i, h1)))),
                lambda: f"mm={mm!r}")
        s.check("strength_naturality",
                lambda: eq(m.fmap(m.strength(v, w), lambda p: (h1(p[0]), h2(p[1]))),
                           m.strength(m.fmap(v, h1), m.fmap(w, h2))),
                lambda: f"m1={v!r}, m2={w!r}")
        s.check("strength_symmetry",
                lambda: eq(m.fmap(m.strength(v, w), _swap), m.strength(w, v)),
                lambda: f"m1={v!r}, m2={w!r}")
        s.check("strength_associativity",
                lambda: eq(m.fmap(m.strength(m.strength(v, w), u), lambda p: (p[0][0], (p[0][1], p[1]))),
                           m.strength(v, m.strength(w, u))),
                lambda: f"m1={v!r}, m2={w!r}, m3={u!r}")
        s.check("strength_unit",
                lambda: eq(m.fmap(m.strength(m.unit(()), v), lambda p: p[1]), v),
                lambda: f"m={v!r}")
        y = int(rng.integers(carrier_size))
        s.check("unit_monoidal",
                lambda: eq(m.strength(m.unit(x), m.unit(y)), m.unit((x, y))),
                lambda: f"x={x}, y={y}")
        mm2 = gen.nested()
        s.check("join_monoidal",
                lambda: eq(m.strength(m.join(mm), m.join(mm2)),
                           m.join(m.fmap(m.strength(mm, mm2), lambda p: m.strength(p[0], p[1])))),
                lambda: f"mm1={mm!r}, mm2={mm2!r}")
        one = gen.value([()])
        s.check("affine", lambda: eq(one, m.unit(())), lambda: f"value over 1 = {one!r}")
        s.check("deletion", lambda: eq(m.fmap(v, lambda _: ()), m.unit(())), lambda: f"m={v!r}")
        if kind is MonadKind.DISTRIBUTION:
            def mass_ok() -> bool:
                outs = (m.bind(v, k), m.strength(v, w), m.join(mm))
                return all(abs(sum(p for _, p in o.payload) - 1.0) <= tol for o in outs)
            s.check("mass_conservation", mass_ok, lambda: f"m1={v!r}, m2={w!r}")
    return s.report()


# --- DP category laws ----------------------------------------------------------

def _dp_witness(*dps: DesignProblem) -> Callable[[], str]:
    return lambda: "; ".join(
        f"{d.fun.size}x{d.res.size} {np.asarray(d.feas, dtype=int).tolist()}" for d in dps
    )


def _snake_checks(s: _Suite, p: FinPoset) -> None:
    # (id_P (x) cap) ; (cup (x) id_P) = id_P  and  (cap (x) id_P^op) ; (id_P^op (x) cup) = id_P^op
    ip, iop = _dp.identity_dp(p), _dp.identity_dp(p.op)
    cap, cup = _dp.cap(p), _dp.cup(p)
    snake1 = _dp.compose(_dp.tensor(cap, iop), _dp.tensor(iop, cup))
    snake2 = _dp.compose(_dp.tensor(ip, cap), _dp.tensor(cup, ip))
    s.check("snake_left", lambda: snake1 == iop, lambda: f"P leq={np.asarray(p.leq, dtype=int).tolist()}")
    s.check("snake_right", lambda: snake2 == ip, lambda: f"P leq={np.asarray(p.leq, dtype=int).tolist()}")


def _assoc_check(s: _Suite, a: DesignProblem, b: DesignProblem, c: DesignProblem) -> None:
    comp = _dp.compose
    s.check("associativity", lambda: comp(comp(a, b), c) == comp(a, comp(b, c)), _dp_witness(a, b, c))


def _unit_checks(s: _Suite, a: DesignProblem) -> None:
    comp = _dp.compose
    s.check("left_unit", lambda: comp(_dp.identity_dp(a.fun), a) == a, _dp_witness(a))
    s.check("right_unit", lambda: comp(a, _dp.identity_dp(a.res)) == a, _dp_witness(a))


def _exhaustive_interchange(s: _Suite, homs: dict, n: int) -> None:
    """Every square ``(f1 ; g1) (x) (f2 ; g2)`` over the representative posets.

    Sub-terms that recur across squares (composites of pairs, tensors of pairs)
    are computed once; each square still gets its own ``compose`` call.
    """
    comp, ten = _dp.compose, _dp.tensor
    interned: dict[DesignProblem, DesignProblem] = {}
    pairs = [(f, g, interned.setdefault(comp(f, g), comp(f, g)))
             for i, j, k in itertools.product(range(n), repeat=3)
             for f in homs[i, j] for g in homs[j, k]]
    tens: dict[tuple, DesignProblem] = {}

    def t(x: DesignProblem, y: DesignProblem) -> DesignProblem:
        key = (x, y)
        out = tens.get(key)
        if out is None:
            out = tens[key] = ten(x, y)
        return out

    res = s["interchange"]
    for f1, g1, c1 in pairs:
        for f2, g2, c2 in pairs:
            try:
                ok = t(c1, c2) == comp(t(f1, f2), t(g1, g2))
            except ParadpError:
                ok = False
            res.record(ok, _dp_witness(f1, g1, f2, g2))


def _interchange(s: _Suite, f1: DesignProblem, g1: DesignProblem, f2: DesignProblem,
                 g2: DesignProblem) -> None:
    comp, ten = _dp.compose, _dp.tensor
    s.check("interchange",
            lambda: ten(comp(f1, g1), comp(f2, g2)) == comp(ten(f1, f2), ten(g1, g2)),
            _dp_witness(f1, g1, f2, g2))


def check_dp_laws(samples: int = 500, seed: int = 0, exhaustive: bool = True,
                  max_size: int = 5, snake_exhaustive_size: int = 4) -> LawReport:
    """Category, interchange and compact-closure laws of DP, with exact Boolean equality.

    The exhaustive pass covers every monotone relation between posets of at
    most two points (one representative per isomorphism class) and every
    labelled poset up to ``snake_exhaustive_size`` points for the snakes.
    """
    s = _Suite("dp")
    if exhaustive:
        reps = small_posets(2)
        homs = {(i, j): all_dps(a, b) for i, a in enumerate(reps) for j, b in enumerate(reps)}
        n = len(reps)
        for hom in homs.values():
            for a in hom:
                _unit_checks(s, a)
        for i, j, k, l in itertools.product(range(n), repeat=4):
            for a in homs[i, j]:
                for b in homs[j, k]:
                    for c in homs[k, l]:
                        _assoc_check(s, a, b, c)
        _exhaustive_interchange(s, homs, n)
        for size in range(1, snake_exhaustive_size + 1):
            for p in all_labelled_posets(size):
                _snake_checks(s, p)

    rng = np.random.default_rng(seed)

    def rp() -> FinPoset:
        return random_poset(rng, int(rng.integers(1, max_size + 1)))

    for _ in range(samples):
        p1, p2, p3, p4 = rp(), rp(), rp(), rp()
        a, b, c = random_dp(rng, p1, p2), random_dp(rng, p2, p3), random_dp(rng, p3, p4)
        _assoc_check(s, a, b, c)
        _unit_checks(s, a)
        q1, q2, q3 = (random_poset(rng, int(rng.integers(1, 4))) for _ in range(3))
        _interchange(s, random_dp(rng, p1, p2), random_dp(rng, p2, p3),
                     random_dp(rng, q1, q2), random_dp(rng, q2, q3))
        _snake_checks(s, p1)
        s.check("symmetry_involution",
                lambda: _dp.compose(_dp.sym_dp(p1, p2), _dp.sym_dp(p2, p1)) == _dp.identity_dp(product(p1, p2)),
                lambda: f"|P|={p1.size}, |Q|={p2.size}")
        a2 = random_dp(rng, p1, p2)
        lo, hi = a, DesignProblem(a.fun, a.res, a.feas | a2.feas)
        s.check("compose_monotone",
                lambda: _dp.leq_dp(_dp.compose(lo, b), _dp.compose(hi, b)),
                _dp_witness(lo, hi, b))
    return s.report()


# --- parametrized cells ----------------------------------------------------------

def check_para_laws(kind: MonadKind | str, samples: int = 100, seed: int = 0,
                    max_size: int = 3, tol: float = DIST_TOL) -> LawReport:
    """Bicategorical structure of parametrized cells for one monad kind.

    Associativity and unitality of series composition hold on the nose because
    parameter spaces are flat factor lists.  Interchange holds up to the
    tensorator, and symmetry naturality up to the parameter swap.
    """
    kind = as_kind(kind)
    rng = np.random.default_rng(seed)
    s = _Suite(f"para.{kind.value}")
    eqc = lambda f, g: cells_equal(f, g, tol)  # noqa: E731

    def rp() -> FinPoset:
        return random_poset(rng, int(rng.integers(1, max_size + 1)))

    def cell(a: FinPoset, b: FinPoset, prefix: str):
        return random_cell(rng, kind, a, b, prefix=prefix)

    for _ in range(samples):
        x1, x2, x3, y1, y2, y3 = (rp() for _ in range(6))
        f1, g1 = cell(x1, x2, "u"), cell(x2, x3, "v")
        f2, g2 = cell(y1, y2, "w"), cell(y2, y3, "z")
        h = cell(x3, y1, "t")

        s.check("hcompose_associativity",
                lambda: eqc(hcompose(hcompose(f1, g1), h), hcompose(f1, hcompose(g1, h))),
                lambda: f"{f1!r} ; {g1!r} ; {h!r}")
        s.check("hcompose_unitality",
                lambda: eqc(hcompose(identity_cell(kind, x1), f1), f1)
                and eqc(hcompose(f1, identity_cell(kind, x2)), f1),
                lambda: repr(f1))

        lhs = hcompose(tensor_cell(f1, f2), tensor_cell(g1, g2))
        rhs = tensor_cell(hcompose(f1, g1), hcompose(f2, g2))

        def interchange() -> bool:
            res = check_2cell(tensorator(f1, f2, g1, g2), lhs, rhs, tol)
            return bool(res)
        s.check("interchange_tensorator", interchange,
                lambda: f"{f1!r}, {f2!r}, {g1!r}, {g2!r}")

        a, b = random_dp(rng, x1, x2), random_dp(rng, x2, x3)
        c = random_dp(rng, y1, y2)
        s.check("inclusion_compose",
                lambda: eqc(include(kind, _dp.compose(a, b)), hcompose(include(kind, a), include(kind, b))),
                _dp_witness(a, b))
        s.check("inclusion_tensor",
                lambda: eqc(include(kind, _dp.tensor(a, c)), tensor_cell(include(kind, a), include(kind, c))),
                _dp_witness(a, c))
        s.check("inclusion_identity",
                lambda: eqc(include(kind, _dp.identity_dp(x1)), identity_cell(kind, x1)),
                lambda: f"|X|={x1.size}")
        s.check("inclusion_coherence",
                lambda: eqc(coherence_cell(kind, "sym", x1, y1), include(kind, _dp.sym_dp(x1, y1)))
                and eqc(coherence_cell(kind, "assoc", x1, x2, y1), identity_cell(kind, product(x1, x2, y1)))
                and eqc(coherence_cell(kind, "lunit", x1), identity_cell(kind, x1)),
                lambda: f"|X|={x1.size}, |Y|={y1.size}")

        s.check("sym_involution",
                lambda: eqc(hcompose(coherence_cell(kind, "sym", x1, y1), coherence_cell(kind, "sym", y1, x1)),
                            identity_cell(kind, product(x1, y1))),
                lambda: f"|X|={x1.size}, |Y|={y1.size}")

        def sym_natural() -> bool:
            left = hcompose(tensor_cell(f1, f2), coherence_cell(kind, "sym", x2, y2))
            right = hcompose(coherence_cell(kind, "sym", x1, y1), tensor_cell(f2, f1))
            return bool(check_2cell(swap_repar(kind, f1.dom, f2.dom), left, right, tol))
        s.check("sym_naturality_swap", sym_natural, lambda: f"{f1!r}, {f2!r}")

        def snakes() -> bool:
            ip, iop = identity_cell(kind, x1), identity_cell(kind, x1.op)
            cap, cup = include(kind, _dp.cap(x1)), include(kind, _dp.cup(x1))
            right = hcompose(tensor_cell(ip, cap), tensor_cell(cup, ip))
            left = hcompose(tensor_cell(cap, iop), tensor_cell(iop, cup))
            return eqc(right, ip) and eqc(left, iop)
        s.check("snakes", snakes, lambda: f"P leq={np.asarray(x1.leq, dtype=int).tolist()}")
    return s.report()


def check_instance_laws(kind: MonadKind | str, dps: dict[str, DesignProblem],
                        cells: dict[str, ParamCell], posets: dict[str, FinPoset],
                        tol: float = DIST_TOL, limit: int = 2000) -> LawReport:
    """Laws on the named objects of a bundle: units, associativity and snakes on
    its DPs and posets, interchange up to the tensorator on its cells.

    ``limit`` caps the number of composable triples / squares examined.
    """
    kind = as_kind(kind)
    s = _Suite("instance")
    dl = [dps[k] for k in sorted(dps)]
    for d in dl:
        _unit_checks(s, d)
    triples = ((a, b, c) for a in dl for b in dl if a.res == b.fun for c in dl if b.res == c.fun)
    for a, b, c in itertools.islice(triples, limit):
        _assoc_check(s, a, b, c)
    for name in sorted(posets):
        _snake_checks(s, posets[name])
    cl = [cells[k] for k in sorted(cells)] + [include(kind, d) for d in dl]
    pairs = [(f, g) for f in cl for g in cl if f.tgt == g.src]
    squares = ((p, q) for p in pairs for q in pairs)
    for (f1, g1), (f2, g2) in itertools.islice(squares, limit):
        lhs = hcompose(tensor_cell(f1, f2), tensor_cell(g1, g2))
        rhs = tensor_cell(hcompose(f1, g1), hcompose(f2, g2))
        s.check("interchange_tensorator",
                lambda: bool(check_2cell(tensorator(f1, f2, g1, g2), lhs, rhs, tol)),
                lambda: f"{f1!r}, {f2!r}, {g1!r}, {g2!r}")
    return s.report()


def builtin_suite(seed: int = 0, samples: int | None = None, corrupt_mu: bool = False,
                  kinds: Iterable[MonadKind] = ALL_KINDS) -> LawReport:
    """Everything ``paradp check-laws`` runs without a bundle."""
    report = LawReport()
    n_monad = samples or 200
    n_dp = samples or 500
    n_para = samples or 100
    for i, kind in enumerate(kinds):
        report.extend(check_monad_laws(kind, n_monad, seed + i,
                                       corrupt=corrupt_mu and kind is MonadKind.INTERVAL))
    report.extend(check_dp_laws(n_dp, seed))
    for i, kind in enumerate(kinds):
        report.extend(check_para_laws(kind, n_para, seed + i))
    return report


__all__ = [
    "ALL_KINDS", "LawReport", "LawResult", "builtin_suite", "check_dp_laws", "check_instance_laws",
    "check_monad_laws", "check_para_laws",
]
