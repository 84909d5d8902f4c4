"""Uncertainty monads over finite carriers.

Four kinds are supported: identity, nonempty powerset, intervals (which need
an order on the carrier) and finite-support distributions.  Values are
immutable :class:`UncertainValue` objects; :func:`monad` returns the
operations (unit, bind, join, strength) for a kind.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import InvalidValue, KindMismatch, PartialMap, UnorderedCarrier

DIST_TOL = 1e-9


class MonadKind(str, enum.Enum):
    IDENTITY = "identity"
    POWERSET = "powerset"
    INTERVAL = "interval"
    DISTRIBUTION = "distribution"

    def __str__(self) -> str:
        return self.value


def as_kind(kind: MonadKind | str) -> MonadKind:
    try:
        return MonadKind(kind)
    except ValueError:
        raise KindMismatch(f"unknown monad kind {kind!r}") from None


# --- canonical ordering and carrier orders --------------------------------

def sort_key(x: Any):
    """Deterministic total preorder on carriers, used for canonical payload order."""
    k = getattr(x, "_sort_key", None)
    if k is not None:
        return (0, type(x).__name__, k())
    if isinstance(x, tuple):
        return (1, tuple(sort_key(y) for y in x))
    if isinstance(x, (int, Fraction, float)) and not isinstance(x, bool):
        return (2, x)
    if isinstance(x, str):
        return (3, x)
    return (4, type(x).__name__, repr(x))


def carrier_leq(a: Any, b: Any) -> bool:
    """Default order on carriers: DP pointwise order, numbers, tuples componentwise,
    intervals by end-points."""
    from .dp import DesignProblem, leq_dp
    from .poset import Antichain, antichain_leq

    if isinstance(a, DesignProblem) and isinstance(b, DesignProblem):
        return leq_dp(a, b)
    if isinstance(a, Antichain) and isinstance(b, Antichain):
        return antichain_leq(a, b)
    if isinstance(a, UncertainValue) and isinstance(b, UncertainValue) \
            and a.kind is b.kind is MonadKind.INTERVAL:
        return a.leq(a.lo, b.lo) and a.leq(a.hi, b.hi)
    if isinstance(a, tuple) and isinstance(b, tuple) and len(a) == len(b):
        return all(carrier_leq(x, y) for x, y in zip(a, b))
    num = (int, float, Fraction)
    if isinstance(a, num) and isinstance(b, num) and not isinstance(a, bool) and not isinstance(b, bool):
        return a <= b
    raise UnorderedCarrier(f"no order known between {a!r} and {b!r}; pass leq explicitly")


# --- values -----------------------------------------------------------------

class UncertainValue:
    """A monad-tagged payload.

    identity: the carrier itself; powerset: a tuple of distinct carriers in
    canonical order; interval: ``(lo, hi)``; distribution: a tuple of
    ``(carrier, probability)`` atoms in canonical order.
    """

    __slots__ = ("kind", "payload", "leq", "_cmp", "_hash")

    def __init__(self, kind: MonadKind, payload: Any, leq: Callable[[Any, Any], bool] | None = None,
                 _cmp: Any = None):
        self.kind = kind
        self.payload = payload
        self.leq = leq
        self._cmp = _cmp if _cmp is not None else payload
        self._hash = hash((kind, self._cmp))

    # constructors ----------------------------------------------------------
    @classmethod
    def single(cls, x: Any) -> "UncertainValue":
        return cls(MonadKind.IDENTITY, x)

    @classmethod
    def of_set(cls, items: Iterable[Any]) -> "UncertainValue":
        fs = frozenset(items)
        if not fs:
            raise InvalidValue("powerset values must be nonempty")
        return cls(MonadKind.POWERSET, tuple(sorted(fs, key=sort_key)), _cmp=fs)

    @classmethod
    def of_interval(cls, lo: Any, hi: Any, leq: Callable[[Any, Any], bool] | None = None) -> "UncertainValue":
        leq = leq or carrier_leq
        if not leq(lo, hi):
            raise InvalidValue(f"interval end-points out of order: {lo!r} > {hi!r}")
        return cls(MonadKind.INTERVAL, (lo, hi), leq)

    @classmethod
    def of_atoms(cls, atoms: Iterable[tuple[Any, float]] | Mapping[Any, float],
                 tol: float = DIST_TOL) -> "UncertainValue":
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        mass: dict[Any, float] = {}
        for x, p in items:
            p = float(p)
            if p < 0 or math.isnan(p):
                raise InvalidValue(f"negative or NaN probability {p} for {x!r}")
            mass[x] = mass.get(x, 0.0) + p
        total = math.fsum(mass.values())
        if abs(total - 1.0) > tol:
            raise InvalidValue(f"probabilities sum to {total!r}, not 1")
        atoms_ = tuple(sorted(((x, p) for x, p in mass.items() if p > 0), key=lambda a: sort_key(a[0])))
        return cls(MonadKind.DISTRIBUTION, atoms_, _cmp=frozenset(atoms_))

    # accessors -----------------------------------------------------------
    @property
    def lo(self):
        return self.payload[0]

    @property
    def hi(self):
        return self.payload[1]

    def support(self) -> tuple:
        k = self.kind
        if k is MonadKind.IDENTITY:
            return (self.payload,)
        if k is MonadKind.POWERSET:
            return self.payload
        if k is MonadKind.INTERVAL:
            return self.payload if self.lo != self.hi else (self.lo,)
        return tuple(x for x, _ in self.payload)

    def mass(self) -> dict:
        if self.kind is not MonadKind.DISTRIBUTION:
            raise KindMismatch("mass() is only defined for distributions")
        return dict(self.payload)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UncertainValue):
            return NotImplemented
        return self.kind is other.kind and self._cmp == other._cmp

    def __hash__(self) -> int:
        return self._hash

    def _sort_key(self):
        if self.kind is MonadKind.DISTRIBUTION:
            return (self.kind.value, tuple((sort_key(x), p) for x, p in self.payload))
        if self.kind is MonadKind.IDENTITY:
            return (self.kind.value, sort_key(self.payload))
        return (self.kind.value, tuple(sort_key(x) for x in self.payload))

    def __repr__(self) -> str:
        k = self.kind
        if k is MonadKind.IDENTITY:
            return f"Id({self.payload!r})"
        if k is MonadKind.POWERSET:
            return "{" + ", ".join(map(repr, self.payload)) + "}"
        if k is MonadKind.INTERVAL:
            return f"[{self.lo!r}, {self.hi!r}]"
        return "Dist(" + ", ".join(f"{x!r}: {p:.6g}" for x, p in self.payload) + ")"


# --- monad operations -------------------------------------------------------

def _pair(x: Any, y: Any) -> tuple:
    return (x, y)


class Monad:
    kind: MonadKind

    def unit(self, x: Any, leq=None) -> UncertainValue:
        raise NotImplementedError

    def bind(self, m: UncertainValue, k: Callable[[Any], UncertainValue]) -> UncertainValue:
        raise NotImplementedError

    def strength(self, m1: UncertainValue, m2: UncertainValue,
                 pair: Callable[[Any, Any], Any] = _pair, leq=None) -> UncertainValue:
        """``leq`` orders the paired carriers; only intervals use it."""
        raise NotImplementedError

    def fmap(self, m: UncertainValue, h: Callable[[Any], Any], leq=None) -> UncertainValue:
        return self.bind(m, lambda x: self.unit(h(x)))

    def join(self, mm: UncertainValue) -> UncertainValue:
        return self.bind(mm, lambda m: m)

    def check(self, m: UncertainValue) -> UncertainValue:
        if not isinstance(m, UncertainValue) or m.kind is not self.kind:
            got = m.kind if isinstance(m, UncertainValue) else type(m).__name__
            raise KindMismatch(f"expected a {self.kind} value, got {got}")
        return m


class IdentityMonad(Monad):
    kind = MonadKind.IDENTITY

    def unit(self, x, leq=None):
        return UncertainValue.single(x)

    def bind(self, m, k):
        return self.check(k(self.check(m).payload))

    def strength(self, m1, m2, pair=_pair, leq=None):
        return UncertainValue.single(pair(self.check(m1).payload, self.check(m2).payload))


class PowersetMonad(Monad):
    kind = MonadKind.POWERSET

    def unit(self, x, leq=None):
        return UncertainValue.of_set((x,))

    def bind(self, m, k):
        out = set()
        for x in self.check(m).payload:
            out.update(self.check(k(x)).payload)
        return UncertainValue.of_set(out)

    def strength(self, m1, m2, pair=_pair, leq=None):
        return UncertainValue.of_set(
            pair(x, y) for x in self.check(m1).payload for y in self.check(m2).payload
        )


class IntervalMonad(Monad):
    """Intervals ordered by end-points; continuations must be monotone."""

    kind = MonadKind.INTERVAL

    def unit(self, x, leq=None):
        return UncertainValue.of_interval(x, x, leq)

    def join(self, mm):
        outer = self.check(mm)
        lo, hi = self.check(outer.lo), self.check(outer.hi)
        return UncertainValue.of_interval(lo.lo, hi.hi, lo.leq)

    def bind(self, m, k):
        m = self.check(m)
        klo, khi = self.check(k(m.lo)), self.check(k(m.hi))
        return self.join(UncertainValue(MonadKind.INTERVAL, (klo, khi), carrier_leq))

    def fmap(self, m, h, leq=None):
        m = self.check(m)
        return UncertainValue.of_interval(h(m.lo), h(m.hi), leq)

    def strength(self, m1, m2, pair=_pair, leq=None):
        m1, m2 = self.check(m1), self.check(m2)
        if leq is None and pair is _pair:
            l1, l2 = m1.leq, m2.leq
            leq = lambda a, b: l1(a[0], b[0]) and l2(a[1], b[1])  # noqa: E731
        return UncertainValue.of_interval(pair(m1.lo, m2.lo), pair(m1.hi, m2.hi), leq)


class CorruptedIntervalMonad(IntervalMonad):
    """Interval monad with a deliberately wrong multiplication ``[[a,b],[c,d]] -> [c,b]``.

    Exists so the law checker can demonstrate that it detects broken structure.
    """

    def join(self, mm):
        outer = self.check(mm)
        lo, hi = self.check(outer.lo), self.check(outer.hi)
        return UncertainValue.of_interval(hi.lo, lo.hi, lo.leq)


class DistributionMonad(Monad):
    kind = MonadKind.DISTRIBUTION

    def unit(self, x, leq=None):
        return UncertainValue(MonadKind.DISTRIBUTION, ((x, 1.0),), _cmp=frozenset({(x, 1.0)}))

    def bind(self, m, k):
        out: dict[Any, float] = {}
        for x, p in self.check(m).payload:
            for y, q in self.check(k(x)).payload:
                out[y] = out.get(y, 0.0) + p * q
        return UncertainValue.of_atoms(out)

    def strength(self, m1, m2, pair=_pair, leq=None):
        out: dict[Any, float] = {}
        for x, p in self.check(m1).payload:
            for y, q in self.check(m2).payload:
                key = pair(x, y)
                out[key] = out.get(key, 0.0) + p * q
        return UncertainValue.of_atoms(out)


_MONADS: dict[MonadKind, Monad] = {
    MonadKind.IDENTITY: IdentityMonad(),
    MonadKind.POWERSET: PowersetMonad(),
    MonadKind.INTERVAL: IntervalMonad(),
    MonadKind.DISTRIBUTION: DistributionMonad(),
}


def monad(kind: MonadKind | str) -> Monad:
    return _MONADS[as_kind(kind)]


def unit(kind: MonadKind | str, x: Any) -> UncertainValue:
    return monad(kind).unit(x)


def bind(m: UncertainValue, k: Callable[[Any], UncertainValue]) -> UncertainValue:
    return monad(m.kind).bind(m, k)


def strength(m1: UncertainValue, m2: UncertainValue, pair: Callable[[Any, Any], Any] = _pair) -> UncertainValue:
    if m1.kind is not m2.kind:
        raise KindMismatch(f"cannot pair a {m1.kind} value with a {m2.kind} value")
    return monad(m1.kind).strength(m1, m2, pair)


def fmap(m: UncertainValue, h: Callable[[Any], Any]) -> UncertainValue:
    return monad(m.kind).fmap(m, h)


def values_equal(kind: MonadKind | str, v1: UncertainValue, v2: UncertainValue,
                 tol: float = DIST_TOL) -> bool:
    kind = as_kind(kind)
    for v in (v1, v2):
        if v.kind is not kind:
            raise KindMismatch(f"expected {kind} values, got {v.kind}")
    if kind is MonadKind.DISTRIBUTION:
        return total_variation(v1, v2) <= tol
    return v1 == v2


def total_variation(v1: UncertainValue, v2: UncertainValue) -> float:
    a, b = dict(v1.payload), dict(v2.payload)
    return 0.5 * math.fsum(abs(a.get(x, 0.0) - b.get(x, 0.0)) for x in set(a) | set(b))


# --- Kleisli maps -----------------------------------------------------------

@dataclass(frozen=True)
class KleisliMap:
    """A total map from a finite domain of labels to uncertain values."""

    kind: MonadKind
    dom: tuple
    table: Mapping[Hashable, UncertainValue] = field(repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", as_kind(self.kind))
        object.__setattr__(self, "dom", tuple(self.dom))
        missing = [a for a in self.dom if a not in self.table]
        if missing:
            raise PartialMap(f"Kleisli map undefined at {missing[:3]!r}")
        for a in self.dom:
            v = self.table[a]
            if not isinstance(v, UncertainValue) or v.kind is not self.kind:
                raise KindMismatch(f"value at {a!r} is not a {self.kind} value")

    def __call__(self, a: Hashable) -> UncertainValue:
        try:
            return self.table[a]
        except KeyError:
            raise PartialMap(f"Kleisli map undefined at {a!r}") from None


def lift(kind: MonadKind | str, f: Callable[[Any], Any] | Mapping[Any, Any],
         dom: Sequence[Hashable] | None = None) -> KleisliMap:
    """``a -> unit(f(a))`` on ``dom`` (defaults to the keys of a mapping ``f``)."""
    kind = as_kind(kind)
    if isinstance(f, Mapping):
        dom = tuple(f) if dom is None else tuple(dom)
        g = f.__getitem__
    else:
        if dom is None:
            raise ValueError("lift of a callable needs an explicit domain")
        g = f
    m = monad(kind)
    return KleisliMap(kind, dom, {a: m.unit(g(a)) for a in dom})


def kleisli_identity(kind: MonadKind | str, dom: Sequence[Hashable]) -> KleisliMap:
    return lift(kind, lambda a: a, dom)


def kleisli_compose(f: KleisliMap, g: KleisliMap | Callable[[Any], UncertainValue]) -> KleisliMap:
    if isinstance(g, KleisliMap) and g.kind is not f.kind:
        raise KindMismatch(f"cannot compose {f.kind} and {g.kind} Kleisli maps")
    m = monad(f.kind)
    return KleisliMap(f.kind, f.dom, {a: m.bind(f(a), g) for a in f.dom})
