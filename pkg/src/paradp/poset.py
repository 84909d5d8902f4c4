"""Finite posets stored as flat lists of factors.

A :class:`FinPoset` is a product of zero or more :class:`Factor` objects.
Products concatenate factor lists, so the monoidal product of posets is
strictly associative and the empty product is the one-point unit.  Elements
are tuples with one label per factor, enumerated lexicographically; all
operations address elements by their position in that enumeration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import (
    AntisymmetryViolation,
    DuplicateElement,
    EmptyAxis,
    PartialMap,
    UnknownElement,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=bool)
    a.setflags(write=False)
    return a


class Factor:
    """An atomic finite poset: labels plus a dense ``leq`` bit matrix."""

    __slots__ = ("name", "labels", "leq", "_index", "_hash")

    def __init__(self, labels: Sequence[Hashable], leq: np.ndarray, name: str | None = None):
        self.labels = tuple(labels)
        self.leq = _frozen(leq)
        self.name = name
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            seen = set()
            dup = next(x for x in self.labels if x in seen or seen.add(x))
            raise DuplicateElement(f"duplicate element label {dup!r}")
        self._hash = hash((self.labels, self.leq.tobytes()))

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Factor):
            return NotImplemented
        return (
            self._hash == other._hash
            and self.labels == other.labels
            and np.array_equal(self.leq, other.leq)
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        tag = f"{self.name}:" if self.name else ""
        return f"Factor({tag}{list(self.labels)})"

    def index(self, label: Hashable) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownElement(f"{label!r} is not an element of {self!r}") from None

    def op(self) -> "Factor":
        name = None if self.name is None else (
            self.name[:-3] if self.name.endswith("^op") else self.name + "^op"
        )
        return Factor(self.labels, self.leq.T, name)

    def is_chain(self) -> bool:
        return bool((self.leq | self.leq.T).all())

    def is_ascending_chain(self) -> bool:
        """Chain whose order matches label order (the shape of an ascending grid axis)."""
        return bool(np.array_equal(self.leq, np.triu(np.ones_like(self.leq))))


class FinPoset:
    """A finite poset given as a flat product of factors."""

    __slots__ = ("factors", "_hash", "__dict__")

    def __init__(self, factors: Iterable[Factor] = ()):
        self.factors: tuple[Factor, ...] = tuple(factors)
        self._hash = hash(self.factors)

    # --- identity -----------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinPoset):
            return NotImplemented
        return self._hash == other._hash and self.factors == other.factors

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.factors:
            return "FinPoset(I)"
        return "FinPoset(" + " x ".join(f.name or f"<{len(f)}>" for f in self.factors) + ")"

    # --- structure ----------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)

    @cached_property
    def size(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64)) if self.factors else 1

    def __len__(self) -> int:
        return self.size

    @property
    def names(self) -> tuple[str | None, ...]:
        return tuple(f.name for f in self.factors)

    @cached_property
    def elements(self) -> tuple[tuple, ...]:
        return tuple(itertools.product(*(f.labels for f in self.factors)))

    @cached_property
    def leq(self) -> np.ndarray:
        """Dense ``size x size`` matrix, ``leq[i, j]`` iff element i <= element j."""
        if not self.factors:
            return _frozen(np.ones((1, 1), dtype=bool))
        m = reduce(_kron_and, (f.leq for f in self.factors))
        return _frozen(m)

    @cached_property
    def _index(self) -> dict[tuple, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def index(self, element: Any) -> int:
        """Position of ``element``; a bare label is accepted for one-factor posets."""
        if isinstance(element, list):
            element = tuple(element)
        try:
            return self._index[element]
        except (KeyError, TypeError):
            pass
        if len(self.factors) == 1:
            try:
                return self._index[(element,)]
            except (KeyError, TypeError):
                pass
        raise UnknownElement(f"{element!r} is not an element of {self!r}")

    def element(self, i: int) -> tuple:
        return self.elements[i]

    def le(self, x: Any, y: Any) -> bool:
        return bool(self.leq[self.index(x), self.index(y)])

    def is_chain(self) -> bool:
        return bool((self.leq | self.leq.T).all())

    def split(self, k: int) -> tuple["FinPoset", "FinPoset"]:
        """Split the factor list after the first ``k`` factors."""
        return FinPoset(self.factors[:k]), FinPoset(self.factors[k:])

    def __matmul__(self, other: "FinPoset") -> "FinPoset":
        return product(self, other)

    @property
    def op(self) -> "FinPoset":
        return opposite(self)


def _kron_and(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    return (a[:, None, :, None] & b[None, :, None, :]).reshape(n * m, n * m)


UNIT = FinPoset(())


@dataclass(frozen=True)
class GridAxis:
    """Sample points of one real-valued quantity.

    ``direction="desc"`` reverses the order; functionality-side axes whose
    larger values are easier to provide use it.
    """

    name: str
    values: tuple[Fraction, ...]
    direction: str = "asc"

    def __post_init__(self) -> None:
        vals = tuple(Fraction(v) if not isinstance(v, float) else Fraction(str(v))
                     for v in self.values)
        if not vals:
            raise EmptyAxis(f"axis {self.name!r} has no values")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"axis {self.name!r} values must be strictly increasing")
        if self.direction not in ("asc", "desc"):
            raise ValueError(f"direction must be 'asc' or 'desc', got {self.direction!r}")
        object.__setattr__(self, "values", vals)

    def factor(self) -> Factor:
        n = len(self.values)
        chain = np.triu(np.ones((n, n), dtype=bool))
        return Factor(self.values, chain if self.direction == "asc" else chain.T, self.name)


@dataclass(frozen=True)
class Antichain:
    """Pairwise-incomparable elements of ``poset``, stored by ascending index."""

    poset: FinPoset
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        members = tuple(sorted(set(self.members)))
        le = self.poset.leq
        for a, b in itertools.combinations(members, 2):
            if le[a, b] or le[b, a]:
                raise ValueError(
                    f"{self.poset.element(a)!r} and {self.poset.element(b)!r} are comparable"
                )
        object.__setattr__(self, "members", members)

    @property
    def elements(self) -> tuple[tuple, ...]:
        return tuple(self.poset.element(i) for i in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.elements)

    def upset_mask(self) -> np.ndarray:
        if not self.members:
            return np.zeros(self.poset.size, dtype=bool)
        return self.poset.leq[list(self.members)].any(axis=0)

    def _sort_key(self):
        return (len(self.members), self.members)

    def __repr__(self) -> str:
        return "Antichain({" + ", ".join(map(_fmt_elem, self.elements)) + "})"


def _fmt_elem(e: tuple) -> str:
    parts = [str(x) for x in e]
    return parts[0] if len(parts) == 1 else "(" + ", ".join(parts) + ")"


def antichain_leq(a: Antichain, b: Antichain) -> bool:
    """Upper-set inclusion: ``a <= b`` iff everything above ``a`` is above ``b``.

    This is the order in which minimal-resource fronts of pointwise-larger
    (more feasible) design problems are larger.
    """
    if a.poset != b.poset:
        raise ValueError("antichains live in different posets")
    return bool((a.upset_mask() <= b.upset_mask()).all())


# --- constructors ---------------------------------------------------------

def mk_poset(elements: Sequence[Hashable], leq_pairs: Iterable[tuple[Hashable, Hashable]] = (),
             name: str | None = None) -> FinPoset:
    """Reflexive-transitive closure of ``leq_pairs`` as a one-factor poset."""
    labels = tuple(elements)
    index: dict[Hashable, int] = {}
    for i, lab in enumerate(labels):
        if lab in index:
            raise DuplicateElement(f"duplicate element label {lab!r}")
        index[lab] = i
    n = len(labels)
    rel = np.eye(n, dtype=bool)
    for a, b in leq_pairs:
        if a not in index or b not in index:
            raise UnknownElement(f"pair ({a!r}, {b!r}) mentions an undeclared element")
        rel[index[a], index[b]] = True
    closed = kernels.transitive_closure(rel)
    both = closed & closed.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = np.argwhere(both)[0]
        raise AntisymmetryViolation(
            f"cycle through {labels[i]!r} and {labels[j]!r}", labels[i], labels[j]
        )
    return FinPoset((Factor(labels, closed, name),))


def chain(labels: Sequence[Hashable], name: str | None = None) -> FinPoset:
    labels = tuple(labels)
    n = len(labels)
    return FinPoset((Factor(labels, np.triu(np.ones((n, n), dtype=bool)), name),))


def antichain_poset(labels: Sequence[Hashable], name: str | None = None) -> FinPoset:
    return FinPoset((Factor(tuple(labels), np.eye(len(labels), dtype=bool), name),))


BOOL = chain((0, 1), "Bool")


def product(*posets: FinPoset) -> FinPoset:
    return FinPoset(f for p in posets for f in p.factors)


def opposite(p: FinPoset) -> FinPoset:
    return FinPoset(f.op() for f in p.factors)


def grid_poset(axes: Sequence[GridAxis]) -> FinPoset:
    if not axes:
        raise EmptyAxis("grid_poset needs at least one axis")
    return FinPoset(ax.factor() for ax in axes)


# --- queries --------------------------------------------------------------

def minimal_indices(p: FinPoset, indices: Iterable[int]) -> tuple[int, ...]:
    mask = np.zeros(p.size, dtype=bool)
    idx = list(indices)
    if not idx:
        return ()
    mask[idx] = True
    return tuple(int(i) for i in np.flatnonzero(kernels.minimal_mask(p.leq, mask)))


def minimal_elements(p: FinPoset, subset: Iterable[Any]) -> Antichain:
    return Antichain(p, minimal_indices(p, (p.index(x) for x in subset)))


def is_monotone(p: FinPoset, q: FinPoset, mapping: Mapping[Any, Any] | Callable[[Any], Any]) -> bool:
    """Whether ``mapping`` (dict or callable on elements) is order-preserving from p to q."""
    image = []
    for e in p.elements:
        key = e[0] if len(p.factors) == 1 else e
        try:
            y = mapping[key] if isinstance(mapping, Mapping) else mapping(key)
        except KeyError:
            raise PartialMap(f"map undefined at {key!r}") from None
        image.append(q.index(y))
    img = np.asarray(image, dtype=np.intp)
    return bool((~p.leq | q.leq[np.ix_(img, img)]).all())


def from_descriptor(desc: Any, named: Mapping[str, FinPoset] | None = None) -> FinPoset:
    """Build a poset from its JSON descriptor (see README for the grammar)."""
    named = named or {}
    if isinstance(desc, str):
        if desc not in named:
            raise KeyError(f"unknown poset {desc!r}")
        return named[desc]
    if not isinstance(desc, Mapping) or len(desc) != 1:
        raise ValueError(f"poset descriptor must be a one-key object, got {desc!r}")
    (tag, body), = desc.items()
    if tag == "chain":
        return chain(body)
    if tag == "grid":
        return grid_poset([axis_from_descriptor(a) for a in body])
    if tag == "product":
        return product(*(from_descriptor(d, named) for d in body))
    if tag == "explicit":
        return mk_poset(body["elements"], [tuple(p) for p in body.get("leq_pairs", [])],
                        body.get("name"))
    if tag == "op":
        return opposite(from_descriptor(body, named))
    raise ValueError(f"unknown poset descriptor {tag!r}")


def axis_from_descriptor(d: Mapping[str, Any]) -> GridAxis:
    return GridAxis(d["name"], tuple(_rational(v) for v in d["values"]), d.get("direction", "asc"))


def _rational(v: Any) -> Fraction:
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)
