"""A textual wiring language for co-design diagrams.

Grammar (whitespace-insensitive, ASCII)::

    expr := term ( ';' term )*
    term := atom ( '|' atom )*
    atom := NAME | 'id(' P ')' | 'sym(' P ',' Q ')' | 'cap(' P ')' | 'cup(' P ')'
          | 'loop[' P '](' expr ')' | 'repar[' NAME '](' expr ')' | '(' expr ')'

``;`` is series composition and ``|`` is parallel composition; both associate
to the left and ``|`` binds tighter.  ``loop[X](e)`` feeds the trailing ``X``
factors of ``e``'s resources back into the trailing ``X`` factors of its
functionalities.  ``repar[phi](e)`` precomposes the parameters of ``e`` with
the reparametrization ``phi``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterator, Union

from . import dp as _dp
from .dp import DesignProblem
from .errors import ParadpError
from .monad import MonadKind, as_kind
from .para import (
    ParamCell,
    Repar,
    hcompose,
    include,
    reparametrize,
    tensor_cell,
)
from .poset import UNIT, FinPoset, opposite, product


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int

    def __str__(self) -> str:
        return f"line {self.line}, column {self.col}"


class DiagramSyntaxError(ParadpError):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{message} at {span}")
        self.span = span


class DiagramError(ParadpError):
    """Evaluation-time failure tied to a source span."""

    def __init__(self, message: str, span: Span | None):
        super().__init__(f"{message}" + (f" at {span}" if span else ""))
        self.span = span


class UnknownName(DiagramError):
    pass


class TypeMismatch(DiagramError):
    def __init__(self, message: str, span: Span | None, left: Any = None, right: Any = None):
        super().__init__(message, span)
        self.left = left
        self.right = right


class DiagramKindMismatch(DiagramError):
    pass


# --- AST -------------------------------------------------------------------

def _span() -> Any:
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Ref:
    name: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Seq:
    left: "Expr"
    right: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Par:
    left: "Expr"
    right: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class Sym:
    p: str
    q: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Id:
    p: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Cap:
    p: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Cup:
    p: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Loop:
    wire: str
    body: "Expr"
    span: Span | None = _span()


@dataclass(frozen=True)
class ReparNode:
    phi: str
    body: "Expr"
    span: Span | None = _span()


Expr = Union[Ref, Seq, Par, Sym, Id, Cap, Cup, Loop, ReparNode]


# --- lexer / parser ---------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[;|()\[\],])|(?P<bad>\S))")
_KEYWORDS = {"id", "sym", "cap", "cup", "loop", "repar"}


@dataclass(frozen=True)
class _Tok:
    kind: str  # "name", a punctuation character, or "eof"
    text: str
    span: Span


def _lex(text: str) -> list[_Tok]:
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def span(a: int, b: int) -> Span:
        line = max(i for i, s in enumerate(line_starts) if s <= a)
        return Span(a, b, line + 1, a - line_starts[line] + 1)

    toks: list[_Tok] = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group("bad"):
            raise DiagramSyntaxError(f"unexpected character {m.group('bad')!r}", span(m.start("bad"), pos))
        kind = "name" if m.group("name") else m.group("punct")
        start = m.start("name") if m.group("name") else m.start("punct")
        toks.append(_Tok(kind, m.group(kind if kind == "name" else "punct"), span(start, pos)))
    toks.append(_Tok("eof", "", span(len(text), len(text))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str, what: str | None = None) -> _Tok:
        t = self.tok
        if t.kind != kind:
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise DiagramSyntaxError(f"expected {what or repr(kind)}, found {found}", t.span)
        self.i += 1
        return t

    def join(self, a: Span | None, b: Span | None) -> Span | None:
        if a is None or b is None:
            return a or b
        return Span(a.start, b.end, a.line, a.col)

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == ";":
            self.i += 1
            right = self.term()
            node = Seq(node, right, self.join(node.span, right.span))
        return node

    def term(self) -> Expr:
        node = self.atom()
        while self.tok.kind == "|":
            self.i += 1
            right = self.atom()
            node = Par(node, right, self.join(node.span, right.span))
        return node

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "(":
            self.i += 1
            inner = self.expr()
            self.take(")", "')'")
            return inner
        if t.kind != "name":
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise DiagramSyntaxError(f"expected a diagram term, found {found}", t.span)
        self.i += 1
        nxt = self.tok.kind
        if t.text in ("id", "cap", "cup") and nxt == "(":
            self.i += 1
            p = self.take("name", "a poset name").text
            end = self.take(")", "')'")
            cls = {"id": Id, "cap": Cap, "cup": Cup}[t.text]
            return cls(p, self.join(t.span, end.span))
        if t.text == "sym" and nxt == "(":
            self.i += 1
            p = self.take("name", "a poset name").text
            self.take(",", "','")
            q = self.take("name", "a poset name").text
            end = self.take(")", "')'")
            return Sym(p, q, self.join(t.span, end.span))
        if t.text in ("loop", "repar") and nxt == "[":
            self.i += 1
            arg = self.take("name", "a name").text
            self.take("]", "']'")
            self.take("(", "'('")
            body = self.expr()
            end = self.take(")", "')'")
            cls = Loop if t.text == "loop" else ReparNode
            return cls(arg, body, self.join(t.span, end.span))
        if t.text in _KEYWORDS:
            raise DiagramSyntaxError(f"{t.text!r} must be followed by {'[' if t.text in ('loop', 'repar') else '('}",
                                     self.tok.span)
        return Ref(t.text, t.span)


def parse(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "eof":
        raise DiagramSyntaxError(f"unexpected {p.tok.text!r}", p.tok.span)
    return node


def pretty(e: Expr) -> str:
    """Canonical text; ``parse(pretty(e)) == e`` for every AST."""
    if isinstance(e, Seq):
        right = f"({pretty(e.right)})" if isinstance(e.right, Seq) else pretty(e.right)
        return f"{pretty(e.left)} ; {right}"
    if isinstance(e, Par):
        left = f"({pretty(e.left)})" if isinstance(e.left, Seq) else pretty(e.left)
        right = f"({pretty(e.right)})" if isinstance(e.right, (Seq, Par)) else pretty(e.right)
        return f"{left} | {right}"
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Id):
        return f"id({e.p})"
    if isinstance(e, Cap):
        return f"cap({e.p})"
    if isinstance(e, Cup):
        return f"cup({e.p})"
    if isinstance(e, Sym):
        return f"sym({e.p}, {e.q})"
    if isinstance(e, Loop):
        return f"loop[{e.wire}]({pretty(e.body)})"
    if isinstance(e, ReparNode):
        return f"repar[{e.phi}]({pretty(e.body)})"
    raise TypeError(f"not a diagram node: {e!r}")


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for child in ("left", "right", "body"):
        sub = getattr(e, child, None)
        if sub is not None:
            yield from walk(sub)


# --- typing and evaluation -----------------------------------------------------

@dataclass
class Bindings:
    """Names visible to a diagram: cells (or plain DPs), reparametrizations, posets."""

    kind: MonadKind = MonadKind.IDENTITY
    cells: dict[str, ParamCell | DesignProblem] = field(default_factory=dict)
    repars: dict[str, Repar] = field(default_factory=dict)
    posets: dict[str, FinPoset] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.kind = as_kind(self.kind)

    def poset(self, name: str, span: Span | None) -> FinPoset:
        try:
            return self.posets[name]
        except KeyError:
            raise UnknownName(f"unknown poset {name!r}", span) from None

    def cell(self, name: str, span: Span | None) -> ParamCell:
        try:
            c = self.cells[name]
        except KeyError:
            raise UnknownName(f"unknown cell {name!r}", span) from None
        if isinstance(c, DesignProblem):
            return include(self.kind, c)
        if c.kind is not self.kind:
            raise DiagramKindMismatch(f"cell {name!r} is {c.kind}, diagram uses {self.kind}", span)
        return c

    def repar(self, name: str, span: Span | None) -> Repar:
        try:
            r = self.repars[name]
        except KeyError:
            raise UnknownName(f"unknown reparametrization {name!r}", span) from None
        if r.kind is not self.kind:
            raise DiagramKindMismatch(f"reparametrization {name!r} is {r.kind}, diagram uses {self.kind}", span)
        return r


@dataclass(frozen=True)
class InterfaceReport:
    params: FinPoset
    src: FinPoset
    tgt: FinPoset

    def as_dict(self) -> dict[str, Any]:
        return {
            "params": [f.name for f in self.params.factors],
            "src": [f.name for f in self.src.factors],
            "tgt": [f.name for f in self.tgt.factors],
        }


def _describe(p: FinPoset) -> str:
    if not p.factors:
        return "I"
    return " (x) ".join(f.name or f"<{len(f)} elements>" for f in p.factors)


def _trailing(p: FinPoset, x: FinPoset) -> FinPoset | None:
    k = len(x.factors)
    if len(p.factors) < k:
        return None
    head, tail = p.split(len(p.factors) - k)
    return head if tail == x else None


def typecheck(e: Expr, b: Bindings) -> InterfaceReport:
    """Parameter space and interfaces of ``e`` without evaluating any tables."""
    if isinstance(e, Ref):
        c = b.cell(e.name, e.span)
        return InterfaceReport(c.dom, c.src, c.tgt)
    if isinstance(e, Id):
        p = b.poset(e.p, e.span)
        return InterfaceReport(UNIT, p, p)
    if isinstance(e, Sym):
        p, q = b.poset(e.p, e.span), b.poset(e.q, e.span)
        return InterfaceReport(UNIT, product(p, q), product(q, p))
    if isinstance(e, Cap):
        p = b.poset(e.p, e.span)
        return InterfaceReport(UNIT, UNIT, product(opposite(p), p))
    if isinstance(e, Cup):
        p = b.poset(e.p, e.span)
        return InterfaceReport(UNIT, product(p, opposite(p)), UNIT)
    if isinstance(e, Seq):
        lt, rt = typecheck(e.left, b), typecheck(e.right, b)
        if lt.tgt != rt.src:
            raise TypeMismatch(
                f"series composition mismatch: left ends in {_describe(lt.tgt)}, "
                f"right starts at {_describe(rt.src)}",
                e.right.span, lt.tgt, rt.src,
            )
        return InterfaceReport(product(lt.params, rt.params), lt.src, rt.tgt)
    if isinstance(e, Par):
        lt, rt = typecheck(e.left, b), typecheck(e.right, b)
        return InterfaceReport(product(lt.params, rt.params), product(lt.src, rt.src), product(lt.tgt, rt.tgt))
    if isinstance(e, Loop):
        x = b.poset(e.wire, e.span)
        inner = typecheck(e.body, b)
        a, bb = _trailing(inner.src, x), _trailing(inner.tgt, x)
        if a is None or bb is None:
            raise TypeMismatch(
                f"loop wire {e.wire!r} must be the trailing factor of both sides, body is "
                f"{_describe(inner.src)} -> {_describe(inner.tgt)}",
                e.span, inner.src, inner.tgt,
            )
        return InterfaceReport(inner.params, a, bb)
    if isinstance(e, ReparNode):
        phi = b.repar(e.phi, e.span)
        inner = typecheck(e.body, b)
        if phi.cod != inner.params:
            raise TypeMismatch(
                f"reparametrization {e.phi!r} lands in {_describe(phi.cod)}, body is parametrized by "
                f"{_describe(inner.params)}",
                e.span, phi.cod, inner.params,
            )
        return InterfaceReport(phi.dom, inner.src, inner.tgt)
    raise TypeError(f"not a diagram node: {e!r}")


def loop_cell(body: ParamCell, x: FinPoset) -> ParamCell:
    """Trace of ``body : A (x) X -> B (x) X`` through cap/cup, as a cell ``A -> B``."""
    k = body.kind
    a = _trailing(body.src, x)
    bb = _trailing(body.tgt, x)
    if a is None or bb is None:
        raise TypeMismatch("loop wire is not the trailing factor of both sides", None, body.src, body.tgt)
    xo = opposite(x)
    open_ = tensor_cell(include(k, _dp.identity_dp(a)), include(k, _dp.cap(xo)))
    middle = tensor_cell(body, include(k, _dp.identity_dp(xo)))
    close = tensor_cell(include(k, _dp.identity_dp(bb)), include(k, _dp.cup(x)))
    return hcompose(hcompose(open_, middle), close)


def evaluate(e: Expr, b: Bindings) -> ParamCell:
    typecheck(e, b)
    return _eval(e, b)


def _eval(e: Expr, b: Bindings) -> ParamCell:
    k = b.kind
    if isinstance(e, Ref):
        return b.cell(e.name, e.span)
    if isinstance(e, Id):
        return include(k, _dp.identity_dp(b.poset(e.p, e.span)))
    if isinstance(e, Sym):
        return include(k, _dp.sym_dp(b.poset(e.p, e.span), b.poset(e.q, e.span)))
    if isinstance(e, Cap):
        return include(k, _dp.cap(b.poset(e.p, e.span)))
    if isinstance(e, Cup):
        return include(k, _dp.cup(b.poset(e.p, e.span)))
    if isinstance(e, Seq):
        return hcompose(_eval(e.left, b), _eval(e.right, b))
    if isinstance(e, Par):
        return tensor_cell(_eval(e.left, b), _eval(e.right, b))
    if isinstance(e, Loop):
        return loop_cell(_eval(e.body, b), b.poset(e.wire, e.span))
    if isinstance(e, ReparNode):
        return reparametrize(b.repar(e.phi, e.span), _eval(e.body, b))
    raise TypeError(f"not a diagram node: {e!r}")


def eval_text(text: str, b: Bindings) -> ParamCell:
    return evaluate(parse(text), b)


__all__ = [
    "Bindings", "Cap", "Cup", "DiagramError", "DiagramSyntaxError", "Expr", "Id",
    "InterfaceReport", "Loop", "Par", "Ref", "ReparNode", "Seq", "Span", "Sym",
    "TypeMismatch", "UnknownName", "evaluate", "eval_text", "loop_cell", "parse",
    "pretty", "typecheck", "walk",
]
