"""Random well-typed diagram expressions over a fixed set of bindings."""
from paradp.diagram import Bindings, Cap, Cup, Id, Loop, Par, Ref, ReparNode, Seq, Sym
from paradp.para import param_space
from paradp.poset import UNIT, chain, opposite
from paradp.samples import random_cell, random_repar

BASE = ("P", "Q")


def make_bindings(rng, kind="powerset"):
    posets = {"P": chain((0, 1), "P"), "Q": chain(("a", "b", "c"), "Q"), "I": UNIT}
    posets["Po"] = opposite(posets["P"])
    posets["Qo"] = opposite(posets["Q"])
    cells, repars, arrows = {}, {}, {}
    for i, (s, t) in enumerate([(a, b) for a in BASE for b in BASE]):
        name = f"c{i}"
        n = int(rng.integers(1, 4))
        dom = param_space((f"u{i}", [f"u{i}_{j}" for j in range(n)]))
        cells[name] = random_cell(rng, kind, posets[s], posets[t], dom=dom)
        arrows.setdefault((s, t), []).append(name)
        repars[f"r{i}"] = random_repar(rng, kind, param_space((f"r{i}", ["x", "y"])), dom)
    b = Bindings(kind, cells, repars, posets)
    b.arrows = arrows
    return b


def _ids(names):
    node = Id(names[0])
    for n in names[1:]:
        node = Par(node, Id(n))
    return node


def gen(rng, b, src, tgt, depth):
    """A random expression of type ``src -> tgt`` (equal-length tuples of base names)."""
    opts = []
    if src == tgt:
        opts.append(lambda: _ids(src))
    if len(src) == 1:
        names = b.arrows[(src[0], tgt[0])]
        opts.append(lambda: Ref(names[int(rng.integers(len(names)))]))
        opts.append(lambda: (lambda n: ReparNode("r" + n[1:], Ref(n)))(names[int(rng.integers(len(names)))]))
        if src == tgt:
            x = src[0]
            opts.append(lambda: Seq(Par(Id(x), Cap(x)), Par(Cup(x), Id(x))))
    if len(src) == 2 and tgt == src[::-1]:
        opts.append(lambda: Sym(src[0], src[1]))
    if len(src) >= 2:
        def split():
            k = int(rng.integers(1, len(src)))
            d = max(depth - 1, 0)
            return Par(gen(rng, b, src[:k], tgt[:k], d), gen(rng, b, src[k:], tgt[k:], d))
        opts.append(split)
    if depth > 0:

        def seq():
            mid = tuple(BASE[int(rng.integers(2))] for _ in src)
            return Seq(gen(rng, b, src, mid, depth - 1), gen(rng, b, mid, tgt, depth - 1))
        opts.append(seq)
        if len(src) == 1:
            def loop():
                x = BASE[int(rng.integers(2))]
                return Loop(x, gen(rng, b, src + (x,), tgt + (x,), depth - 1))
            opts.append(loop)
        if len(src) == 1 and depth > 1:
            def widen():
                y = BASE[int(rng.integers(2))]
                inner = Seq(Par(gen(rng, b, src, tgt, depth - 2), _ids((y,))), Par(_ids(tgt), gen(rng, b, (y,), (y,), 0)))
                return Loop(y, inner)
            opts.append(widen)
    return opts[int(rng.integers(len(opts)))]()


def random_expr(rng, b, depth=3):
    s = BASE[int(rng.integers(2))]
    t = BASE[int(rng.integers(2))]
    return gen(rng, b, (s,), (t,), depth)


