"""``paradp`` command-line front end.

Exit codes: 0 success, 1 law failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

from . import bundle as _bundle
from . import laws
from .bundle import Bundle, BundleError, coerce_point, round_float, to_json
from .diagram import DiagramError, DiagramSyntaxError
from .errors import ParadpError
from .monad import DIST_TOL, MonadKind, UncertainValue
from .para import ParamCell, factor_position
from .poset import Antichain, FinPoset
from . import query as _query

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# --- formatting -------------------------------------------------------------------

def render_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    cells = [[str(h) for h in headers]] + [[_cell_text(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _cell_text(x: Any) -> str:
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.12g}"
    if isinstance(x, (list, tuple)):
        return "(" + ", ".join(_cell_text(e) for e in x) + ")"
    return str(x)


def _front_text(front: list) -> str:
    return "{" + ", ".join(_cell_text(e) for e in front) + "}" if front else "{} (infeasible)"


def _space_json(p: FinPoset) -> dict:
    return {"factors": [{"name": f.name, "size": len(f)} for f in p.factors], "size": p.size}


def _stats(xs: list[float]) -> dict:
    return {"min": to_json(min(xs)), "max": to_json(max(xs)),
            "mean": round_float(math.fsum(xs) / len(xs))}


def _uncertain_json(v: UncertainValue, conv) -> dict:
    k = v.kind
    if k is MonadKind.IDENTITY:
        return {"value": conv(v.payload)}
    if k is MonadKind.POWERSET:
        return {"set": [conv(x) for x in v.payload]}
    if k is MonadKind.INTERVAL:
        return {"interval": [conv(v.lo), conv(v.hi)]}
    return {"atoms": [[conv(x), round_float(p)] for x, p in _by_mass(v)]}


def _by_mass(v: UncertainValue) -> list[tuple[Any, float]]:
    # mass descending, then canonical index
    return [a for _, a in sorted(enumerate(v.payload), key=lambda t: (-t[1][1], t[0]))]


# --- commands ---------------------------------------------------------------------

def cmd_check_laws(args: argparse.Namespace, b: Bundle | None) -> tuple[dict, str, int]:
    tol = args.tolerance
    if b is None:
        report = laws.builtin_suite(args.seed, args.samples, corrupt_mu=args.corrupt_mu)
    else:
        n = args.samples
        report = laws.check_monad_laws(b.kind, n or 200, args.seed,
                                       corrupt=args.corrupt_mu and b.kind is MonadKind.INTERVAL, tol=tol)
        report.extend(laws.check_instance_laws(b.kind, b.dps, b.cells, b.posets, tol))
        report.extend(laws.check_para_laws(b.kind, n or 100, args.seed, tol=tol))
    doc = {"command": "check-laws", "ok": report.ok, "laws": [r.as_dict() for r in report.results]}
    rows = [("PASS" if r.passed else "FAIL", r.name, r.checked, r.failures, r.witness or "")
            for r in report.results]
    text = render_table(("status", "law", "checked", "failures", "witness"), rows)
    text += f"\n\n{'all laws hold' if report.ok else f'{len(report.failed())} law(s) failed'}"
    return doc, text, EXIT_OK if report.ok else EXIT_FAIL


def summarize(cell: ParamCell) -> dict:
    support = [len(v.support()) for v in cell.table]
    dps = [d for v in cell.table for d in v.support()]
    summary = {
        "monad": cell.kind.value,
        "params": _space_json(cell.dom),
        "src": _space_json(cell.src),
        "tgt": _space_json(cell.tgt),
        "points": cell.dom.size,
        "payload": {
            "support_size": _stats(support),
            "feasible_entries": _stats([int(d.feas.sum()) for d in dps]),
        },
    }
    if cell.kind is MonadKind.INTERVAL:
        widths = [int((v.hi.feas & ~v.lo.feas).sum()) for v in cell.table]
        summary["payload"]["interval_width"] = _stats(widths)
    return summary


def cmd_eval(args: argparse.Namespace, b: Bundle) -> tuple[dict, str, int]:
    s = summarize(b.target())
    doc = {"command": "eval", "monad": b.kind.value, "summary": s}

    def names(sp: dict) -> str:
        return " x ".join(f"{f['name']}[{f['size']}]" for f in sp["factors"]) or "I"

    rows = [("monad", s["monad"]), ("params", names(s["params"])), ("src", names(s["src"])),
            ("tgt", names(s["tgt"])), ("points", s["points"])]
    for key, st in s["payload"].items():
        rows.append((key, f"min {st['min']}  max {st['max']}  mean {st['mean']}"))
    return doc, render_table(("field", "value"), rows), EXIT_OK


def _requests(b: Bundle, kind: str) -> list[tuple[int, dict]]:
    reqs = [(i, q) for i, q in enumerate(b.queries) if q["type"] == kind]
    if not reqs:
        raise BundleError(f"bundle has no {kind!r} requests", "/queries")
    return reqs


def _front(a: Antichain) -> list:
    return to_json(a)


def cmd_query(args: argparse.Namespace, b: Bundle) -> tuple[dict, str, int]:
    results, blocks = [], []
    for i, q in _requests(b, "query"):
        ptr = f"/queries/{i}"
        cell = b.target(q.get("cell"), ptr)
        f = coerce_point(cell.src, q["f"], f"{ptr}/f")
        res = _query.query_cell(cell, f)
        points = ([coerce_point(cell.dom, p, f"{ptr}/points/{j}") for j, p in enumerate(q["points"])]
                  if "points" in q else list(cell.dom.elements))
        answers, rows = [], []
        for p in points:
            v = res(p)
            answers.append({"point": to_json(p), **_uncertain_json(v, _front)})
            rows.extend(_answer_rows(p, v))
        results.append({"type": "query", "f": to_json(f), "answers": answers})
        blocks.append(f"FixFunMinRes at f = {_cell_text(to_json(f))}\n"
                      + render_table(("point", "case", "minimal resources", "prob"), rows))
    return {"command": "query", "monad": b.kind.value, "results": results}, "\n\n".join(blocks), EXIT_OK


def _answer_rows(p: tuple, v: UncertainValue) -> list[tuple]:
    pt = _cell_text(to_json(p)) if p else "()"
    k = v.kind
    if k is MonadKind.IDENTITY:
        return [(pt, "", _front_text(_front(v.payload)), "")]
    if k is MonadKind.POWERSET:
        return [(pt, f"member {j}", _front_text(_front(a)), "") for j, a in enumerate(v.payload)]
    if k is MonadKind.INTERVAL:
        return [(pt, "worst (lo)", _front_text(_front(v.lo)), ""),
                (pt, "best (hi)", _front_text(_front(v.hi)), "")]
    return [(pt, "", _front_text(_front(a)), f"{p_:.12g}") for a, p_ in _by_mass(v)]


def cmd_decide(args: argparse.Namespace, b: Bundle) -> tuple[dict, str, int]:
    results, blocks = [], []
    for i, q in _requests(b, "decide"):
        ptr = f"/queries/{i}"
        cell = b.target(q.get("cell"), ptr)
        f = coerce_point(cell.src, q["f"], f"{ptr}/f")
        utility = q.get("utility", "expected")
        scores = _query.point_scores(cell, f, utility)
        point, value = _query.decide(cell, f, utility)
        results.append({"type": "decide", "f": to_json(f), "utility": utility,
                        "point": to_json(point), "value": to_json(value),
                        "scores": [{"point": to_json(p), "value": to_json(s)}
                                   for p, s in zip(cell.dom.elements, scores)]})
        rows = [(_cell_text(to_json(p)), _cell_text(to_json(s)), "*" if p == point else "")
                for p, s in zip(cell.dom.elements, scores)]
        blocks.append(f"decide {utility} at f = {_cell_text(to_json(f))}: "
                      f"{_cell_text(to_json(point))} with value {_cell_text(to_json(value))}\n"
                      + render_table(("point", utility, "best"), rows))
    return {"command": "decide", "monad": b.kind.value, "results": results}, "\n\n".join(blocks), EXIT_OK


def cmd_infer(args: argparse.Namespace, b: Bundle) -> tuple[dict, str, int]:
    results, blocks = [], []
    for i, q in _requests(b, "infer"):
        ptr = f"/queries/{i}"
        cell = b.target(q.get("cell"), ptr)
        name = q["factor"]
        try:
            pos = factor_position(cell.dom, name)
        except KeyError as exc:
            raise BundleError(str(exc.args[0]), f"{ptr}/factor") from None
        dfac = cell.dom.factors[pos]
        rest = FinPoset(f for j, f in enumerate(cell.dom.factors) if j != pos)
        prior = _prior(q.get("prior", "uniform"), FinPoset((dfac,)), f"{ptr}/prior")
        obs = []
        for j, o in enumerate(q["observations"]):
            optr = f"{ptr}/observations/{j}"
            x = coerce_point(rest, o.get("x", {}), f"{optr}/x")
            obs.append(_query.Observation(x, coerce_point(cell.src, o["f"], f"{optr}/f"),
                                          coerce_point(cell.tgt, o["r"], f"{optr}/r"),
                                          o.get("feasible", True)))
        post = _query.bayes_update(cell, pos, prior, obs)
        atoms = _by_mass(post)
        results.append({"type": "infer", "factor": name,
                        "posterior": {"atoms": [[to_json(d), round_float(p)] for d, p in atoms]}})
        rows = [(_cell_text(to_json(d)), f"{p:.12g}") for d, p in atoms]
        blocks.append(f"posterior over {name} ({len(obs)} observations)\n"
                      + render_table((name, "prob"), rows))
    return {"command": "infer", "monad": b.kind.value, "results": results}, "\n\n".join(blocks), EXIT_OK


def _prior(raw: Any, space: FinPoset, pointer: str) -> UncertainValue:
    labels = [e[0] for e in space.elements]
    if raw == "uniform":
        return UncertainValue.of_atoms([(d, 1.0 / len(labels)) for d in labels])
    atoms = [(coerce_point(space, x, f"{pointer}/atoms/{i}/0")[0], p) for i, (x, p) in enumerate(raw["atoms"])]
    try:
        return UncertainValue.of_atoms(atoms)
    except ParadpError as exc:
        raise BundleError(str(exc), pointer) from None


def cmd_fit(args: argparse.Namespace, b: Bundle) -> tuple[dict, str, int]:
    from .formula import Formula
    from .poset import from_descriptor

    results, blocks = [], []
    for i, q in _requests(b, "fit"):
        ptr = f"/queries/{i}"
        if "names" in q:
            names = list(q["names"])
        elif "fun" in q:
            try:
                names = list(from_descriptor(q["fun"], b.posets).names)
            except (KeyError, ValueError) as exc:
                raise BundleError(str(exc), f"{ptr}/fun") from None
        else:
            raise BundleError("fit needs 'names' or 'fun' to name the functionality axes", ptr)
        theta = q.get("theta", "theta")
        phi = _query.formula_family(q["formula"], names, theta)
        thetas = [_bundle_number(t) for t in q["thetas"]]
        data = []
        for j, d in enumerate(q["data"]):
            f = d["f"] if isinstance(d["f"], list) else [d["f"]]
            if len(f) != len(names):
                raise BundleError(f"datum has {len(f)} coordinates for {len(names)} axes", f"{ptr}/data/{j}/f")
            data.append((tuple(_bundle_number(x) for x in f), _bundle_number(d["r"])))
        mode = q.get("mode", "least_squares")
        metric = None
        if "metric" in q:
            form = Formula(q["metric"])
            metric = lambda t, form=form: form({theta: t})  # noqa: E731
        fit = _query.fit_threshold(phi, thetas, data, mode, metric)
        results.append({"type": "fit", "mode": mode, "theta": to_json(fit.theta), "loss": to_json(fit.loss),
                        "grid": [{"theta": to_json(t), "loss": to_json(l), "feasible": ok}
                                 for t, l, ok in zip(thetas, fit.losses, fit.feasible)]})
        rows = [(_cell_text(to_json(t)), _cell_text(to_json(l)), "yes" if ok else "no",
                 "*" if t == fit.theta else "")
                for t, l, ok in zip(thetas, fit.losses, fit.feasible)]
        blocks.append(f"fit ({mode}): {theta} = {_cell_text(to_json(fit.theta))}\n"
                      + render_table((theta, "squared loss", "satisfies data", "chosen"), rows))
    return {"command": "fit", "monad": b.kind.value, "results": results}, "\n\n".join(blocks), EXIT_OK


def _bundle_number(x: Any):
    from fractions import Fraction
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


COMMANDS = {
    "check-laws": cmd_check_laws,
    "eval": cmd_eval,
    "query": cmd_query,
    "decide": cmd_decide,
    "infer": cmd_infer,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paradp", description="Parametrized uncertain co-design problems.")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default: bundle seed or 0)")
    common.add_argument("--tolerance", type=float, default=DIST_TOL, help="distribution tolerance")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("json", "table"), default="table")
    laws_p = sub.add_parser("check-laws", parents=[common], help="run the law suites")
    laws_p.add_argument("bundle", nargs="?", default=None, help="optional bundle for instance laws")
    laws_p.add_argument("--samples", type=int, default=None, help="random instances per law")
    laws_p.add_argument("--corrupt-mu", action="store_true",
                        help="swap in a broken interval multiplication (should fail)")
    for name, text in (("eval", "summarize the bundle's composite cell"),
                       ("query", "FixFunMinRes requests"), ("decide", "decision requests"),
                       ("infer", "Bayesian inference requests"), ("fit", "threshold fitting requests")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("bundle", help="JSON problem bundle")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        b = _bundle.load_path(args.bundle) if args.bundle else None
        if args.seed is None:
            args.seed = b.seed if b is not None else 0
        doc, text, code = COMMANDS[args.command](args, b)
    except (BundleError, DiagramSyntaxError, DiagramError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParadpError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = json.dumps(doc, indent=2, sort_keys=False) if args.format == "json" else text
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
