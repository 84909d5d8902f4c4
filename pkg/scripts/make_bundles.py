"""Regenerate the electric-vehicle bundles in src/paradp/data/."""
from __future__ import annotations

import itertools
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "paradp" / "data"

FIVE = [0, 1, 2, 3, 4]


def axis(name, values):
    return {"grid": [{"name": name, "values": values}]}


BASE_POSETS = {
    "V": axis("v", FIVE),
    "L": axis("l", FIVE),
    "M": axis("m", FIVE),
    "Mb": axis("mb", FIVE),
    "Mx": axis("mx", FIVE),
    "Cst": axis("c", FIVE),
    "Lh": axis("lh", [0, 2, 4, 6, 8]),
}

# total load = payload + battery mass
SUM = {"threshold": {"fun": {"product": ["L", "M"]}, "res": "Lh", "formula": "l + m"}}


def identity_bundle():
    """Point estimates; the composite exposes cost and (a copy of) battery mass."""
    return {
        "monad": "identity",
        "description": "Electric vehicle: chassis and battery with mass feedback, point estimates.",
        "posets": {**BASE_POSETS, "P": axis("p", [0, 2, 4, 6, 8])},
        "dps": {
            "S": SUM,
            "C": {"threshold": {"fun": {"product": ["V", "Lh"]}, "res": "P", "formula": "v + lh/2"}},
            "B": {"relation": {"fun": "P", "res": {"product": ["Cst", "Mb"]}, "formula": "p <= 2*c + mb"}},
            "Split": {"relation": {"fun": "Mb", "res": {"product": ["Mx", "M"]},
                                   "formula": "mb <= mx and mb <= m"}},
        },
        "diagram": "loop[M]((id(V) | S) ; C ; B ; (id(Cst) | Split))",
        "queries": [{"type": "query", "f": [v, l]} for v, l in [(0, 0), (2, 1), (3, 2), (4, 4)]],
    }


def interval_bundle():
    """Chassis and battery models with worst/best-case bounds around the point estimates."""
    return {
        "monad": "interval",
        "description": "Electric vehicle with interval bounds per chassis model CM and battery model BM.",
        "posets": {**BASE_POSETS, "P": axis("p", [0, 2, 4, 6, 8])},
        "dps": {
            "S": SUM,
            "Split": {"relation": {"fun": "Mb", "res": {"product": ["Mx", "M"]},
                                   "formula": "mb <= mx and mb <= m"}},
        },
        "cells": {
            "C": {"threshold_family": {
                "param": [{"name": "CM", "labels": [1, 2]}],
                "fun": {"product": ["V", "Lh"]}, "res": "P",
                "formula": {"interval": ["CM*v + lh/2 + 1", "CM*v + lh/2 - 1"]}}},
            "B": {"threshold_family": {
                "param": [{"name": "BM", "labels": [1, 2]}],
                "type": "relation", "fun": "P", "res": {"product": ["Cst", "Mb"]},
                "formula": {"interval": ["p <= BM*c + mb - 1", "p <= BM*c + mb + 1"]}}},
        },
        "diagram": "loop[M]((id(V) | S) ; C ; B ; (id(Cst) | Split))",
        "queries": [{"type": "query", "f": [v, l]} for v, l in [(2, 1), (3, 2)]],
    }


def _theta_dist(cm, d):
    p = {1: 0.9, 2: 0.6, 3: 0.3}[d]
    return [[cm, p], [cm + 1, round(1 - p, 10)]]


def _k_dist(bm, d):
    p = {1: 0.8, 2: 0.5, 3: 0.2}[d]
    return [[bm + 1, p], [bm, round(1 - p, 10)]]


def distribution_bundle():
    """Deterministic chassis/battery families reparametrized by a random process g:
    decisions CM, BM and an unknown manufacturer parameter D induce a joint law over
    the drag coefficient theta and the battery efficiency k."""
    table = []
    for cm, d, bm in itertools.product([1, 2], [1, 2, 3], [1, 2]):
        atoms = []
        for (t, pt), (k, pk) in itertools.product(_theta_dist(cm, d), _k_dist(bm, d)):
            atoms.append([[t, k], round(pt * pk, 12)])
        table.append({"point": [cm, d, bm], "value": {"atoms": atoms}})
    return {
        "monad": "distribution",
        "description": "Electric vehicle under a random process: decisions CM, BM, unknown D.",
        "seed": 0,
        "posets": {**{k: v for k, v in BASE_POSETS.items() if k not in ("Mb", "Mx")},
                   "P": axis("p", [0, 4, 8, 12, 16])},
        "dps": {"S": SUM},
        "cells": {
            "C": {"threshold_family": {
                "param": [{"name": "theta", "labels": [1, 2, 3]}],
                "fun": {"product": ["V", "Lh"]}, "res": "P", "formula": "theta*v + lh/2"}},
            "B": {"threshold_family": {
                "param": [{"name": "k", "labels": [1, 2, 3]}],
                "type": "relation", "fun": "P", "res": {"product": ["Cst", "M"]},
                "formula": "p <= k*c + m"}},
        },
        "repars": {
            "g": {"dom": [{"name": "CM", "labels": [1, 2]}, {"name": "D", "labels": [1, 2, 3]},
                          {"name": "BM", "labels": [1, 2]}],
                  "cod": [{"name": "theta", "labels": [1, 2, 3]}, {"name": "k", "labels": [1, 2, 3]}],
                  "table": table},
        },
        "diagram": "repar[g](loop[M]((id(V) | S) ; C ; B))",
        "queries": [
            {"type": "query", "f": [2, 1], "points": [[1, 1, 1], [2, 3, 2]]},
            {"type": "decide", "f": [2, 1], "utility": "expected"},
            {"type": "decide", "f": [2, 1], "utility": "worst_case"},
            {"type": "infer", "factor": "D", "prior": "uniform", "observations": [
                {"x": {"CM": 1, "BM": 1}, "f": [2, 1], "r": [2], "feasible": True},
                {"x": {"CM": 2, "BM": 1}, "f": [1, 0], "r": [1], "feasible": True},
                {"x": {"CM": 1, "BM": 2}, "f": [3, 2], "r": [2], "feasible": False}]},
            {"type": "fit", "formula": "theta*v + lh/2", "names": ["v", "lh"], "theta": "theta",
             "thetas": [1, 1.5, 2, 2.5, 3], "mode": "least_squares",
             "data": [{"f": [1, 2], "r": 3}, {"f": [2, 4], "r": 6}, {"f": [3, 0], "r": 5}]},
            {"type": "fit", "formula": "theta*v + lh/2", "names": ["v", "lh"], "theta": "theta",
             "thetas": [1, 1.5, 2, 2.5, 3], "mode": "constrained",
             "data": [{"f": [1, 2], "r": 3}, {"f": [2, 4], "r": 6}, {"f": [3, 0], "r": 5}]},
        ],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in (("ev_identity", identity_bundle()), ("ev_interval", interval_bundle()),
                      ("ev_distribution", distribution_bundle())):
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
