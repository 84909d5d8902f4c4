"""Co-design queries, decisions and learning on (parametrized) design problems."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .dp import DesignProblem
from .errors import (
    EmptyFeasibleSet,
    IncompatibleUtility,
    KindMismatch,
    NotAChain,
    UnknownElement,
    ZeroEvidence,
)
from .formula import Formula
from .monad import MonadKind, UncertainValue, monad
from .para import ParamCell, factor_position
from .poset import Antichain, antichain_leq, minimal_indices

INFEASIBLE = math.inf

UTILITIES = ("expected", "worst_case", "best_case")


def fix_fun_min_res(d: DesignProblem, f: Any) -> Antichain:
    """Minimal resources making functionality ``f`` feasible (empty if none does)."""
    row = d.feas[d.fun.index(f)]
    return Antichain(d.res, minimal_indices(d.res, np.flatnonzero(row)))


@dataclass(frozen=True)
class QueryResult:
    """Per parameter point, the lifted query answer."""

    cell: ParamCell
    functionality: Any
    answers: tuple[UncertainValue, ...]

    def __call__(self, point: Any) -> UncertainValue:
        return self.answers[self.cell.dom.index(point)]

    def items(self):
        return zip(self.cell.dom.elements, self.answers)


def query_cell(cell: ParamCell, f: Any) -> QueryResult:
    """Push ``fix_fun_min_res(-, f)`` through the monad at every parameter point.

    Interval answers are ``[front(lo), front(hi)]`` in the upper-set order on
    antichains: the worst-case front first, the best-case front second.
    """
    cell.src.index(f)
    m = monad(cell.kind)
    memo: dict[DesignProblem, Antichain] = {}

    def q(d: DesignProblem) -> Antichain:
        a = memo.get(d)
        if a is None:
            a = memo[d] = fix_fun_min_res(d, f)
        return a

    if cell.kind is MonadKind.INTERVAL:
        answers = tuple(m.fmap(v, q, antichain_leq) for v in cell.table)
    else:
        answers = tuple(m.fmap(v, q) for v in cell.table)
    return QueryResult(cell, f, answers)


def _chain_coords(d: DesignProblem) -> list[Any]:
    res = d.res
    if len(res.factors) != 1 or not res.factors[0].is_ascending_chain():
        raise NotAChain(f"resource poset {res!r} is not a single ascending chain")
    return [e[0] for e in res.elements]


def min_cost(d: DesignProblem, f: Any) -> Any:
    """Least chain coordinate feasible for ``f``; ``INFEASIBLE`` (+inf) if none."""
    coords = _chain_coords(d)
    hits = np.flatnonzero(d.feas[d.fun.index(f)])
    return coords[hits[0]] if hits.size else INFEASIBLE


def _score(value: UncertainValue, f: Any, utility: str) -> Any:
    k = value.kind
    if k is MonadKind.IDENTITY:
        return min_cost(value.payload, f)
    if k is MonadKind.INTERVAL:
        if utility == "expected":
            raise IncompatibleUtility("expected cost needs distribution-valued cells")
        # hi is the more feasible end, so it gives the optimistic cost
        return min_cost(value.lo if utility == "worst_case" else value.hi, f)
    if k is MonadKind.POWERSET:
        if utility == "expected":
            raise IncompatibleUtility("expected cost needs distribution-valued cells")
        costs = [min_cost(d, f) for d in value.payload]
        return max(costs) if utility == "worst_case" else min(costs)
    costs = [(min_cost(d, f), p) for d, p in value.payload]
    if utility == "expected":
        if any(c == INFEASIBLE for c, _ in costs):
            return INFEASIBLE
        return math.fsum(float(c) * p for c, p in costs)
    pick = max if utility == "worst_case" else min
    return pick(c for c, _ in costs)


def point_scores(cell: ParamCell, f: Any, utility: str) -> list[Any]:
    if utility not in UTILITIES:
        raise IncompatibleUtility(f"unknown utility {utility!r}; choose from {UTILITIES}")
    cell.src.index(f)
    _chain_coords(cell.table[0].support()[0])
    return [_score(v, f, utility) for v in cell.table]


def decide(cell: ParamCell, f: Any, utility: str = "expected") -> tuple[tuple, Any]:
    """Parameter point minimizing the lifted minimal cost; ties go to the lowest index."""
    scores = point_scores(cell, f, utility)
    best = min(range(len(scores)), key=lambda i: (scores[i], i))
    return cell.dom.element(best), scores[best]


# --- Bayesian inference -----------------------------------------------------

@dataclass(frozen=True)
class Observation:
    """Decision coordinates ``x`` (all factors except the inferred one), a
    functionality/resource pair and whether it was feasible."""

    x: tuple
    f: Any
    r: Any
    feasible: bool = True


def likelihood(value: UncertainValue, obs: Observation) -> float:
    if value.kind is not MonadKind.DISTRIBUTION:
        raise KindMismatch("likelihoods need distribution-valued cells")
    total = 0.0
    for d, p in value.payload:
        if bool(d.feas[d.fun.index(obs.f), d.res.index(obs.r)]) == obs.feasible:
            total += p
    return total


def bayes_update(cell: ParamCell, factor: str | int, prior: UncertainValue,
                 observations: Iterable[Observation]) -> UncertainValue:
    """Posterior over the labels of one parameter factor.

    Observations are conditionally independent given the full parameter point;
    each contributes the probability that the sampled DP agrees with it.
    """
    if cell.kind is not MonadKind.DISTRIBUTION:
        raise KindMismatch("bayes_update needs a distribution-valued cell")
    if prior.kind is not MonadKind.DISTRIBUTION:
        raise KindMismatch("the prior must be a distribution")
    i = factor if isinstance(factor, int) else factor_position(cell.dom, factor)
    labels = cell.dom.factors[i].labels
    prior_mass = dict(prior.payload)
    for d in prior_mass:
        cell.dom.factors[i].index(d)
    log_post = {d: math.log(prior_mass[d]) if prior_mass.get(d, 0.0) > 0 else -math.inf for d in labels}
    for obs in observations:
        x = tuple(obs.x)
        if len(x) != len(cell.dom.factors) - 1:
            raise UnknownElement(f"observation fixes {len(x)} factors, expected {len(cell.dom.factors) - 1}")
        for d in labels:
            if log_post[d] == -math.inf:
                continue
            lik = likelihood(cell(x[:i] + (d,) + x[i:]), obs)
            log_post[d] = log_post[d] + math.log(lik) if lik > 0 else -math.inf
    finite = [v for v in log_post.values() if v > -math.inf]
    if not finite:
        raise ZeroEvidence("every parameter value gives the observations zero likelihood")
    top = max(finite)
    weights = {d: math.exp(v - top) for d, v in log_post.items() if v > -math.inf}
    z = math.fsum(weights.values())
    return UncertainValue.of_atoms({d: w / z for d, w in weights.items()})


# --- threshold fitting ------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    theta: Any
    loss: Any
    losses: tuple
    feasible: tuple[bool, ...]


def squared_loss(phi: Callable[[Sequence[Any], Any], Any], theta: Any,
                 data: Sequence[tuple[Sequence[Any], Any]]) -> Any:
    return sum((phi(f, theta) - r) ** 2 for f, r in data)


def fit_threshold(phi: Callable[[Sequence[Any], Any], Any], thetas: Sequence[Any],
                  data: Sequence[tuple[Sequence[Any], Any]], mode: str = "least_squares",
                  metric: Callable[[Any], Any] | None = None) -> FitResult:
    """Fit ``phi(f; theta) <= r`` models to observed ``(f, r)`` pairs over a finite grid.

    ``least_squares`` minimizes the squared residual; ``constrained`` keeps only
    thetas satisfying every datum and minimizes ``metric`` (default: the same
    squared residual).  Ties go to the earliest theta.
    """
    if not data:
        raise ValueError("fit_threshold needs at least one datum")
    if mode not in ("least_squares", "constrained"):
        raise ValueError(f"unknown fit mode {mode!r}")
    losses = tuple(squared_loss(phi, t, data) for t in thetas)
    feasible = tuple(all(phi(f, t) <= r for f, r in data) for t in thetas)
    if mode == "least_squares":
        i = min(range(len(thetas)), key=lambda j: (losses[j], j))
        return FitResult(thetas[i], losses[i], losses, feasible)
    cands = [j for j in range(len(thetas)) if feasible[j]]
    if not cands:
        raise EmptyFeasibleSet("no theta on the grid satisfies every datum")
    score = (lambda j: metric(thetas[j])) if metric else (lambda j: losses[j])
    i = min(cands, key=lambda j: (score(j), j))
    return FitResult(thetas[i], score(i), losses, feasible)


def formula_family(text: str, names: Sequence[str], theta_name: str = "theta") -> Callable[[Sequence[Any], Any], Any]:
    """``phi(f; theta)`` from a formula over functionality axis names and ``theta_name``."""
    form = Formula(text)

    def phi(f: Sequence[Any], theta: Any) -> Any:
        return form({**dict(zip(names, f)), theta_name: theta})

    return phi


__all__ = [
    "INFEASIBLE", "FitResult", "Observation", "QueryResult", "bayes_update", "decide",
    "fit_threshold", "fix_fun_min_res", "formula_family", "likelihood", "min_cost",
    "point_scores", "query_cell", "squared_loss",
]
