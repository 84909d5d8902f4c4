"""Parametrized uncertain design problems.

Finite posets and monotone feasibility relations (``poset``, ``dp``), the
identity / powerset / interval / distribution monads (``monad``), parametrized
cells with reparametrization 2-cells (``para``), a wiring-diagram language
(``diagram``), and co-design queries, decisions and learning (``query``).
"""
from .dp import (
    DesignProblem,
    cap,
    compose,
    cup,
    identity_dp,
    leq_dp,
    mk_dp,
    relation_dp,
    sym_dp,
    tensor,
    threshold_dp,
    trace,
)
from .errors import ParadpError
from .kernels import BACKEND, available_backends, use_backend
from .monad import (
    KleisliMap,
    MonadKind,
    UncertainValue,
    bind,
    fmap,
    kleisli_compose,
    lift,
    monad,
    strength,
    unit,
    values_equal,
)
from .para import (
    ParamCell,
    Repar,
    check_2cell,
    coherence_cell,
    hcompose,
    hcompose_2cells,
    identity_cell,
    include,
    param_space,
    reparametrize,
    swap_repar,
    tensor_cell,
    tensorator,
    vcompose,
)
from .poset import (
    UNIT,
    Antichain,
    FinPoset,
    GridAxis,
    antichain_leq,
    chain,
    grid_poset,
    minimal_elements,
    mk_poset,
    opposite,
    product,
)
from .query import (
    Observation,
    bayes_update,
    decide,
    fit_threshold,
    fix_fun_min_res,
    min_cost,
    query_cell,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "UNIT", "Antichain", "DesignProblem", "FinPoset", "GridAxis", "KleisliMap",
    "MonadKind", "Observation", "ParadpError", "ParamCell", "Repar", "UncertainValue",
    "antichain_leq", "available_backends", "bayes_update", "bind", "cap", "chain", "check_2cell",
    "coherence_cell", "compose", "cup", "decide", "fit_threshold", "fix_fun_min_res", "fmap",
    "grid_poset", "hcompose", "hcompose_2cells", "identity_cell", "identity_dp", "include",
    "kleisli_compose", "leq_dp", "lift", "min_cost", "minimal_elements", "mk_dp", "mk_poset",
    "monad", "opposite", "param_space", "product", "query_cell", "relation_dp", "reparametrize",
    "strength", "swap_repar", "sym_dp", "tensor", "tensor_cell", "tensorator", "threshold_dp",
    "trace", "unit", "use_backend", "values_equal", "vcompose",
]
