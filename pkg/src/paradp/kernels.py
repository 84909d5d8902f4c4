"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``PARADP_PURE_PYTHON=1`` to force the numpy path.  Callers pass and get
back ``bool`` arrays; the byte-level views are handled here.
"""
from __future__ import annotations

import os

import numpy as np

from . import _pykernels

if os.environ.get("PARADP_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"


def _u8(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=bool).view(np.uint8)


def use_backend(name: str) -> None:
    """Switch backends at runtime (benchmarks and cross-checking tests)."""
    global _impl, BACKEND
    if name == "python":
        _impl = _pykernels
    elif name == "cython":
        from . import _ckernels  # type: ignore[attr-defined]

        _impl = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def available_backends() -> list[str]:
    out = ["python"]
    try:
        from . import _ckernels  # type: ignore[attr-defined]  # noqa: F401
    except ImportError:
        return out
    return ["cython", *out]


def bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.asarray(_impl.bool_matmul(_u8(a), _u8(b))).view(bool)


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    return np.asarray(_impl.transitive_closure(_u8(rel))).view(bool)


def monotone_witness(feas: np.ndarray, fle: np.ndarray, rle: np.ndarray):
    """First ``(f, f', r, r')`` with feas[f,r], f' <= f, r <= r' but not feas[f',r'], else None."""
    return _impl.monotone_witness(_u8(feas), _u8(fle), _u8(rle))


def minimal_mask(le: np.ndarray, mask: np.ndarray) -> np.ndarray:
    return np.asarray(_impl.minimal_mask(_u8(le), _u8(mask))).view(bool)
