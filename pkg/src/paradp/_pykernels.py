"""Pure numpy implementations of the Boolean-matrix kernels.

Signatures match the compiled module ``paradp._ckernels``; inputs are
C-contiguous ``uint8`` 0/1 arrays.
"""
from __future__ import annotations

import numpy as np


def bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError("inner dimensions differ")
    # int32 accumulation cannot overflow for any matrix that fits in memory here
    return (a.astype(np.int32) @ b.astype(np.int32) > 0).astype(np.uint8)


def transitive_closure(rel: np.ndarray) -> np.ndarray:
    c = rel.astype(bool, copy=True)
    for k in range(c.shape[0]):
        c |= np.outer(c[:, k], c[k, :])
    return c.astype(np.uint8)


def monotone_witness(feas: np.ndarray, fle: np.ndarray, rle: np.ndarray):
    fb, fl, rl = feas.astype(bool), fle.astype(bool), rle.astype(bool)
    # upward closure of each row: bad[f, s] = exists r <= s with feas[f, r] and not feas[f, s]
    reach = (fb.astype(np.int32) @ rl.astype(np.int32)) > 0
    bad = reach & ~fb
    if bad.any():
        f, s = map(int, np.argwhere(bad)[0])
        r = int(np.flatnonzero(fb[f] & rl[:, s])[0])
        return (f, f, r, s)
    lower = fl & ~np.eye(fl.shape[0], dtype=bool)
    for f in range(fb.shape[0]):
        below = np.flatnonzero(lower[:, f])
        if below.size == 0:
            continue
        miss = fb[f][None, :] & ~fb[below]
        if miss.any():
            gi, r = np.argwhere(miss)[0]
            return (f, int(below[gi]), int(r), int(r))
    return None


def minimal_mask(le: np.ndarray, mask: np.ndarray) -> np.ndarray:
    lb, m = le.astype(bool), mask.astype(bool)
    strict = lb & ~lb.T
    dominated = (strict & m[:, None]).any(axis=0)
    return (m & ~dominated).astype(np.uint8)
