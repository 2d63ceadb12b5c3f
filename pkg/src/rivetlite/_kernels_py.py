"""Pure-numpy statevector kernel: the fallback when the compiled extension
is unavailable. Same contract as ``_kernels_cy.apply_ops``."""

from __future__ import annotations

import numpy as np

BACKEND = "python"

KIND_1Q = 0
KIND_CX = 1
KIND_CZ = 2
KIND_SWAP = 3


def apply_ops(state: np.ndarray, kinds: np.ndarray, q0: np.ndarray, q1: np.ndarray,
              midx: np.ndarray, mats: np.ndarray) -> None:
    """Apply an op tape in place to a 2^n complex statevector.

    Qubit 0 is the least-significant index bit. Kind 0 applies the 2x2
    matrix ``mats[midx]`` to qubit ``q0``; kinds 1-3 are cx/cz/swap on
    (q0, q1).
    """
    n = int(np.log2(state.shape[0]))
    for k in range(kinds.shape[0]):
        kind = int(kinds[k])
        a, b = int(q0[k]), int(q1[k])
        if kind == KIND_1Q:
            m = mats[int(midx[k])]
            view = state.reshape(-1, 2, 1 << a)
            lo = view[:, 0, :].copy()
            hi = view[:, 1, :]
            view[:, 0, :] = m[0, 0] * lo + m[0, 1] * hi
            view[:, 1, :] = m[1, 0] * lo + m[1, 1] * hi
        else:
            view = state.reshape([2] * n)
            # index axes are reversed: axis j addresses qubit n-1-j
            ia, ib = n - 1 - a, n - 1 - b
            if kind == KIND_CX:
                sel0 = _slices(n, {ia: 1, ib: 0})
                sel1 = _slices(n, {ia: 1, ib: 1})
                tmp = view[sel0].copy()
                view[sel0] = view[sel1]
                view[sel1] = tmp
            elif kind == KIND_CZ:
                view[_slices(n, {ia: 1, ib: 1})] *= -1.0
            elif kind == KIND_SWAP:
                sel01 = _slices(n, {ia: 0, ib: 1})
                sel10 = _slices(n, {ia: 1, ib: 0})
                tmp = view[sel01].copy()
                view[sel01] = view[sel10]
                view[sel10] = tmp
            else:
                raise ValueError(f"unknown op kind {kind}")


def _slices(n: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * n
    for axis, v in fixed.items():
        idx[axis] = v
    return tuple(idx)
