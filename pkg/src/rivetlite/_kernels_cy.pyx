# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled statevector kernel: in-place amplitude-pair updates.

Hot loop of the whole package; every simulation, expectation, and
parameter-shift gradient funnels through ``apply_ops``. Contract matches
``_kernels_py.apply_ops``.
"""

import numpy as np
cimport numpy as cnp

BACKEND = "compiled"

KIND_1Q = 0
KIND_CX = 1
KIND_CZ = 2
KIND_SWAP = 3


def apply_ops(cnp.complex128_t[::1] state,
              cnp.int32_t[::1] kinds,
              cnp.int32_t[::1] q0,
              cnp.int32_t[::1] q1,
              cnp.int32_t[::1] midx,
              cnp.complex128_t[:, :, ::1] mats):
    cdef Py_ssize_t size = state.shape[0]
    cdef Py_ssize_t nops = kinds.shape[0]
    cdef Py_ssize_t k, i, j, base, off, stride
    cdef Py_ssize_t abit, bbit
    cdef int kind
    cdef cnp.complex128_t m00, m01, m10, m11, lo, hi, tmp

    for k in range(nops):
        kind = kinds[k]
        if kind == 0:  # 1q matrix on qubit q0
            stride = (<Py_ssize_t>1) << q0[k]
            m00 = mats[midx[k], 0, 0]
            m01 = mats[midx[k], 0, 1]
            m10 = mats[midx[k], 1, 0]
            m11 = mats[midx[k], 1, 1]
            base = 0
            while base < size:
                for off in range(stride):
                    i = base + off
                    j = i + stride
                    lo = state[i]
                    hi = state[j]
                    state[i] = m00 * lo + m01 * hi
                    state[j] = m10 * lo + m11 * hi
                base += 2 * stride
        elif kind == 1:  # cx: control q0, target q1
            abit = (<Py_ssize_t>1) << q0[k]
            bbit = (<Py_ssize_t>1) << q1[k]
            for i in range(size):
                if (i & abit) != 0 and (i & bbit) == 0:
                    j = i | bbit
                    tmp = state[i]
                    state[i] = state[j]
                    state[j] = tmp
        elif kind == 2:  # cz
            abit = (<Py_ssize_t>1) << q0[k]
            bbit = (<Py_ssize_t>1) << q1[k]
            for i in range(size):
                if (i & abit) != 0 and (i & bbit) != 0:
                    state[i] = -state[i]
        elif kind == 3:  # swap
            abit = (<Py_ssize_t>1) << q0[k]
            bbit = (<Py_ssize_t>1) << q1[k]
            for i in range(size):
                if (i & abit) != 0 and (i & bbit) == 0:
                    j = (i & ~abit) | bbit
                    tmp = state[i]
                    state[i] = state[j]
                    state[j] = tmp
        else:
            raise ValueError(f"unknown op kind {kind}")
