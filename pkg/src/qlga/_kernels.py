"""Numba kernels acting in place on a dense amplitude array.

Bit positions are positions in the basis index (bit 0 = least significant).
Controls are given as a mask/value pair: a branch is active when
``(index & mask) == value``.
"""

import numpy as np
from numba import njit

_OPTS = dict(nogil=True, cache=True)


@njit(**_OPTS)
def apply_matrix(psi, bit, cmask, cval, m00, m01, m10, m11):
    step = np.int64(1) << bit
    n = psi.shape[0]
    for i in range(n):
        if i & step:
            continue
        if (i & cmask) != cval:
            continue
        j = i | step
        a = psi[i]
        b = psi[j]
        psi[i] = m00 * a + m01 * b
        psi[j] = m10 * a + m11 * b


@njit(**_OPTS)
def apply_x(psi, bit, cmask, cval):
    step = np.int64(1) << bit
    n = psi.shape[0]
    for i in range(n):
        if i & step:
            continue
        if (i & cmask) != cval:
            continue
        j = i | step
        tmp = psi[i]
        psi[i] = psi[j]
        psi[j] = tmp


@njit(**_OPTS)
def apply_diag(psi, bit, cmask, cval, d0, d1):
    step = np.int64(1) << bit
    n = psi.shape[0]
    for i in range(n):
        if (i & cmask) != cval:
            continue
        if i & step:
            psi[i] *= d1
        else:
            psi[i] *= d0


@njit(**_OPTS)
def apply_swap(psi, bit_a, bit_b, cmask, cval):
    sa = np.int64(1) << bit_a
    sb = np.int64(1) << bit_b
    n = psi.shape[0]
    for i in range(n):
        # visit each exchanged pair once: bit_a set, bit_b clear
        if not (i & sa) or (i & sb):
            continue
        if (i & cmask) != cval:
            continue
        j = (i ^ sa) | sb
        tmp = psi[i]
        psi[i] = psi[j]
        psi[j] = tmp


@njit(**_OPTS)
def marginal_probabilities(psi, bits):
    """Probability of each outcome on ``bits``; ``bits[0]`` is the outcome MSB."""
    k = bits.shape[0]
    out = np.zeros(np.int64(1) << k)
    n = psi.shape[0]
    for i in range(n):
        a = psi[i]
        p = a.real * a.real + a.imag * a.imag
        if p == 0.0:
            continue
        key = 0
        for m in range(k):
            key = (key << 1) | ((i >> bits[m]) & 1)
        out[key] += p
    return out


OP_MATRIX, OP_X, OP_DIAG, OP_SWAP = 0, 1, 2, 3


@njit(**_OPTS)
def run_program(psi, ops, bits, bits2, cmasks, cvals, mats, start, stop):
    """Apply gates ``start..stop-1`` of a compiled program."""
    for g in range(start, stop):
        op = ops[g]
        if op == OP_X:
            apply_x(psi, bits[g], cmasks[g], cvals[g])
        elif op == OP_DIAG:
            apply_diag(psi, bits[g], cmasks[g], cvals[g], mats[g, 0], mats[g, 3])
        elif op == OP_SWAP:
            apply_swap(psi, bits[g], bits2[g], cmasks[g], cvals[g])
        else:
            apply_matrix(psi, bits[g], cmasks[g], cvals[g], mats[g, 0], mats[g, 1], mats[g, 2], mats[g, 3])
