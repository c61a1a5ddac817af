"""Compiled inner loops for gate application and readout.

All kernels take the amplitude vector as a flat complex128 array whose index
bit q is qubit q (qubit 0 = least significant bit). Control masks are plain
OR-combinations of 1 << qubit; a basis index passes when it has every
pos_mask bit set and every neg_mask bit clear. Single-threaded on purpose:
updates stay deterministic and the workloads here are memory-bound anyway.
"""

import numba
import numpy as np

_jit = numba.njit(cache=True)


@_jit
def one_qubit(amp, m00, m01, m10, m11, target, pos_mask, neg_mask):
    # Pairs (i0, i1) differ only in the target bit; controls never include it.
    half = amp.shape[0] >> 1
    tmask = np.int64(1) << target
    low = tmask - 1
    for g in range(half):
        i0 = ((g >> target) << (target + 1)) | (g & low)
        if (i0 & pos_mask) == pos_mask and (i0 & neg_mask) == 0:
            i1 = i0 | tmask
            a0 = amp[i0]
            a1 = amp[i1]
            amp[i0] = m00 * a0 + m01 * a1
            amp[i1] = m10 * a0 + m11 * a1


@_jit
def bitfunc_xor(amp, in_bits, out_bit, table, pos_mask, neg_mask):
    # |a, b> -> |a, b ^ f(a)| as a pair swap on the output bit.
    half = amp.shape[0] >> 1
    omask = np.int64(1) << out_bit
    low = omask - 1
    nbits = in_bits.shape[0]
    for g in range(half):
        i0 = ((g >> out_bit) << (out_bit + 1)) | (g & low)
        if (i0 & pos_mask) == pos_mask and (i0 & neg_mask) == 0:
            s = np.int64(0)
            for k in range(nbits):
                s = (s << 1) | ((i0 >> in_bits[k]) & 1)
            if table[s]:
                i1 = i0 | omask
                tmp = amp[i0]
                amp[i0] = amp[i1]
                amp[i1] = tmp


@_jit
def permute(src, dst, bits, perm):
    # dst[pi(i)] = src[i] where pi relabels the sub-index carried by `bits`.
    n = src.shape[0]
    nbits = bits.shape[0]
    for i in range(n):
        s = np.int64(0)
        for k in range(nbits):
            s = (s << 1) | ((i >> bits[k]) & 1)
        p = perm[s]
        j = i
        for k in range(nbits):
            b = bits[k]
            bit = (p >> (nbits - 1 - k)) & 1
            j = (j & ~(np.int64(1) << b)) | (bit << b)
        dst[j] = src[i]


@_jit
def phase_mult(amp, bits, phases):
    n = amp.shape[0]
    nbits = bits.shape[0]
    for i in range(n):
        s = np.int64(0)
        for k in range(nbits):
            s = (s << 1) | ((i >> bits[k]) & 1)
        amp[i] = amp[i] * phases[s]


@_jit
def prob_value(amp, bits, value):
    n = amp.shape[0]
    nbits = bits.shape[0]
    total = 0.0
    for i in range(n):
        s = np.int64(0)
        for k in range(nbits):
            s = (s << 1) | ((i >> bits[k]) & 1)
        if s == value:
            a = amp[i]
            total += a.real * a.real + a.imag * a.imag
    return total


@_jit
def prob_zero_mask(amp, mask):
    n = amp.shape[0]
    total = 0.0
    for i in range(n):
        if (i & mask) == 0:
            a = amp[i]
            total += a.real * a.real + a.imag * a.imag
    return total


@_jit
def norm_sq(amp):
    n = amp.shape[0]
    total = 0.0
    for i in range(n):
        a = amp[i]
        total += a.real * a.real + a.imag * a.imag
    return total
