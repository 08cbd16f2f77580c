# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the carrier sweep and the PushTASEP jump chain.

Semantics must match boxball._core_py exactly (integer-for-integer); the
test suite cross-checks the two backends on random inputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def gap_trajectory(cnp.int64_t[::1] w0, const cnp.uint8_t[:, ::1] coins, long cap):
    """Evolve the gap vector under carrier sweeps driven by given coins.

    Returns (W, zeta1): W has shape (n+1, d-1) with W[t] the gaps at time t,
    zeta1[t] is the displacement of the leftmost ball since time 0.
    """
    cdef Py_ssize_t n = coins.shape[0]
    cdef Py_ssize_t d = coins.shape[1]
    if w0.shape[0] != d - 1:
        raise ValueError("gap vector length must be d-1")
    if cap < 1:
        raise ValueError("capacity must be >= 1")

    W_arr = np.empty((n + 1, d - 1), dtype=np.int64)
    z_arr = np.empty(n + 1, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] W = W_arr
    cdef cnp.int64_t[::1] z = z_arr
    cdef cnp.int64_t[::1] pos = np.empty(d, dtype=np.int64)
    cdef cnp.int64_t[::1] out = np.empty(d, dtype=np.int64)

    cdef Py_ssize_t t, i, j, k
    cdef long load, ndrops
    cdef cnp.int64_t site, b

    pos[0] = 0
    for i in range(1, d):
        pos[i] = pos[i - 1] + w0[i - 1] + 1
    for i in range(d - 1):
        W[0, i] = w0[i]
    z[0] = 0

    for t in range(n):
        load = 0
        site = 0
        k = 0
        for i in range(d):
            b = pos[i]
            if load > 0:
                ndrops = b - site
                if ndrops > load:
                    ndrops = load
                for j in range(ndrops):
                    out[k] = site + j
                    k += 1
                load -= ndrops
            if load >= cap:
                out[k] = b
                k += 1
            elif coins[t, i]:
                load += 1
            else:
                out[k] = b
                k += 1
            site = b + 1
        for j in range(load):
            out[k] = site + j
            k += 1
        for i in range(d):
            pos[i] = out[i]
        for i in range(d - 1):
            W[t + 1, i] = pos[i + 1] - pos[i] - 1
        z[t + 1] = pos[0]

    return W_arr, z_arr


def pushtasep_gap_trajectory(cnp.int64_t[::1] w0, const cnp.int64_t[::1] kappa):
    """Evolve PushTASEP gaps along the jump chain.

    kappa holds 0-based indices of the jumping particle.  Returns (W, xi1)
    shaped like gap_trajectory's output, xi1 being the displacement of the
    leftmost particle (never pushed, so it moves only on its own jumps).
    """
    cdef Py_ssize_t m = kappa.shape[0]
    cdef Py_ssize_t dm1 = w0.shape[0]
    cdef Py_ssize_t d = dm1 + 1

    W_arr = np.empty((m + 1, dm1), dtype=np.int64)
    x_arr = np.empty(m + 1, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] W = W_arr
    cdef cnp.int64_t[::1] x = x_arr
    cdef cnp.int64_t[::1] w = np.array(w0, dtype=np.int64)

    cdef Py_ssize_t t, i, j, r

    for i in range(dm1):
        W[0, i] = w0[i]
    x[0] = 0

    for t in range(m):
        i = kappa[t]
        if i < 0 or i >= d:
            raise ValueError("particle index out of range")
        j = i
        while j < dm1 and w[j] == 0:
            j += 1
        if i > 0:
            w[i - 1] += 1
        if j < dm1:
            w[j] -= 1
        x[t + 1] = x[t] + (1 if i == 0 else 0)
        for r in range(dm1):
            W[t + 1, r] = w[r]

    return W_arr, x_arr
