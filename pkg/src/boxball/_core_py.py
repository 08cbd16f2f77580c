"""Pure-Python fallback for the compiled kernels in _core.pyx.

Slower, but produces bit-identical integer output; selected automatically
when the extension is unavailable or BOXBALL_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np


def gap_trajectory(w0, coins, cap):
    coins = np.ascontiguousarray(coins, dtype=np.uint8)
    n, d = coins.shape
    w0 = np.asarray(w0, dtype=np.int64)
    if w0.shape[0] != d - 1:
        raise ValueError("gap vector length must be d-1")
    if cap < 1:
        raise ValueError("capacity must be >= 1")

    W = np.empty((n + 1, d - 1), dtype=np.int64)
    z = np.empty(n + 1, dtype=np.int64)
    pos = [0]
    for g in w0:
        pos.append(pos[-1] + int(g) + 1)
    W[0] = w0
    z[0] = 0
    coin_rows = coins.tolist()

    for t in range(n):
        row = coin_rows[t]
        load = 0
        site = 0
        out = []
        for i in range(d):
            b = pos[i]
            if load > 0:
                ndrops = min(b - site, load)
                out.extend(range(site, site + ndrops))
                load -= ndrops
            if load >= cap:
                out.append(b)
            elif row[i]:
                load += 1
            else:
                out.append(b)
            site = b + 1
        out.extend(range(site, site + load))
        pos = out
        W[t + 1] = [pos[i + 1] - pos[i] - 1 for i in range(d - 1)]
        z[t + 1] = pos[0]

    return W, z


def pushtasep_gap_trajectory(w0, kappa):
    w0 = np.asarray(w0, dtype=np.int64)
    kappa = np.asarray(kappa, dtype=np.int64)
    m = kappa.shape[0]
    dm1 = w0.shape[0]
    d = dm1 + 1

    W = np.empty((m + 1, dm1), dtype=np.int64)
    x = np.empty(m + 1, dtype=np.int64)
    w = [int(g) for g in w0]
    W[0] = w0
    x[0] = 0

    for t in range(m):
        i = int(kappa[t])
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
        W[t + 1] = w

    return W, x
