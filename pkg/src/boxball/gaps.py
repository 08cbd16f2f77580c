"""Gap process machinery: projection, bulk walk, boundary cells, and the
overdetermined Skorokhod decomposition W = X + R Y + alpha.

The gap vector w has d-1 entries, w[i] = positions[i+1] - positions[i] - 1.
Its transition kernel is homogeneous on the interior (all gaps >= 1) and on
finitely many boundary cells; cells are identified *semantically* as sets of
boundary points sharing the same coin-to-increment map once every gap is
clamped at d (a gap of d or more is dynamically indistinguishable from an
infinite one, since the carrier never holds more than d balls).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bbs import BallConfig, DynamicsParams, carrier_sweep

MAX_ENUM_D = 12
MAX_PARTITION_D = 6


class DimensionError(ValueError):
    pass


class InteriorPointError(ValueError):
    pass


def project(config: BallConfig) -> tuple[int, ...]:
    """Gap vector of a configuration; needs at least two balls."""
    if config.d < 2:
        raise DimensionError("gap projection needs d >= 2")
    return config.gaps()


def bulk_increment(coins) -> np.ndarray:
    """Free-walk gap increment for one coin vector: eta[i+1] - eta[i]."""
    eta = np.asarray(coins, dtype=np.int64)
    return eta[1:] - eta[:-1]


def gap_step(w: tuple[int, ...], params: DynamicsParams, coins) -> tuple[int, ...]:
    """Push a gap vector through one sweep (via an arbitrary representative)."""
    rep = BallConfig.from_gaps(w)
    nxt, _ = carrier_sweep(rep, params, coins)
    return nxt.gaps()


def exact_kernel(w, params: DynamicsParams) -> dict[tuple[int, ...], Fraction]:
    """Exact one-step distribution of the gap increment at w.

    Enumerates all 2^d coin vectors with weight eps^fails * (1-eps)^succ in
    rational arithmetic; the returned probabilities sum to 1 exactly.
    """
    w = tuple(int(g) for g in w)
    d = params.d
    if d > MAX_ENUM_D:
        raise DimensionError(f"exact enumeration supports d <= {MAX_ENUM_D}")
    if len(w) != d - 1:
        raise DimensionError("gap vector length must be d-1")
    eps = params.eps_exact
    dist: dict[tuple[int, ...], Fraction] = {}
    for coins in itertools.product((0, 1), repeat=d):
        weight = (1 - eps) ** sum(coins) * eps ** (d - sum(coins))
        if weight == 0:
            continue
        delta = tuple(a - b for a, b in zip(gap_step(w, params, coins), w))
        dist[delta] = dist.get(delta, Fraction(0)) + weight
    assert sum(dist.values()) == 1
    return dist


def exact_displacement(w, params: DynamicsParams) -> tuple[Fraction, ...]:
    """Exact expected one-step displacement of each ball at gap vector w."""
    w = tuple(int(g) for g in w)
    d = params.d
    if d > MAX_ENUM_D:
        raise DimensionError(f"exact enumeration supports d <= {MAX_ENUM_D}")
    eps = params.eps_exact
    rep = BallConfig.from_gaps(w)
    means = [Fraction(0)] * d
    for coins in itertools.product((0, 1), repeat=d):
        weight = (1 - eps) ** sum(coins) * eps ** (d - sum(coins))
        if weight == 0:
            continue
        nxt, _ = carrier_sweep(rep, params, coins)
        for i in range(d):
            means[i] += weight * (nxt.positions[i] - rep.positions[i])
    return tuple(means)


def cell_signature(w, d: int, capacity) -> tuple:
    """Coin-to-increment map at the clamped point; equal signature = same cell.

    The map is epsilon-free: it records, for every coin vector, the exact gap
    increment at (min(w_1, d), ..., min(w_{d-1}, d)).
    """
    w = tuple(int(g) for g in w)
    if len(w) != d - 1:
        raise DimensionError("gap vector length must be d-1")
    if all(g >= 1 for g in w):
        raise InteriorPointError(f"{w} is interior; signatures are defined on the boundary")
    params = DynamicsParams(Fraction(1, 2), capacity, d)
    clamped = tuple(min(g, d) for g in w)
    return tuple(
        tuple(a - b for a, b in zip(gap_step(clamped, params, coins), clamped))
        for coins in itertools.product((0, 1), repeat=d)
    )


@dataclass(frozen=True)
class BoundaryCell:
    """One homogeneity class of the boundary kernel.

    f is the set of pinned ("degenerate") coordinates, 1-based; the
    representative is the componentwise-minimal member.
    """

    id: int
    f: frozenset[int]
    representative: tuple[int, ...]

    def contains(self, w, clamp: int) -> bool:
        w = tuple(int(g) for g in w)
        for i in range(len(w)):
            pinned = (i + 1) in self.f
            if pinned and w[i] != self.representative[i]:
                return False
            if not pinned and min(w[i], clamp) < self.representative[i]:
                return False
        return True


@dataclass(frozen=True)
class BoundaryPartition:
    """Cells p_1..p_k of the gap-space boundary, principal cells first.

    For each coordinate i there is exactly one cell with f = {i}, indexed
    as cell i.  Membership of an arbitrary boundary point is resolved by
    clamping every gap at ``clamp`` and looking the point up.
    """

    d: int
    capacity: int | float | None
    k: int
    cells: tuple[BoundaryCell, ...]
    clamp: int
    _lookup: dict[tuple[int, ...], int]

    def cell_of(self, w) -> BoundaryCell | None:
        """Cell containing w, or None if w is interior."""
        w = tuple(int(g) for g in w)
        if all(g >= 1 for g in w):
            return None
        key = tuple(min(g, self.clamp) for g in w)
        return self.cells[self._lookup[key]]

    def cell_index_of(self, w) -> int:
        """0-based cell index; -1 for interior points (fast path)."""
        key = tuple(min(int(g), self.clamp) for g in w)
        idx = self._lookup.get(key)
        return -1 if idx is None else idx

    def principal(self) -> tuple[BoundaryCell, ...]:
        return self.cells[: self.d - 1]

    def f_map(self) -> dict[int, frozenset[int]]:
        return {c.id: c.f for c in self.cells}

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "c": "inf" if self.capacity in (None, float("inf")) else int(self.capacity),
            "k": self.k,
            "cells": [
                {"id": c.id, "f": sorted(c.f), "representative": list(c.representative)}
                for c in self.cells
            ],
        }


def _order_cells(groups: list[tuple[frozenset[int], tuple[int, ...], list[tuple[int, ...]]]], d: int):
    """Principal cells (f == {i}) first in coordinate order, then the rest
    sorted by (|f|, representative)."""
    principal: dict[int, tuple] = {}
    rest = []
    for f, rep, members in groups:
        if len(f) == 1:
            (i,) = f
            if i in principal:
                raise RuntimeError(f"two cells claim f = {{{i}}}")
            principal[i] = (f, rep, members)
        else:
            rest.append((f, rep, members))
    if sorted(principal) != list(range(1, d)):
        raise RuntimeError(
            f"expected exactly one principal cell per coordinate 1..{d - 1}, got {sorted(principal)}"
        )
    ordered = [principal[i] for i in range(1, d)]
    ordered.extend(sorted(rest, key=lambda g: (len(g[0]), g[1])))
    return ordered


def build_partition(d: int, capacity) -> BoundaryPartition:
    """Boundary-cell partition by exhaustive signature grouping on [0, d]^{d-1}.

    Pinned coordinates are those constant across the cell's box members at a
    value below the clamp; the construction is validated against the box
    structure (members exactly fill {y: y_i = rep_i on f, y_i >= rep_i off f})
    and, for capacity >= d, principal representatives are checked to be
    (1,...,1,0,2,1,...,1).
    """
    if not 2 <= d <= MAX_PARTITION_D:
        raise DimensionError(f"partition construction supports 2 <= d <= {MAX_PARTITION_D}")
    clamp = d
    box = itertools.product(range(clamp + 1), repeat=d - 1)
    by_sig: dict[tuple, list[tuple[int, ...]]] = {}
    for w in box:
        if all(g >= 1 for g in w):
            continue
        by_sig.setdefault(cell_signature(w, d, capacity), []).append(w)

    groups = []
    for members in by_sig.values():
        arr = np.array(members, dtype=np.int64)
        rep = tuple(int(v) for v in arr.min(axis=0))
        pinned = frozenset(
            i + 1
            for i in range(d - 1)
            if int(arr[:, i].max()) == rep[i] and rep[i] < clamp
        )
        if not pinned:
            raise RuntimeError(f"cell with representative {rep} has no pinned coordinate")
        expected = [
            y
            for y in itertools.product(range(clamp + 1), repeat=d - 1)
            if not all(g >= 1 for g in y)
            and all(
                (y[i] == rep[i]) if (i + 1) in pinned else (y[i] >= rep[i])
                for i in range(d - 1)
            )
        ]
        if sorted(expected) != sorted(members):
            raise RuntimeError(f"cell at {rep} is not a box: pinned={sorted(pinned)}")
        groups.append((pinned, rep, members))

    ordered = _order_cells(groups, d)

    eff_cap = d if capacity in (None, float("inf")) else min(int(capacity), d)
    if eff_cap >= d:
        for i, (f, rep, _) in enumerate(ordered[: d - 1], start=1):
            want = tuple(0 if j == i else (2 if j == i + 1 else 1) for j in range(1, d))
            if rep != want:
                raise RuntimeError(f"principal cell {i} has representative {rep}, expected {want}")

    cells = tuple(
        BoundaryCell(idx + 1, f, rep) for idx, (f, rep, _) in enumerate(ordered)
    )
    lookup = {}
    for idx, (_, _, members) in enumerate(ordered):
        for w in members:
            lookup[w] = idx
    return BoundaryPartition(d, capacity, len(cells), cells, clamp, lookup)


def pushtasep_partition(d: int) -> BoundaryPartition:
    """PushTASEP jump-chain cells: one per nonempty zero-coordinate set.

    Kernel homogeneity depends only on which gaps vanish, so the clamp
    radius is 1 and there are 2^{d-1} - 1 cells.
    """
    if d < 2:
        raise DimensionError("need d >= 2")
    groups = []
    for w in itertools.product((0, 1), repeat=d - 1):
        if all(g >= 1 for g in w):
            continue
        zero_set = frozenset(i + 1 for i in range(d - 1) if w[i] == 0)
        groups.append((zero_set, w, [w]))
    ordered = _order_cells(groups, d)
    cells = tuple(BoundaryCell(idx + 1, f, rep) for idx, (f, rep, _) in enumerate(ordered))
    lookup = {}
    for idx, (_, _, members) in enumerate(ordered):
        for w in members:
            lookup[w] = idx
    return BoundaryPartition(d, None, len(cells), cells, 1, lookup)


def pushtasep_push_gaps(w: tuple[int, ...], i: int) -> tuple[int, ...]:
    """Gap effect of particle i (1-based) jumping: the gap before i grows by
    one and the first positive gap at-or-after i shrinks by one."""
    w = list(w)
    dm1 = len(w)
    j = i - 1
    while j < dm1 and w[j] == 0:
        j += 1
    if i >= 2:
        w[i - 2] += 1
    if j < dm1:
        w[j] -= 1
    return tuple(w)


def pushtasep_bulk_increment(i: int, d: int) -> np.ndarray:
    """Jump-chain free increment e_{i-1} - e_i (e_0 and e_d read as 0)."""
    v = np.zeros(d - 1, dtype=np.int64)
    if i >= 2:
        v[i - 2] += 1
    if i <= d - 1:
        v[i - 1] -= 1
    return v


def pushtasep_reflection_columns(partition: BoundaryPartition) -> list[tuple[Fraction, ...]]:
    """Mean jump-chain correction on each cell, by enumerating the d
    equally likely particle choices at the cell representative."""
    d = partition.d
    cols = []
    for cell in partition.cells:
        total = [Fraction(0)] * (d - 1)
        for i in range(1, d + 1):
            actual = np.array(pushtasep_push_gaps(cell.representative, i)) - np.array(
                cell.representative
            )
            corr = actual - pushtasep_bulk_increment(i, d)
            for r in range(d - 1):
                total[r] += Fraction(int(corr[r]), d)
        cols.append(tuple(total))
    return cols


@dataclass
class SkorokhodTrace:
    """Aligned per-step records realizing W = X + R Y + alpha exactly.

    W, X are (n+1, d-1) integer arrays; Y is (n+1, k) with Y[t] counting
    boundary visits strictly before t; alpha[t] is a tuple of Fractions.
    cell_index[t] is the 0-based cell of W[t] (-1 when interior).
    """

    W: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    alpha: list[tuple[Fraction, ...]]
    cell_index: np.ndarray
    R: list[tuple[Fraction, ...]]

    @property
    def steps(self) -> int:
        return self.W.shape[0] - 1

    def validate(self) -> None:
        """Exact identity and pushing-process checks at every step."""
        n = self.steps
        k = len(self.R)
        dm1 = self.W.shape[1]
        for t in range(n + 1):
            ry = [Fraction(0)] * dm1
            for j in range(k):
                yj = int(self.Y[t, j])
                if yj:
                    for r in range(dm1):
                        ry[r] += self.R[j][r] * yj
            for r in range(dm1):
                if Fraction(int(self.W[t, r])) != int(self.X[t, r]) + ry[r] + self.alpha[t][r]:
                    raise AssertionError(f"decomposition identity fails at t={t}, coord {r}")
        dY = np.diff(self.Y, axis=0)
        if dY.min() < 0 or dY.max() > 1:
            raise AssertionError("Y increments must lie in {0, 1}")
        if (dY.sum(axis=1) > 1).any():
            raise AssertionError("at most one cell may be active per step")
        active = dY.sum(axis=1)
        boundary = self.cell_index[:-1] >= 0
        if not (active == boundary.astype(dY.dtype)).all():
            raise AssertionError("Y must tick exactly on boundary steps")
        for t in range(n):
            if self.cell_index[t] < 0 and any(
                a != b for a, b in zip(self.alpha[t + 1], self.alpha[t])
            ):
                raise AssertionError(f"alpha moved on interior step t={t}")


def decompose_trajectory(
    W_traj: np.ndarray,
    coins: np.ndarray,
    partition: BoundaryPartition,
    R: list[tuple[Fraction, ...]],
) -> SkorokhodTrace:
    """Exact overdetermined Skorokhod decomposition of a recorded gap path.

    X accumulates the bulk increments of the recorded coins (X_0 = W_0), Y^j
    counts visits to cell j, and alpha = W - X - R Y is accumulated in exact
    rationals (it only moves on boundary steps).
    """
    W_traj = np.asarray(W_traj, dtype=np.int64)
    coins = np.asarray(coins, dtype=np.int64)
    n = coins.shape[0]
    dm1 = W_traj.shape[1]
    if W_traj.shape[0] != n + 1:
        raise DimensionError("trajectory must have one more row than the coin block")
    if len(R) != partition.k or any(len(col) != dm1 for col in R):
        raise DimensionError("reflection matrix shape does not match the partition")

    X = np.empty_like(W_traj)
    X[0] = W_traj[0]
    X[1:] = W_traj[0] + np.cumsum(coins[:, 1:] - coins[:, :-1], axis=0)

    cell_index = np.empty(n + 1, dtype=np.int64)
    for t in range(n + 1):
        cell_index[t] = partition.cell_index_of(W_traj[t])

    Y = np.zeros((n + 1, partition.k), dtype=np.int64)
    visits = np.zeros(partition.k, dtype=np.int64)
    alpha: list[tuple[Fraction, ...]] = [tuple(Fraction(0) for _ in range(dm1))]
    a = list(alpha[0])
    for t in range(n):
        j = cell_index[t]
        if j >= 0:
            visits[j] += 1
            da = W_traj[t + 1] - W_traj[t] - (X[t + 1] - X[t])
            for r in range(dm1):
                a[r] += int(da[r]) - R[j][r]
        Y[t + 1] = visits
        alpha.append(tuple(a))
    return SkorokhodTrace(W_traj, X, Y, alpha, cell_index, list(R))


def pushtasep_jump_decomposition(
    W_traj: np.ndarray,
    kappa: np.ndarray,
    partition: BoundaryPartition | None = None,
    R: list[tuple[Fraction, ...]] | None = None,
) -> SkorokhodTrace:
    """Skorokhod decomposition of a PushTASEP jump chain (kappa 1-based)."""
    W_traj = np.asarray(W_traj, dtype=np.int64)
    kappa = np.asarray(kappa, dtype=np.int64)
    d = W_traj.shape[1] + 1
    if partition is None:
        partition = pushtasep_partition(d)
    if R is None:
        R = pushtasep_reflection_columns(partition)
    n = kappa.shape[0]
    if W_traj.shape[0] != n + 1:
        raise DimensionError("trajectory must have one more row than the jump list")

    X = np.empty_like(W_traj)
    X[0] = W_traj[0]
    for t in range(n):
        X[t + 1] = X[t] + pushtasep_bulk_increment(int(kappa[t]), d)

    cell_index = np.empty(n + 1, dtype=np.int64)
    for t in range(n + 1):
        cell_index[t] = partition.cell_index_of(W_traj[t])

    Y = np.zeros((n + 1, partition.k), dtype=np.int64)
    visits = np.zeros(partition.k, dtype=np.int64)
    alpha: list[tuple[Fraction, ...]] = [tuple(Fraction(0) for _ in range(d - 1))]
    a = list(alpha[0])
    for t in range(n):
        j = cell_index[t]
        if j >= 0:
            visits[j] += 1
            da = W_traj[t + 1] - W_traj[t] - (X[t + 1] - X[t])
            for r in range(d - 1):
                a[r] += int(da[r]) - R[j][r]
        Y[t + 1] = visits
        alpha.append(tuple(a))
    return SkorokhodTrace(W_traj, X, Y, alpha, cell_index, list(R))


def boundary_local_time(W_traj: np.ndarray) -> int:
    """Number of recorded times at which some gap is zero (t = 0 included)."""
    W_traj = np.asarray(W_traj)
    if W_traj.ndim == 1:
        W_traj = W_traj[:, None]
    return int((W_traj.min(axis=1) == 0).sum())
