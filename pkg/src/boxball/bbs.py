"""Stochastic box-ball dynamics: coin flips, carrier sweep, trajectories.

State is an ordered tuple of ball positions (sites are nonnegative
integers, finitely many balls).  One update sweeps a carrier of capacity
``c`` from site 0 rightward: each occupied site is picked up with
probability 1-epsilon (skipped outright if the carrier is full), and the
carrier drops a ball onto every empty site it passes while loaded.

Coin convention, used everywhere in this package: ``eta[i] == 1`` means
the pickup attempt at the i-th ball (left to right) *succeeds*, which
happens with probability 1-epsilon.  Coins index balls, not sites; empty
sites consume no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .rng import RngStream

#: Distinguished carrier capacity meaning "no load limit"; compares as +infinity.
UNBOUNDED = float("inf")


def _is_unbounded(capacity) -> bool:
    return capacity == UNBOUNDED or capacity is None


@dataclass(frozen=True)
class DynamicsParams:
    """Model parameters: failure probability, carrier capacity, ball count."""

    epsilon: float | Fraction
    capacity: int | float = UNBOUNDED
    d: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not _is_unbounded(self.capacity):
            if int(self.capacity) != self.capacity or self.capacity < 1:
                raise ValueError(f"capacity must be a positive integer or UNBOUNDED, got {self.capacity}")
        if self.d < 1:
            raise ValueError("ball count d must be >= 1")

    @property
    def eps_exact(self) -> Fraction:
        """Epsilon as an exact rational (floats convert to their exact binary value)."""
        return self.epsilon if isinstance(self.epsilon, Fraction) else Fraction(self.epsilon)

    @property
    def eps_float(self) -> float:
        return float(self.epsilon)

    @property
    def unbounded(self) -> bool:
        return _is_unbounded(self.capacity)

    def effective_capacity(self) -> int:
        """Capacity clamped to d.

        The carrier can never hold more than d balls, so any c >= d acts
        exactly like an unbounded carrier; kernels take this integer.
        """
        return self.d if self.unbounded else min(int(self.capacity), self.d)

    def capacity_label(self) -> str:
        return "inf" if self.unbounded else str(int(self.capacity))


@dataclass(frozen=True)
class BallConfig:
    """Strictly increasing ball positions on the nonnegative sites."""

    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        p = self.positions
        if len(p) < 1:
            raise ValueError("need at least one ball")
        if p[0] < 0:
            raise ValueError("sites are nonnegative")
        if any(a >= b for a, b in zip(p, p[1:])):
            raise ValueError(f"positions must be strictly increasing, got {p}")

    @classmethod
    def make(cls, positions: Iterable[int]) -> "BallConfig":
        return cls(tuple(int(x) for x in positions))

    @classmethod
    def from_gaps(cls, gaps: Sequence[int], origin: int = 0) -> "BallConfig":
        """Configuration with first ball at ``origin`` and the given gap vector."""
        pos = [origin]
        for g in gaps:
            if g < 0:
                raise ValueError("gaps must be nonnegative")
            pos.append(pos[-1] + int(g) + 1)
        return cls(tuple(pos))

    @classmethod
    def adjacent_block(cls, d: int, origin: int = 0) -> "BallConfig":
        """d adjacent balls (all gaps zero)."""
        return cls(tuple(range(origin, origin + d)))

    @property
    def d(self) -> int:
        return len(self.positions)

    def gaps(self) -> tuple[int, ...]:
        return tuple(b - a - 1 for a, b in zip(self.positions, self.positions[1:]))

    def shifted(self, s: int) -> "BallConfig":
        return BallConfig(tuple(p + s for p in self.positions))


@dataclass
class CarrierTrace:
    """Carrier load profile and event log for one sweep.

    ``gamma[k]`` is the load after scanning site k-1 (``gamma[0] == 0`` is
    the initial empty carrier); one entry per scanned site.  Events are
    (site, kind) with kind in {"pickup", "fail", "skip_full", "drop"}.
    """

    gamma: list[int] = field(default_factory=lambda: [0])
    events: list[tuple[int, str]] = field(default_factory=list)

    def record(self, site: int, kind: str, load: int) -> None:
        self.events.append((site, kind))
        self.gamma.append(load)


def draw_coins(params: DynamicsParams, rng: RngStream | np.random.Generator) -> np.ndarray:
    """One step's coin vector: bit i is 1 (success) with probability 1-epsilon."""
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return (gen.random(params.d) < 1.0 - params.eps_float).astype(np.uint8)


def draw_coin_block(params: DynamicsParams, steps: int, gen: np.random.Generator) -> np.ndarray:
    """Coins for ``steps`` consecutive updates, shape (steps, d).

    eps = 1/2 draws raw bits instead of doubles; same distribution, ~20x
    cheaper on the million-step experiment paths.
    """
    d = params.d
    if params.eps_float == 0.5:
        nbits = steps * d
        raw = gen.integers(0, 256, size=(nbits + 7) // 8, dtype=np.uint8)
        return np.unpackbits(raw)[:nbits].reshape(steps, d)
    return (gen.random((steps, d)) < 1.0 - params.eps_float).astype(np.uint8)


def carrier_sweep(
    config: BallConfig, params: DynamicsParams, coins: Sequence[int]
) -> tuple[BallConfig, CarrierTrace]:
    """One carrier sweep; reference implementation with a full trace.

    coins[i] governs the attempt at the i-th occupied site encountered; a
    full carrier skips the ball regardless of its coin.  The sweep starts
    at site 0 and ends once all balls are processed and the load is back
    to zero.
    """
    if len(coins) != config.d:
        raise ValueError(f"need {config.d} coins, got {len(coins)}")
    cap = params.capacity if not params.unbounded else None
    trace = CarrierTrace()
    out: list[int] = []
    load = 0
    site = 0
    for ball, coin in zip(config.positions, coins):
        while site < ball:
            if load > 0:
                load -= 1
                out.append(site)
                trace.record(site, "drop", load)
            else:
                trace.gamma.append(load)
            site += 1
        if cap is not None and load >= cap:
            out.append(ball)
            trace.record(ball, "skip_full", load)
        elif coin:
            load += 1
            trace.record(ball, "pickup", load)
        else:
            out.append(ball)
            trace.record(ball, "fail", load)
        site = ball + 1
    while load > 0:
        load -= 1
        out.append(site)
        trace.record(site, "drop", load)
        site += 1
    return BallConfig(tuple(out)), trace


def sbbs_step(config: BallConfig, params: DynamicsParams, coins: Sequence[int]) -> BallConfig:
    """carrier_sweep without the trace."""
    return carrier_sweep(config, params, coins)[0]


def sbbs_trajectory_recorded(
    init: BallConfig,
    params: DynamicsParams,
    steps: int,
    rng: RngStream | np.random.Generator,
) -> tuple[list[BallConfig], np.ndarray]:
    """Trajectory of length steps+1 plus the (steps, d) coin array that drove it."""
    if init.d != params.d:
        raise ValueError(f"config has {init.d} balls but params.d = {params.d}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    coins = draw_coin_block(params, steps, gen)
    w0 = np.asarray(init.gaps(), dtype=np.int64)
    gaps, zeta1 = kernels.gap_trajectory(w0, coins, params.effective_capacity())
    configs = [init]
    base = init.positions[0]
    for t in range(1, steps + 1):
        pos = [base + int(zeta1[t])]
        for g in gaps[t]:
            pos.append(pos[-1] + int(g) + 1)
        configs.append(BallConfig(tuple(pos)))
    return configs, coins


def sbbs_trajectory(
    init: BallConfig,
    params: DynamicsParams,
    steps: int,
    rng: RngStream | np.random.Generator,
) -> list[BallConfig]:
    """SBBS trajectory: entry t+1 = one carrier sweep of entry t."""
    return sbbs_trajectory_recorded(init, params, steps, rng)[0]


def run_soliton_census(config: BallConfig) -> tuple[int, ...]:
    """Multiset (sorted descending) of maximal-run lengths of adjacent balls."""
    runs = []
    current = 1
    for a, b in zip(config.positions, config.positions[1:]):
        if b == a + 1:
            current += 1
        else:
            runs.append(current)
            current = 1
    runs.append(current)
    return tuple(sorted(runs, reverse=True))


def soliton_census_ts(config: BallConfig) -> tuple[int, ...]:
    """Soliton content via iterated 10-elimination (sorted descending).

    Round k pairs every occupied site with an empty site immediately to its
    right and deletes both; E_k pairs are removed in round k, and the number
    of solitons of length exactly k is E_k - E_{k+1}.  The occupancy word is
    padded with d trailing empty sites so every ball eventually pairs.  The
    result is invariant under the zero-noise, unbounded-capacity update.
    """
    last = config.positions[-1]
    seq = np.zeros(last + 1 + config.d, dtype=np.int8)
    seq[list(config.positions)] = 1
    word = seq.tolist()
    pair_counts: list[int] = []
    while any(word):
        keep = [True] * len(word)
        pairs = 0
        i = 0
        while i < len(word) - 1:
            if word[i] == 1 and word[i + 1] == 0:
                keep[i] = keep[i + 1] = False
                pairs += 1
                i += 2
            else:
                i += 1
        if pairs == 0:
            raise RuntimeError("pairing stalled; padding invariant violated")
        pair_counts.append(pairs)
        word = [w for w, k in zip(word, keep) if k]
    pair_counts.append(0)
    sizes: list[int] = []
    for k in range(len(pair_counts) - 1):
        sizes.extend([k + 1] * (pair_counts[k] - pair_counts[k + 1]))
    return tuple(sorted(sizes, reverse=True))
