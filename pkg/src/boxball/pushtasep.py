"""Continuous-time PushTASEP on d particles.

Simulation is event-driven: a single rate-d exponential clock picks jump
times and an independent uniform index picks the jumping particle, which is
equivalent to d independent rate-1 clocks.  The jumping particle moves one
site right and cascades the maximal occupied block in front of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .bbs import DynamicsParams
from .rng import RngStream
from .stats import ks_two_sample


@dataclass(frozen=True)
class PushTasepState:
    positions: tuple[int, ...]
    clock: float = 0.0

    def __post_init__(self) -> None:
        p = self.positions
        if any(a >= b for a, b in zip(p, p[1:])):
            raise ValueError("positions must be strictly increasing")
        if self.clock < 0:
            raise ValueError("clock must be nonnegative")

    @property
    def d(self) -> int:
        return len(self.positions)

    def gaps(self) -> tuple[int, ...]:
        return tuple(b - a - 1 for a, b in zip(self.positions, self.positions[1:]))


@dataclass(frozen=True)
class JumpEvent:
    time: float
    particle: int  # 1-based


def push_move(state: PushTasepState, i: int, time: float | None = None) -> PushTasepState:
    """Particle i jumps right; the occupied block ahead of it cascades."""
    if not 1 <= i <= state.d:
        raise ValueError(f"particle index must lie in 1..{state.d}")
    pos = list(state.positions)
    pos[i - 1] += 1
    for j in range(i, len(pos)):
        if pos[j] == pos[j - 1]:
            pos[j] += 1
        else:
            break
    return PushTasepState(tuple(pos), state.clock if time is None else time)


def pushtasep_trajectory(
    init: PushTasepState,
    horizon: float,
    rng: RngStream | np.random.Generator,
) -> tuple[list[JumpEvent], list[PushTasepState]]:
    """Events and states on [0, horizon]; states[k] is the state after event k."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    d = init.d
    events: list[JumpEvent] = []
    states = [init]
    t = init.clock
    while True:
        t += gen.exponential(1.0 / d)
        if t > init.clock + horizon:
            break
        i = int(gen.integers(1, d + 1))
        events.append(JumpEvent(t, i))
        states.append(push_move(states[-1], i, time=t))
    return events, states


def jump_chain_draws(
    d: int, horizon: float, gen: np.random.Generator
) -> tuple[int, np.ndarray]:
    """(number of jumps on [0, horizon], 0-based particle indices).

    The jump count is Poisson(d * horizon); indices are i.i.d. uniform.
    """
    m = int(gen.poisson(d * horizon))
    kappa = gen.integers(0, d, size=m, dtype=np.int64)
    return m, kappa


def displacements_from_gaps(W: np.ndarray, lead: np.ndarray) -> np.ndarray:
    """Per-particle displacement at the final time from the gap path and the
    leftmost particle's displacement: disp_i = lead + sum_{j<i} (W_T - W_0)[j]."""
    dw = (W[-1] - W[0]).astype(np.int64)
    out = np.empty(dw.size + 1, dtype=np.int64)
    out[0] = lead[-1]
    out[1:] = lead[-1] + np.cumsum(dw)
    return out


@dataclass
class TwoSampleReport:
    """Per-coordinate two-sample KS comparison of displacement vectors."""

    d: int
    eps: float
    horizon: float
    trials: int
    ks_by_coordinate: tuple[float, ...]
    sbbs_mean: tuple[float, ...]
    pushtasep_mean: tuple[float, ...]

    @property
    def max_ks(self) -> float:
        return max(self.ks_by_coordinate)


class DegenerateSampleError(ValueError):
    pass


def sbbs_as_pushtasep_check(
    params: DynamicsParams,
    horizon: float,
    trials: int,
    rng: RngStream,
    init_gaps: tuple[int, ...] | None = None,
) -> TwoSampleReport:
    """Compare rescaled SBBS displacements against PushTASEP at the horizon.

    SBBS is run for floor(horizon / (1-eps)) sweeps so that pickups arrive
    at unit rate per ball; both models start from the same configuration and
    the displacement vector of each trial feeds a per-coordinate KS.
    """
    if trials < 100:
        raise DegenerateSampleError("need at least 100 trials per model")
    if params.eps_float >= 1.0:
        raise ValueError("epsilon must be < 1 for the rescaling")
    d = params.d
    if init_gaps is None:
        init_gaps = tuple([5] * (d - 1))
    w0 = np.asarray(init_gaps, dtype=np.int64)
    steps = int(horizon / (1.0 - params.eps_float))
    cap = params.effective_capacity()

    sbbs = np.empty((trials, d), dtype=np.int64)
    push = np.empty((trials, d), dtype=np.int64)
    for tr in range(trials):
        gen = rng.substream(tr).generator()
        coins = (gen.random((steps, d)) < 1.0 - params.eps_float).astype(np.uint8)
        W, z1 = kernels.gap_trajectory(w0, coins, cap)
        sbbs[tr] = displacements_from_gaps(W, z1)
        gen2 = rng.substream(trials + tr).generator()
        _, kappa = jump_chain_draws(d, horizon, gen2)
        Wp, x1 = kernels.pushtasep_gap_trajectory(w0, kappa)
        push[tr] = displacements_from_gaps(Wp, x1)

    ks = tuple(ks_two_sample(sbbs[:, i], push[:, i]) for i in range(d))
    return TwoSampleReport(
        d,
        params.eps_float,
        horizon,
        trials,
        ks,
        tuple(sbbs.mean(axis=0)),
        tuple(push.mean(axis=0)),
    )
