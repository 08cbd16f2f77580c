"""PushTASEP moves, Poisson time change, and the epsilon -> 1 comparison."""

import math

import numpy as np
import pytest

from boxball.bbs import UNBOUNDED, DynamicsParams
from boxball.pushtasep import (
    DegenerateSampleError,
    PushTasepState,
    jump_chain_draws,
    push_move,
    pushtasep_trajectory,
    sbbs_as_pushtasep_check,
)
from boxball.rng import RngStream


def test_push_move_examples():
    assert push_move(PushTasepState((0, 1, 2)), 1).positions == (1, 2, 3)
    assert push_move(PushTasepState((0, 5)), 1).positions == (1, 5)
    # cascade stops at the first empty site: 1 -> pushes the ball at 1, the
    # ball at 3 is out of reach
    state = push_move(PushTasepState((0, 1, 3)), 1)
    assert state.positions == (1, 2, 3)
    assert state.gaps() == (0, 0)
    with pytest.raises(ValueError):
        push_move(PushTasepState((0, 1)), 3)


def test_push_move_preserves_order_and_count():
    gen = RngStream(404).generator()
    for _ in range(200):
        d = int(gen.integers(1, 8))
        pos = np.cumsum(gen.integers(1, 4, size=d)) - 1
        state = PushTasepState(tuple(int(x) for x in pos))
        out = push_move(state, int(gen.integers(1, d + 1)))
        assert out.d == d
        assert all(a < b for a, b in zip(out.positions, out.positions[1:]))


def test_zero_horizon_no_events():
    events, states = pushtasep_trajectory(PushTasepState((0, 3)), 0.0, RngStream(1))
    assert events == [] and len(states) == 1


def test_event_times_increase_and_rate():
    d, horizon, trials = 3, 200.0, 200
    counts = []
    for t in range(trials):
        events, _ = pushtasep_trajectory(PushTasepState((0, 5, 10)), horizon, RngStream(2, t))
        times = [e.time for e in events]
        assert all(a < b for a, b in zip(times, times[1:]))
        counts.append(len(events))
    mean, var = np.mean(counts), np.var(counts, ddof=1)
    se_mean = math.sqrt(d * horizon / trials)
    assert abs(mean - d * horizon) < 3 * se_mean
    # Poisson variance: SE of the sample variance ~ sqrt(2/trials)*var
    assert abs(var - d * horizon) < 3 * math.sqrt(2.0 / trials) * d * horizon + 3 * se_mean


def test_uniform_particle_choice():
    d = 3
    m, kappa = jump_chain_draws(d, 40_000, RngStream(7).generator())
    assert m > 10**5 * 0.9
    for i in range(d):
        freq = (kappa == i).mean()
        assert abs(freq - 1 / 3) < 3 * math.sqrt((1 / 3) * (2 / 3) / m)


def test_single_particle_displacement():
    horizon, trials = 10_000.0, 100
    finals = []
    for t in range(trials):
        events, states = pushtasep_trajectory(PushTasepState((0,)), horizon, RngStream(3, t))
        finals.append(states[-1].positions[0])
    assert abs(np.mean(finals) - horizon) < 3 * math.sqrt(horizon / trials)


def test_event_api_matches_jump_kernel():
    """The event-driven simulator and the compiled jump-chain kernel must
    produce the same gap sequence for the same particle choices."""
    import numpy as np

    from boxball import kernels

    init = PushTasepState((0, 1, 5, 6))
    events, states = pushtasep_trajectory(init, 50.0, RngStream(55))
    kappa = np.array([e.particle - 1 for e in events], dtype=np.int64)
    W, x1 = kernels.pushtasep_gap_trajectory(np.asarray(init.gaps(), dtype=np.int64), kappa)
    assert [tuple(w) for w in W] == [s.gaps() for s in states]
    assert [int(x) for x in x1] == [s.positions[0] - init.positions[0] for s in states]


def test_check_requires_samples():
    params = DynamicsParams(0.99, UNBOUNDED, 2)
    with pytest.raises(DegenerateSampleError):
        sbbs_as_pushtasep_check(params, 10.0, 50, RngStream(0))


def test_sbbs_converges_to_pushtasep():
    params = DynamicsParams(0.99, UNBOUNDED, 2)
    report = sbbs_as_pushtasep_check(params, 50.0, 3000, RngStream(11))
    assert report.max_ks <= 0.05
    # closer to 1: the distance does not grow beyond sampling noise
    params_hi = DynamicsParams(0.999, UNBOUNDED, 2)
    report_hi = sbbs_as_pushtasep_check(params_hi, 50.0, 3000, RngStream(11))
    assert report_hi.max_ks <= report.max_ks + 0.015


def test_d1_binomial_vs_poisson():
    params = DynamicsParams(0.99, UNBOUNDED, 1)
    report = sbbs_as_pushtasep_check(params, 50.0, 2000, RngStream(21))
    assert report.max_ks <= 0.05
