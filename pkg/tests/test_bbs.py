"""Carrier-sweep dynamics: frozen regressions, invariants, solitons."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxball import kernels
from boxball.bbs import (
    UNBOUNDED,
    BallConfig,
    DynamicsParams,
    carrier_sweep,
    draw_coin_block,
    draw_coins,
    run_soliton_census,
    sbbs_trajectory,
    sbbs_trajectory_recorded,
    soliton_census_ts,
)
from boxball.rng import RngStream

# Zero-noise, unbounded-capacity evolution of a 9-ball start; positions were
# frozen from the classical carrier update applied by hand.
ZERO_NOISE_ROWS = [
    (1, 2, 4, 6, 7, 8, 11, 13, 16),
    (3, 5, 9, 10, 12, 14, 15, 17, 18),
    (4, 6, 11, 13, 16, 19, 20, 21, 22),
    (5, 7, 12, 14, 17, 23, 24, 25, 26),
]


def positions_strategy(max_d=8, max_gap=6):
    return st.lists(st.integers(0, max_gap), min_size=1, max_size=max_d).map(
        lambda gaps: BallConfig.from_gaps(gaps[1:], origin=gaps[0])
    )


def test_zero_noise_regression():
    params = DynamicsParams(0.0, UNBOUNDED, 9)
    traj = sbbs_trajectory(BallConfig.make(ZERO_NOISE_ROWS[0]), params, 3, RngStream(0))
    assert [c.positions for c in traj] == ZERO_NOISE_ROWS


def test_full_coin_sweep_matches_reference_rows():
    params = DynamicsParams(0.0, UNBOUNDED, 9)
    cfg = BallConfig.make(ZERO_NOISE_ROWS[0])
    for row in ZERO_NOISE_ROWS[1:]:
        cfg, trace = carrier_sweep(cfg, params, [1] * 9)
        assert cfg.positions == row
        gamma = np.array(trace.gamma)
        assert gamma[0] == 0
        assert set(np.diff(gamma)) <= {-1, 0, 1}


def test_unit_capacity_block_push():
    params = DynamicsParams(0.0, 1, 2)
    out, trace = carrier_sweep(BallConfig.make([1, 2]), params, [1, 1])
    assert out.positions == (2, 3)
    assert ("skip_full" in {kind for _, kind in trace.events})


def test_all_fail_coins_freeze():
    params = DynamicsParams(1.0, 3, 4)
    cfg = BallConfig.make([0, 2, 3, 9])
    out, _ = carrier_sweep(cfg, params, [0, 0, 0, 0])
    assert out == cfg
    traj = sbbs_trajectory(cfg, params, 25, RngStream(9))
    assert all(c == cfg for c in traj)


def test_zero_steps_trajectory_is_singleton():
    params = DynamicsParams(0.3, 2, 3)
    cfg = BallConfig.make([0, 4, 5])
    assert sbbs_trajectory(cfg, params, 0, RngStream(1)) == [cfg]


def test_draw_coins_degenerate_eps():
    assert draw_coins(DynamicsParams(0.0, UNBOUNDED, 3), RngStream(5)).tolist() == [1, 1, 1]
    assert draw_coins(DynamicsParams(1.0, UNBOUNDED, 3), RngStream(5)).tolist() == [0, 0, 0]


def test_draw_coins_mean():
    params = DynamicsParams(0.5, UNBOUNDED, 1)
    coins = draw_coin_block(params, 10**6, RngStream(42).generator())
    se = 0.5 / math.sqrt(10**6)
    assert abs(coins.mean() - 0.5) < 3 * se


def test_single_ball_is_bernoulli_walk():
    n, trials, eps = 10**5, 100, 0.35
    params = DynamicsParams(eps, UNBOUNDED, 1)
    finals = []
    w0 = np.zeros(0, dtype=np.int64)
    for t in range(trials):
        coins = draw_coin_block(params, n, RngStream(7, t).generator())
        _, z1 = kernels.gap_trajectory(w0, coins, 1)
        finals.append(z1[-1])
    mean = np.mean(finals)
    assert abs(mean - (1 - eps) * n) < 3 * math.sqrt(eps * (1 - eps) * n)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(positions_strategy(), st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 3, None]))
def test_sweep_invariants(cfg, seed, cap):
    d = cfg.d
    capacity = UNBOUNDED if cap is None else cap
    params = DynamicsParams(0.5, capacity, d)
    coins = (RngStream(seed).generator().random(d) < 0.5).astype(int)
    out, trace = carrier_sweep(cfg, params, coins)
    # ball count, strict order, carrier feasibility
    assert out.d == d
    assert all(a < b for a, b in zip(out.positions, out.positions[1:]))
    gamma = np.array(trace.gamma)
    assert gamma[0] == 0 and gamma.min() >= 0
    if capacity is not UNBOUNDED:
        assert gamma.max() <= cap
    assert set(np.diff(gamma)) <= {-1, 0, 1}
    # translation equivariance with the same coins
    shifted, _ = carrier_sweep(cfg.shifted(4), params, coins)
    assert shifted.positions == tuple(p + 4 for p in out.positions)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(positions_strategy(max_d=6), st.integers(0, 2**32 - 1))
def test_capacity_at_least_d_is_unbounded(cfg, seed):
    d = cfg.d
    coins = (RngStream(seed).generator().random(d) < 0.5).astype(int)
    out_d, _ = carrier_sweep(cfg, DynamicsParams(0.5, d, d), coins)
    out_inf, _ = carrier_sweep(cfg, DynamicsParams(0.5, UNBOUNDED, d), coins)
    out_big, _ = carrier_sweep(cfg, DynamicsParams(0.5, d + 3, d), coins)
    assert out_d == out_inf == out_big


def test_trajectory_determinism_and_conservation():
    params = DynamicsParams(0.4, 2, 5)
    cfg = BallConfig.make([0, 1, 2, 5, 9])
    a = sbbs_trajectory(cfg, params, 400, RngStream(11, 3))
    b = sbbs_trajectory(cfg, params, 400, RngStream(11, 3))
    assert a == b
    assert all(c.d == 5 for c in a)
    c = sbbs_trajectory(cfg, params, 400, RngStream(11, 4))
    assert c != a


def test_recorded_coins_reproduce_trajectory():
    params = DynamicsParams(0.3, UNBOUNDED, 4)
    cfg = BallConfig.make([0, 1, 4, 6])
    traj, coins = sbbs_trajectory_recorded(cfg, params, 50, RngStream(2))
    replay = cfg
    for t in range(50):
        replay, _ = carrier_sweep(replay, params, coins[t])
        assert replay == traj[t + 1]


def test_run_census_examples():
    assert run_soliton_census(BallConfig.make([0, 1, 2, 5, 6])) == (3, 2)
    assert run_soliton_census(BallConfig.make([0, 2, 4])) == (1, 1, 1)
    assert run_soliton_census(BallConfig.make([7])) == (1,)


def test_ts_census_examples():
    assert soliton_census_ts(BallConfig.make([0, 1, 2])) == (3,)
    # 110010...: the trailing ball pairs into its own 1-soliton
    assert soliton_census_ts(BallConfig.make([0, 1, 4])) == (2, 1)
    assert soliton_census_ts(BallConfig.make([7])) == (1,)


def test_ts_census_conserved_on_reference_rows():
    census = soliton_census_ts(BallConfig.make(ZERO_NOISE_ROWS[0]))
    for row in ZERO_NOISE_ROWS[1:]:
        assert soliton_census_ts(BallConfig.make(row)) == census


def test_ts_census_invariant_under_zero_noise_step():
    gen = RngStream(123).generator()
    params_cache = {}
    for _ in range(30):
        d = int(gen.integers(1, 13))
        gaps = gen.integers(0, 5, size=d - 1)
        cfg = BallConfig.from_gaps(gaps.tolist())
        params = params_cache.setdefault(d, DynamicsParams(0.0, UNBOUNDED, d))
        census = soliton_census_ts(cfg)
        for _ in range(8):
            cfg, _ = carrier_sweep(cfg, params, [1] * d)
            assert soliton_census_ts(cfg) == census


def test_validation_errors():
    with pytest.raises(ValueError):
        BallConfig.make([3, 3])
    with pytest.raises(ValueError):
        BallConfig.make([-1, 2])
    with pytest.raises(ValueError):
        DynamicsParams(1.5, UNBOUNDED, 2)
    with pytest.raises(ValueError):
        DynamicsParams(0.5, 0, 2)
    with pytest.raises(ValueError):
        carrier_sweep(BallConfig.make([0, 1]), DynamicsParams(0.5, 1, 2), [1])
