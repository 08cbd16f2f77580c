"""Compiled and pure-Python kernels must agree bit for bit."""

import numpy as np
import pytest

from boxball import _core_py, kernels
from boxball.bbs import BallConfig, DynamicsParams, carrier_sweep

compiled = pytest.importorskip("boxball._core", reason="compiled extension not built")


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("cap", [1, 2, 4, 8])
def test_backends_agree_on_sbbs(d, cap):
    gen = np.random.Generator(np.random.Philox(key=(99, d * 10 + cap)))
    w0 = gen.integers(0, 5, size=d - 1).astype(np.int64)
    coins = (gen.random((300, d)) < 0.5).astype(np.uint8)
    eff = min(cap, d)
    Wc, zc = compiled.gap_trajectory(w0, coins, eff)
    Wp, zp = _core_py.gap_trajectory(w0, coins, eff)
    assert np.array_equal(Wc, Wp)
    assert np.array_equal(zc, zp)


@pytest.mark.parametrize("d", [2, 3, 6])
def test_backends_agree_on_pushtasep(d):
    gen = np.random.Generator(np.random.Philox(key=(4, d)))
    w0 = gen.integers(0, 4, size=d - 1).astype(np.int64)
    kappa = gen.integers(0, d, size=500).astype(np.int64)
    Wc, xc = compiled.pushtasep_gap_trajectory(w0, kappa)
    Wp, xp = _core_py.pushtasep_gap_trajectory(w0, kappa)
    assert np.array_equal(Wc, Wp)
    assert np.array_equal(xc, xp)


@pytest.mark.parametrize("cap", [1, 2, None])
def test_kernel_matches_reference_sweep(cap):
    d = 5
    params = DynamicsParams(0.5, cap if cap else float("inf"), d)
    gen = np.random.Generator(np.random.Philox(key=(21, d)))
    gaps = gen.integers(0, 4, size=d - 1)
    cfg = BallConfig.from_gaps(gaps.tolist())
    coins = (gen.random((200, d)) < 0.5).astype(np.uint8)
    W, z1 = kernels.gap_trajectory(np.asarray(gaps, dtype=np.int64), coins, params.effective_capacity())
    cur = cfg
    for t in range(200):
        cur, _ = carrier_sweep(cur, params, coins[t])
        assert cur.gaps() == tuple(W[t + 1])
        assert cur.positions[0] - cfg.positions[0] == z1[t + 1]


def test_backend_reports_name():
    assert kernels.backend() in ("compiled", "python")
