"""Reference simulation of reflected Brownian motion on the orthant.

The Euler scheme advances the free increment and projects back onto the
orthant by solving, at every step, the linear complementarity problem

    w >= 0,  y >= 0,  w = z + R y,  w . y = 0

by enumerating active sets (m <= 4, so at most 16 candidates).  Ties are
broken by smallest cardinality, then lexicographic order, which makes paths
reproducible.  Complementarity is exact by construction: active coordinates
are assigned w = 0, inactive ones get y = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .rng import RngStream

MAX_DIM = 4
LCP_RETRY_TOL = 1e-9


class LcpError(RuntimeError):
    """No active set solved the step; surfaced, never silently patched."""


@dataclass(frozen=True)
class SrbmSpec:
    """SRBM data: dimension, drift, covariance, reflection matrix, start."""

    dimension: int
    covariance: np.ndarray
    reflection: np.ndarray
    drift: np.ndarray | None = None
    initial: np.ndarray | None = None

    def __post_init__(self) -> None:
        m = self.dimension
        if not 1 <= m <= MAX_DIM:
            raise ValueError(f"dimension must lie in 1..{MAX_DIM}")
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (m, m) or not np.allclose(cov, cov.T):
            raise ValueError("covariance must be symmetric m x m")
        if (np.diag(cov) < 0).any():
            raise ValueError("covariance diagonal must be nonnegative")
        if np.asarray(self.reflection, dtype=float).shape != (m, m):
            raise ValueError("reflection matrix must be m x m")
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "reflection", np.asarray(self.reflection, dtype=float))
        object.__setattr__(
            self,
            "drift",
            np.zeros(m) if self.drift is None else np.asarray(self.drift, dtype=float),
        )
        init = np.zeros(m) if self.initial is None else np.asarray(self.initial, dtype=float)
        if (init < 0).any():
            raise ValueError("initial point must lie in the orthant")
        object.__setattr__(self, "initial", init)

    def certify_reflection(self):
        from .reflection import srbm_reflection_certified

        return srbm_reflection_certified(self.reflection)


@dataclass
class PathSample:
    """Discretized path: states in the orthant, nondecreasing pushing parts."""

    times: np.ndarray
    states: np.ndarray
    pushing: np.ndarray
    degenerate_steps: int = 0
    bulk: np.ndarray | None = None

    def validate(self) -> None:
        if (self.states < 0).any():
            raise AssertionError("states must stay in the orthant")
        dy = np.diff(self.pushing, axis=0)
        if (dy < 0).any():
            raise AssertionError("pushing components must be nondecreasing")
        if (np.abs(self.pushing[0]) != 0).any():
            raise AssertionError("pushing must start at zero")


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Cholesky factor, falling back to an eigen square root for PSD input."""
    if not cov.any():
        return np.zeros_like(cov)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(cov)
        vals = np.clip(vals, 0.0, None)
        return vecs @ np.diag(np.sqrt(vals))


def _active_sets(m: int) -> list[tuple[int, ...]]:
    sets: list[tuple[int, ...]] = []
    for size in range(m + 1):
        sets.extend(itertools.combinations(range(m), size))
    return sets


class LcpStepper:
    """Active-set LCP solver for fixed R, reused across steps."""

    def __init__(self, reflection: np.ndarray):
        self.R = np.asarray(reflection, dtype=float)
        m = self.R.shape[0]
        self.sets = _active_sets(m)
        self.inverses: dict[tuple[int, ...], np.ndarray] = {}
        for A in self.sets:
            if A:
                sub = self.R[np.ix_(A, A)]
                try:
                    self.inverses[A] = np.linalg.inv(sub)
                except np.linalg.LinAlgError:
                    pass  # singular principal block: that active set is unusable

    def _try(self, z: np.ndarray, A: tuple[int, ...], tol: float):
        m = z.size
        if not A:
            if (z >= -tol).all():
                return np.maximum(z, 0.0) if tol else z.copy(), np.zeros(m)
            return None
        inv = self.inverses.get(A)
        if inv is None:
            return None
        ya = inv @ (-z[list(A)])
        if (ya < -tol).any():
            return None
        y = np.zeros(m)
        y[list(A)] = np.maximum(ya, 0.0) if tol else ya
        w = z + self.R @ y
        w[list(A)] = 0.0
        off = [i for i in range(m) if i not in A]
        if off and (w[off] < -tol).any():
            return None
        if off and tol:
            w[off] = np.maximum(w[off], 0.0)
        return w, y

    def solve(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
        """(w, y, number of feasible active sets) for one step."""
        feasible = 0
        first = None
        for A in self.sets:
            res = self._try(z, A, 0.0)
            if res is not None:
                feasible += 1
                if first is None:
                    first = res
        if first is not None:
            return first[0], first[1], feasible
        for A in self.sets:
            res = self._try(z, A, LCP_RETRY_TOL)
            if res is not None:
                return res[0], res[1], 1
        raise LcpError(f"no feasible active set at z = {z!r}")


def _gaussian_increments(
    cov: np.ndarray, drift: np.ndarray, dt: float, steps: int, gen: np.random.Generator
) -> np.ndarray:
    factor = _psd_factor(cov * dt)
    xi = gen.standard_normal((steps, cov.shape[0]))
    return xi @ factor.T + drift * dt


def srbm_euler(
    spec: SrbmSpec,
    horizon: float,
    dt: float,
    rng: RngStream | np.random.Generator,
) -> PathSample:
    """Euler/LCP discretization of W = X + RY on the orthant."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    m = spec.dimension
    steps = int(round(horizon / dt))
    dx = _gaussian_increments(spec.covariance, spec.drift, dt, steps, gen)
    stepper = LcpStepper(spec.reflection)

    states = np.empty((steps + 1, m))
    pushing = np.zeros((steps + 1, m))
    states[0] = spec.initial
    degenerate = 0
    w = spec.initial.copy()
    y = np.zeros(m)
    for k in range(steps):
        z = w + dx[k]
        w, dy, feas = stepper.solve(z)
        if feas > 1:
            degenerate += 1
        y = y + dy
        states[k + 1] = w
        pushing[k + 1] = y
    times = np.arange(steps + 1) * dt
    return PathSample(times, states, pushing, degenerate)


def reflected_bm_1d(
    variance: float,
    horizon: float,
    dt: float,
    rng: RngStream | np.random.Generator,
) -> PathSample:
    """1-d reflected Brownian motion via the discrete Skorokhod map.

    The map is applied stepwise: w <- z if z >= 0 else 0 with z = w + dx,
    pushing y growing by -z on reflection, so w equals the free walk minus
    its running minimum (exactly, in exact arithmetic).  The free walk is
    returned in ``bulk``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    steps = int(round(horizon / dt))
    cov = np.array([[float(variance)]])
    dx = _gaussian_increments(cov, np.zeros(1), dt, steps, gen)[:, 0]

    states = np.empty((steps + 1, 1))
    pushing = np.zeros((steps + 1, 1))
    states[0, 0] = 0.0
    w = 0.0
    y = 0.0
    for k in range(steps):
        z = w + dx[k]
        if z >= 0:
            w = z
        else:
            w = 0.0
            y = y + -z
        states[k + 1, 0] = w
        pushing[k + 1, 0] = y
    times = np.arange(steps + 1) * dt
    bulk = np.concatenate([[0.0], np.cumsum(dx)])
    return PathSample(times, states, pushing, 0, bulk=bulk)


def srbm_final_states(
    spec: SrbmSpec,
    horizon: float,
    dt: float,
    rng: RngStream,
    trials: int,
) -> np.ndarray:
    """Final-time marginals for many trials, vectorized across trials.

    Uses the same active-set order and zero-tolerance-first policy as
    srbm_euler; only the final states are kept.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    m = spec.dimension
    steps = int(round(horizon / dt))
    stepper = LcpStepper(spec.reflection)
    factor = _psd_factor(spec.covariance * dt)
    gen = rng.generator()

    w = np.tile(spec.initial, (trials, 1))
    sets = stepper.sets
    for _ in range(steps):
        z = w + gen.standard_normal((trials, m)) @ factor.T + spec.drift * dt
        done = np.zeros(trials, dtype=bool)
        out = np.empty_like(z)
        for A in sets:
            if not A:
                ok = (z >= 0).all(axis=1)
                cand = z
            else:
                inv = stepper.inverses.get(A)
                if inv is None:
                    continue
                ya = -z[:, list(A)] @ inv.T
                cand = z + ya @ spec.reflection[:, list(A)].T
                cand[:, list(A)] = 0.0
                off = [i for i in range(m) if i not in A]
                ok = (ya >= 0).all(axis=1)
                if off:
                    ok &= (cand[:, off] >= 0).all(axis=1)
            take = ok & ~done
            if take.any():
                out[take] = cand[take]
                done |= take
            if done.all():
                break
        if not done.all():
            # fall back to the tolerant scalar solver on the stragglers
            for idx in np.nonzero(~done)[0]:
                out[idx] = stepper.solve(z[idx])[0]
        w = out
    return w


def oscillation(path: PathSample | np.ndarray, t1: float, t2: float, times=None) -> float:
    """Osc(g, [t1, t2]): max over coordinates of (max - min) on the window."""
    if isinstance(path, PathSample):
        values = path.states
        grid = path.times
    else:
        values = np.asarray(path, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        grid = np.asarray(times if times is not None else np.arange(values.shape[0]), dtype=float)
    if t1 >= t2:
        raise ValueError("need t1 < t2")
    mask = (grid >= t1) & (grid <= t2)
    if not mask.any():
        raise ValueError("empty window")
    window = values[mask]
    return float((window.max(axis=0) - window.min(axis=0)).max())
