"""Kolmogorov-Smirnov statistics and small estimation helpers."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

#: Asymptotic KS critical coefficients c(alpha).
KS_COEFF = {0.10: 1.224, 0.05: 1.358, 0.01: 1.628}

MIN_KS_SAMPLE = 50


class SampleSizeError(ValueError):
    pass


def ks_one_sample(sample: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F_hat - F| against a reference CDF."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return float(max(upper, lower))


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """sup |F_hat_a - F_hat_b| over the pooled sample."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / a.size
    fb = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(alpha: float, n: int, m: int | None = None) -> float:
    """Critical value c(alpha)/sqrt(n), or c(alpha)*sqrt((m+n)/(mn)) for two samples."""
    coeff = KS_COEFF[alpha]
    if m is None:
        return coeff / math.sqrt(n)
    return coeff * math.sqrt((n + m) / (n * m))


def ks_statistic(
    sample: Sequence[float],
    reference: Callable[[np.ndarray], np.ndarray] | Sequence[float],
    alpha: float = 0.01,
) -> tuple[float, float]:
    """(D, threshold at level alpha); reference is a CDF or a second sample."""
    sample = np.asarray(sample, dtype=float)
    if sample.size < MIN_KS_SAMPLE:
        raise SampleSizeError(f"need at least {MIN_KS_SAMPLE} points, got {sample.size}")
    if callable(reference):
        return ks_one_sample(sample, reference), ks_threshold(alpha, sample.size)
    other = np.asarray(reference, dtype=float)
    if other.size < MIN_KS_SAMPLE:
        raise SampleSizeError(f"need at least {MIN_KS_SAMPLE} points, got {other.size}")
    return ks_two_sample(sample, other), ks_threshold(alpha, sample.size, other.size)


def half_normal_cdf(sigma: float) -> Callable[[np.ndarray], np.ndarray]:
    """CDF of |N(0, sigma^2)|."""
    erf = np.vectorize(math.erf)

    def cdf(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 0.0, erf(np.maximum(x, 0.0) / (sigma * math.sqrt(2))))

    return cdf


def mean_se(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and its standard error (ddof=1)."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return float(v.mean()), float("nan")
    return float(v.mean()), float(v.std(ddof=1) / math.sqrt(v.size))


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    lx = lx - lx.mean()
    return float((lx * (ly - ly.mean())).sum() / (lx * lx).sum())
