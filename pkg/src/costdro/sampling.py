"""GBM parameter estimation and seeded Monte Carlo compound-return samples."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ambiguity import SampleSet, SupportBox
from .market_data import MarketDataError, PriceSeries

JITTER = 1e-10


@dataclass(frozen=True)
class GbmParams:
    """Daily log-return drift and covariance estimated from a trailing window."""

    drift: np.ndarray
    covariance: np.ndarray
    window: int
    jittered: bool = False

    def __post_init__(self):
        drift = np.atleast_1d(np.asarray(self.drift, dtype=float))
        cov = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if cov.shape != (drift.size, drift.size):
            raise ValueError("covariance shape does not match drift")
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=0):
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "drift", drift)
        object.__setattr__(self, "covariance", cov)

    @property
    def dimension(self) -> int:
        return self.drift.size

    def to_json(self) -> str:
        return json.dumps(
            {
                "drift": [repr(float(x)) for x in self.drift],
                "covariance": [[repr(float(x)) for x in row] for row in self.covariance],
                "window": self.window,
                "jittered": self.jittered,
            }
        )


def estimate_gbm(window: PriceSeries) -> GbmParams:
    """Mean and unbiased covariance of daily log returns over ``window``.

    A 1e-10 ridge is added when the smallest eigenvalue falls below 1e-10.
    """
    if window.n_days < 3:
        raise MarketDataError("GBM estimation needs a window of at least 3 price rows")
    logr = np.diff(np.log(window.prices), axis=0)
    drift = logr.mean(axis=0)
    cov = np.atleast_2d(np.cov(logr, rowvar=False, ddof=1))
    cov = 0.5 * (cov + cov.T)
    jittered = False
    if np.linalg.eigvalsh(cov).min() < JITTER:
        cov = cov + JITTER * np.eye(cov.shape[0])
        jittered = True
    return GbmParams(drift, cov, window.n_days, jittered)


def _factor(cov: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix (negative round-off eigenvalues set to zero)."""
    vals, vecs = np.linalg.eigh(cov)
    return (vecs * np.sqrt(np.maximum(vals, 0.0))) @ vecs.T


def simulate_samples(
    params: GbmParams,
    n: int,
    N: int = 1000,
    seed=0,
    box: SupportBox | None = None,
    correlated: bool = True,
) -> SampleSet:
    """N seeded draws of the n-day compound return exp(sum of daily log returns) - 1.

    Path j draws from its own PCG64 stream spawned from ``seed``, so a path's
    values do not depend on how many other paths are generated. Set
    ``correlated=False`` to drop the off-diagonal covariance. When ``box`` is
    given the output is clipped to it and the clip count recorded.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if n < 1:
        raise ValueError("n must be a positive integer")
    cov = params.covariance if correlated else np.diag(np.diag(params.covariance))
    root = _factor(cov)
    m = params.dimension
    children = np.random.SeedSequence(seed).spawn(N)
    out = np.empty((N, m))
    for j, child in enumerate(children):
        g = np.random.Generator(np.random.PCG64(child)).standard_normal((n, m))
        out[j] = (params.drift * n + (g @ root).sum(axis=0)) if np.any(root) else params.drift * n
    samples = np.expm1(out)
    result = SampleSet(samples)
    if box is not None:
        result = result.clip_to(box)
    return result
