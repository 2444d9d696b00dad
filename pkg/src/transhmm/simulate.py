"""Synthetic data generators for translation HMMs.

Two generators: the cosine chain (Z_k a Gaussian random walk observed through
cos, plus Gaussian noise) and a generic finite-support HMM used as a test
fixture. Both are fully deterministic given their seed; every random stream
is keyed separately so components can be redrawn in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng

__all__ = [
    "CosineModelConfig",
    "TimeSeries",
    "FiniteHmmTruth",
    "simulate_cosine",
    "simulate_finite_hmm",
]


@dataclass(frozen=True)
class CosineModelConfig:
    """Parameters of the cosine translation HMM.

    Z_0 ~ Uniform(0, 2*pi); Z_k = Z_{k-1} + sigma_x * eta_k;
    X_k = cos(Z_k); Y_k = X_k + sigma_y * eps_k.
    """

    sigma_x: float
    sigma_y: float
    n: int
    seed: int

    def __post_init__(self):
        if self.sigma_x < 0 or self.sigma_y < 0:
            raise ValueError("sigma_x and sigma_y must be nonnegative")
        if self.n < 2:
            raise ValueError(f"series length must be >= 2, got {self.n}")


@dataclass(eq=False)
class TimeSeries:
    """Observed sequence y, optionally paired with the latent truth x."""

    y: np.ndarray
    x: np.ndarray | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.y.ndim != 1:
            raise ValueError("y must be one-dimensional")
        if self.x is not None:
            self.x = np.asarray(self.x, dtype=np.float64)
            if self.x.shape != self.y.shape:
                raise ValueError(
                    f"x and y lengths differ: {self.x.shape} vs {self.y.shape}"
                )

    @property
    def n(self) -> int:
        return self.y.shape[0]


@dataclass(eq=False)
class FiniteHmmTruth:
    """Ground truth of a finite-support hidden chain: (support, Q, initial)."""

    support: np.ndarray
    transition: np.ndarray
    initial: np.ndarray

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.float64)
        self.transition = np.asarray(self.transition, dtype=np.float64)
        self.initial = np.asarray(self.initial, dtype=np.float64)
        r = self.support.shape[0]
        if len(np.unique(self.support)) != r:
            raise ValueError("support points must be distinct")
        if self.transition.shape != (r, r):
            raise ValueError("transition must be r x r")
        if np.any(self.transition < 0) or np.any(self.initial < 0):
            raise ValueError("probabilities must be nonnegative")
        rows = self.transition.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise ValueError("transition rows must sum to 1 within 1e-12")
        if abs(self.initial.sum() - 1.0) > 1e-12:
            raise ValueError("initial must sum to 1 within 1e-12")

    @property
    def r(self) -> int:
        return self.support.shape[0]


def simulate_cosine(cfg: CosineModelConfig) -> TimeSeries:
    """Sample the cosine model; the latent x is stored alongside y."""
    z0 = 2.0 * np.pi * rng.uniform_open(rng.philox(cfg.seed, rng.STREAM_Z0))
    z = np.empty(cfg.n)
    z[0] = z0
    if cfg.n > 1:
        eta = rng.standard_normal(rng.philox(cfg.seed, rng.STREAM_ETA), cfg.n - 1)
        z[1:] = z0 + cfg.sigma_x * np.cumsum(eta)
    x = np.cos(z)
    eps = rng.standard_normal(rng.philox(cfg.seed, rng.STREAM_NOISE), cfg.n)
    y = x + cfg.sigma_y * eps
    return TimeSeries(y=y, x=x)


def simulate_finite_hmm(
    truth: FiniteHmmTruth, noise_sigma: float, n: int, seed: int
) -> TimeSeries:
    """Sample a finite-support translation HMM with Gaussian noise."""
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    if n < 1:
        raise ValueError("n must be positive")
    u = rng.uniform_open(rng.philox(seed, rng.STREAM_STATES), n)
    cum_init = np.cumsum(truth.initial)
    cum_rows = np.cumsum(truth.transition, axis=1)
    states = np.empty(n, dtype=np.int64)
    states[0] = np.searchsorted(cum_init, u[0], side="left")
    for k in range(1, n):
        states[k] = np.searchsorted(cum_rows[states[k - 1]], u[k], side="left")
    x = truth.support[states]
    y = x.copy()
    if noise_sigma > 0:
        eps = rng.standard_normal(rng.philox(seed, rng.STREAM_NOISE), n)
        y = x + noise_sigma * eps
    return TimeSeries(y=y, x=x)
