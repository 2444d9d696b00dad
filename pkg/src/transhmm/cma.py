"""(mu/mu_w, lambda) CMA-ES and the softmax simplex reparameterization.

Standard published defaults: lambda = 4 + floor(3 ln m), mu = lambda // 2,
log-linear recombination weights, cumulative step-size adaptation, rank-1
plus rank-mu covariance updates. Deterministic given the config seed; the
full offspring block is drawn every generation so the random stream does not
depend on budget truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .charfn import GridDensity2D

__all__ = ["CmaConfig", "CmaResult", "OptimizerFailure", "minimize", "simplex_reparam"]

_EIG_FLOOR = 1e-14


class OptimizerFailure(RuntimeError):
    """Objective raised during optimization; carries the offending point."""

    def __init__(self, point: np.ndarray, message: str = "objective evaluation failed"):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class CmaConfig:
    dim: int
    max_evaluations: int
    seed: int
    population: int | None = None
    parents: int | None = None
    sigma0: float = 0.5
    target_value: float | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        lam = self.lam
        mu = self.mu
        if lam < 1 or mu < 1:
            raise ValueError("population and parents must be positive")
        if mu > lam:
            raise ValueError(f"parents ({mu}) must not exceed population ({lam})")
        if self.max_evaluations < lam:
            raise ValueError("max_evaluations must be at least one population")
        if self.sigma0 <= 0:
            raise ValueError("sigma0 must be positive")

    @property
    def lam(self) -> int:
        if self.population is not None:
            return self.population
        return 4 + int(3 * math.log(self.dim))

    @property
    def mu(self) -> int:
        if self.parents is not None:
            return self.parents
        return self.lam // 2


@dataclass(eq=False)
class CmaResult:
    best_point: np.ndarray
    best_value: float
    trace: list[tuple[int, int, float]]
    evaluations: int


def minimize(objective, cfg: CmaConfig) -> CmaResult:
    """Minimize a black-box objective on R^dim within an evaluation budget.

    Returns the best point ever evaluated, its value, and a per-generation
    trace of (generation, evaluations, best value so far).
    """
    m = cfg.dim
    lam = cfg.lam
    mu = cfg.mu

    raw = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = 1.0 / float(weights @ weights)

    c_sigma = (mu_eff + 2.0) / (m + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (m + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_eff / m) / (m + 4.0 + 2.0 * mu_eff / m)
    c_1 = 2.0 / ((m + 1.3) ** 2 + mu_eff)
    c_mu = min(
        1.0 - c_1,
        2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((m + 2.0) ** 2 + mu_eff),
    )
    chi_n = math.sqrt(m) * (1.0 - 1.0 / (4.0 * m) + 1.0 / (21.0 * m * m))

    gen_rng = rng.philox(cfg.seed, rng.STREAM_CMA)
    mean = np.asarray(rng.standard_normal(gen_rng, m), dtype=np.float64)
    sigma = cfg.sigma0
    cov = np.eye(m)
    p_sigma = np.zeros(m)
    p_c = np.zeros(m)

    best_point = mean.copy()
    best_value = math.inf
    evals = 0
    generation = 0
    trace: list[tuple[int, int, float]] = []

    def evaluate(x: np.ndarray) -> float:
        try:
            return float(objective(x))
        except Exception as exc:
            raise OptimizerFailure(x.copy()) from exc

    while evals < cfg.max_evaluations:
        generation += 1
        vals_eig, basis = np.linalg.eigh(cov)
        vals_eig = np.maximum(vals_eig, _EIG_FLOOR)
        scale = np.sqrt(vals_eig)
        inv_sqrt = (basis / scale[None, :]) @ basis.T

        z = rng.standard_normal(gen_rng, (lam, m))
        y = z @ (basis * scale[None, :]).T
        x = mean[None, :] + sigma * y

        k = min(lam, cfg.max_evaluations - evals)
        values = np.empty(k)
        for i in range(k):
            values[i] = evaluate(x[i])
            evals += 1
            if values[i] < best_value:
                best_value = values[i]
                best_point = x[i].copy()
        if k < lam:
            trace.append((generation, evals, best_value))
            break

        order = np.argsort(values, kind="stable")[:mu]
        y_sel = y[order]
        y_w = weights @ y_sel
        mean = mean + sigma * y_w

        p_sigma = (1.0 - c_sigma) * p_sigma + math.sqrt(
            c_sigma * (2.0 - c_sigma) * mu_eff
        ) * (inv_sqrt @ y_w)
        ps_norm = float(np.linalg.norm(p_sigma))
        denom = math.sqrt(1.0 - (1.0 - c_sigma) ** (2.0 * generation))
        h_sigma = 1.0 if ps_norm / denom < (1.4 + 2.0 / (m + 1.0)) * chi_n else 0.0
        p_c = (1.0 - c_c) * p_c + h_sigma * math.sqrt(
            c_c * (2.0 - c_c) * mu_eff
        ) * y_w

        rank_mu = (y_sel * weights[:, None]).T @ y_sel
        cov = (
            (1.0 - c_1 - c_mu) * cov
            + c_1 * (np.outer(p_c, p_c) + (1.0 - h_sigma) * c_c * (2.0 - c_c) * cov)
            + c_mu * rank_mu
        )
        cov = 0.5 * (cov + cov.T)
        sigma = sigma * math.exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0))

        trace.append((generation, evals, best_value))
        if cfg.target_value is not None and best_value <= cfg.target_value:
            break

    return CmaResult(
        best_point=best_point,
        best_value=float(best_value),
        trace=trace,
        evaluations=evals,
    )


def simplex_reparam(theta: np.ndarray) -> GridDensity2D:
    """Softmax map from R^(r^2) onto the r x r probability simplex."""
    theta = np.asarray(theta, dtype=np.float64).ravel()
    r = math.isqrt(theta.shape[0])
    if r * r != theta.shape[0]:
        raise ValueError(f"theta length {theta.shape[0]} is not a perfect square")
    w = np.exp(theta - theta.max())
    p = w / w.sum()
    return GridDensity2D(r=r, p=p.reshape(r, r))
