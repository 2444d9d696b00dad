"""Least-squares estimator over grid densities, and its L1 score.

fit_ls wires the pieces: draw the Monte-Carlo weight nodes once, cache the
empirical characteristic function at them, then minimize
theta -> mn_criterion(simplex_reparam(theta)) with CMA-ES. The returned
density is the better of the optimizer's best and the uniform density (the
uniform evaluation happens outside the optimizer budget), so the fitted
criterion never exceeds the uniform criterion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import cma
from .charfn import EmpCharFn, GridDensity2D, WeightNodes, mn_criterion, uniform_density
from .simulate import TimeSeries

__all__ = [
    "LsFitConfig",
    "LsFitResult",
    "fit_ls",
    "l1_score",
    "empirical_pair_frequencies",
]


@dataclass(frozen=True)
class LsFitConfig:
    r: int
    seed: int
    n_nodes: int = 5000
    sigma_w: float = 3.0
    budget: int = 75000

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("grid order r must be >= 1")
        if self.n_nodes < 1:
            raise ValueError("n_nodes must be positive")
        if self.sigma_w <= 0:
            raise ValueError("sigma_w must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")


@dataclass(eq=False)
class LsFitResult:
    density: GridDensity2D
    criterion_value: float
    trace: list[tuple[int, int, float]]
    wall_time: float

    def __eq__(self, other):
        if not isinstance(other, LsFitResult):
            return NotImplemented
        return (
            self.density == other.density
            and self.criterion_value == other.criterion_value
            and self.trace == other.trace
        )


def fit_ls(series: TimeSeries, cfg: LsFitConfig) -> LsFitResult:
    """Fit a grid density to the series by minimizing the node criterion."""
    if series.n < 2:
        raise ValueError("series must have length >= 2")
    start = time.perf_counter()
    nodes = WeightNodes.draw(cfg.seed, cfg.n_nodes, cfg.sigma_w)
    phi = EmpCharFn(series, cache=True)
    phi.node_values(nodes)

    def objective(theta: np.ndarray) -> float:
        return mn_criterion(phi, cma.simplex_reparam(theta), nodes)

    dim = cfg.r * cfg.r
    result = cma.minimize(
        objective,
        cma.CmaConfig(dim=dim, max_evaluations=cfg.budget, seed=cfg.seed),
    )
    density = cma.simplex_reparam(result.best_point)
    value = mn_criterion(phi, density, nodes)

    uniform = uniform_density(cfg.r)
    uniform_value = mn_criterion(phi, uniform, nodes)
    if uniform_value < value:
        density, value = uniform, uniform_value

    return LsFitResult(
        density=density,
        criterion_value=value,
        trace=result.trace,
        wall_time=time.perf_counter() - start,
    )


def empirical_pair_frequencies(latent: TimeSeries, r: int) -> np.ndarray:
    """Cell frequencies of consecutive latent pairs, 1/n normalization.

    Mirrors the comparison target of the L1 score verbatim: the n-1 pairs
    are counted with a 1/n factor, so the table sums to (n-1)/n.
    """
    if latent.x is None:
        raise ValueError("latent series must carry x")
    return _pair_table(latent.x, np.linspace(-1.0, 1.0, r + 1), r) / latent.n


def _pair_table(x: np.ndarray, edges: np.ndarray, r: int) -> np.ndarray:
    lo, hi = edges[0], edges[-1]
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError(f"latent values outside the grid domain [{lo}, {hi}]")
    width = (hi - lo) / r
    idx = np.minimum(((x - lo) / width).astype(np.int64), r - 1)
    table = np.zeros((r, r))
    np.add.at(table, (idx[:-1], idx[1:]), 1.0)
    return table


def l1_score(fit, latent: TimeSeries) -> float:
    """(1/r^2) sum_ij |p_hat_ij - empirical pair frequency ij|.

    ``fit`` is a GridDensity2D or a raw (r, r) cell-probability table.
    """
    if isinstance(fit, GridDensity2D):
        r = fit.r
        p_hat = fit.p
        edges = fit.edges(0)
        if fit.offset[0] != fit.offset[1]:
            raise ValueError("l1_score requires a square-domain density")
    else:
        p_hat = np.asarray(fit, dtype=np.float64)
        if p_hat.ndim != 2 or p_hat.shape[0] != p_hat.shape[1]:
            raise ValueError("fit table must be square")
        r = p_hat.shape[0]
        edges = np.linspace(-1.0, 1.0, r + 1)
    if latent.x is None:
        raise ValueError("latent series must carry x")
    emp = _pair_table(latent.x, edges, r) / latent.n
    return float(np.abs(p_hat - emp).sum() / (r * r))
