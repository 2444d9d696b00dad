"""Characteristic functions and the Monte-Carlo least-squares criterion.

The criterion compares two factorizations of the pair characteristic
function at random Gaussian nodes: with Phi-hat the empirical char. fn. of
consecutive observation pairs and Phi_R the char. fn. of a candidate grid
density R,

    (1/N) sum_l | Phi-hat(U1,U2) Phi_R(U1,0) Phi_R(0,U2)
                 - Phi_R(U1,U2) Phi-hat(U1,0) Phi-hat(0,U2) |^2.

Nodes are drawn once per fit and reused, making the objective deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels, rng
from .simulate import TimeSeries

__all__ = [
    "GridDensity2D",
    "EmpCharFn",
    "WeightNodes",
    "GridCharFn",
    "emp_charfn",
    "cell_charfn",
    "grid_charfn",
    "mn_criterion",
    "translate",
    "uniform_density",
]

_TAYLOR_THRESHOLD = 1e-4


@dataclass(eq=False)
class GridDensity2D:
    """Piecewise-constant probability measure on an r x r grid.

    The canonical domain is (-1,1)^2 with cell edges x_i = -1 + 2(i-1)/r;
    ``offset`` shifts the whole support (used by translation-invariance
    checks; the canonical estimator keeps it at (0,0)).
    """

    r: int
    p: np.ndarray
    offset: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("grid order r must be positive")
        self.p = np.asarray(self.p, dtype=np.float64)
        if self.p.shape != (self.r, self.r):
            raise ValueError(f"p must be {self.r}x{self.r}, got {self.p.shape}")
        if np.any(self.p < 0):
            raise ValueError("cell probabilities must be nonnegative")
        if abs(self.p.sum() - 1.0) > 1e-12:
            raise ValueError("cell probabilities must sum to 1 within 1e-12")
        self.offset = (float(self.offset[0]), float(self.offset[1]))

    def edges(self, axis: int) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.r + 1) + self.offset[axis]

    def row_marginal(self) -> np.ndarray:
        """Cell probabilities of the first coordinate (row sums)."""
        return self.p.sum(axis=1)

    def __eq__(self, other):
        if not isinstance(other, GridDensity2D):
            return NotImplemented
        return (
            self.r == other.r
            and self.offset == other.offset
            and np.array_equal(self.p, other.p)
        )


def uniform_density(r: int) -> GridDensity2D:
    return GridDensity2D(r=r, p=np.full((r, r), 1.0 / (r * r)))


def translate(density: GridDensity2D, m: float) -> GridDensity2D:
    """Same cell probabilities, support shifted by (m, m)."""
    return GridDensity2D(
        r=density.r,
        p=density.p.copy(),
        offset=(density.offset[0] + m, density.offset[1] + m),
    )


@dataclass(eq=False)
class WeightNodes:
    """Monte-Carlo integration nodes (U1, U2), fixed once drawn.

    Each node is an i.i.d. pair with N(0, sigma_w^2) coordinates. Nodes also
    own a cache of per-cell characteristic values keyed by grid geometry,
    since every criterion evaluation in one fit shares the same nodes while
    the candidate density varies.
    """

    nodes: np.ndarray
    sigma_w: float = 3.0
    seed: int | None = None
    _cell_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.float64)
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2 or self.nodes.shape[0] == 0:
            raise ValueError("nodes must be a nonempty (N, 2) array")

    @classmethod
    def draw(cls, seed: int, n_nodes: int = 5000, sigma_w: float = 3.0) -> "WeightNodes":
        if n_nodes < 1:
            raise ValueError("n_nodes must be positive")
        if sigma_w <= 0:
            raise ValueError("sigma_w must be positive")
        gen = rng.philox(seed, rng.STREAM_NODES)
        nodes = sigma_w * rng.standard_normal(gen, (n_nodes, 2))
        return cls(nodes=nodes, sigma_w=sigma_w, seed=seed)

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    def cell_values(self, density: GridDensity2D) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell characteristic values (c1[i,l], c2[j,l]) at the nodes."""
        key = (density.r, density.offset)
        cached = self._cell_cache.get(key)
        if cached is None:
            e1 = density.edges(0)
            e2 = density.edges(1)
            c1 = _cell_charfn_edges(e1, self.nodes[:, 0])
            c2 = _cell_charfn_edges(e2, self.nodes[:, 1])
            cached = (c1, c2)
            self._cell_cache[key] = cached
        return cached


def _cell_charfn_vec(a: float, b: float, t: np.ndarray) -> np.ndarray:
    # char. fn. of Uniform(a,b): e^{it(a+b)/2} * sin(u)/u with u = t(b-a)/2,
    # Taylor expansion of sin(u)/u below the small-argument threshold
    t = np.asarray(t, dtype=np.float64)
    half = 0.5 * (b - a)
    u = t * half
    small = np.abs(t * (b - a)) < _TAYLOR_THRESHOLD
    u2 = u * u
    sinc = np.where(
        small,
        1.0 - u2 / 6.0 + u2 * u2 / 120.0 - u2 * u2 * u2 / 5040.0,
        np.sin(np.where(small, 1.0, u)) / np.where(small, 1.0, u),
    )
    return np.exp(1j * t * 0.5 * (a + b)) * sinc


def _cell_charfn_edges(edges: np.ndarray, t: np.ndarray) -> np.ndarray:
    r = edges.shape[0] - 1
    out = np.empty((r, t.shape[0]), np.complex128)
    for i in range(r):
        out[i] = _cell_charfn_vec(edges[i], edges[i + 1], t)
    return out


def cell_charfn(a: float, b: float, t: float) -> complex:
    """Characteristic function of Uniform(a, b) at t; exact 1 at t = 0."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if t == 0.0:
        return complex(1.0, 0.0)
    return complex(_cell_charfn_vec(a, b, np.array([t]))[0])


class EmpCharFn:
    """Empirical characteristic function of consecutive observation pairs.

    Evaluations use the verbatim normalization (1/n with n-1 summands), so
    the value at (0,0) is (n-1)/n. Node evaluations are cached per
    WeightNodes object when ``cache`` is true.
    """

    def __init__(self, series: TimeSeries, cache: bool = True):
        if series.n < 2:
            raise ValueError("series must have length >= 2")
        self.series = series
        self.cache = cache
        self._node_cache: dict[int, tuple] = {}

    def values(self, t1: np.ndarray, t2: np.ndarray) -> np.ndarray:
        t1 = np.ascontiguousarray(t1, dtype=np.float64)
        t2 = np.ascontiguousarray(t2, dtype=np.float64)
        return kernels.ecf_at_nodes(self.series.y, t1, t2)

    def value(self, t1: float, t2: float) -> complex:
        return complex(self.values(np.array([t1]), np.array([t2]))[0])

    def node_values(
        self, nodes: WeightNodes
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(joint, first-marginal, second-marginal) values at the nodes."""
        key = id(nodes)
        if self.cache and key in self._node_cache:
            return self._node_cache[key][1]
        t1 = np.ascontiguousarray(nodes.nodes[:, 0])
        t2 = np.ascontiguousarray(nodes.nodes[:, 1])
        zeros = np.zeros_like(t1)
        vals = (
            self.values(t1, t2),
            self.values(t1, zeros),
            self.values(zeros, t2),
        )
        if self.cache:
            # keep a reference to nodes so id() cannot be recycled
            self._node_cache[key] = (nodes, vals)
        return vals


class GridCharFn:
    """Characteristic function of a grid density, quacking like EmpCharFn.

    Exists for the exact-cancellation harness: plugging GridCharFn(R) into
    mn_criterion against the same R must yield exactly zero, because both
    factorizations then use bitwise-identical factors.
    """

    def __init__(self, density: GridDensity2D):
        self.density = density

    def node_values(self, nodes: WeightNodes):
        return _grid_node_values(self.density, nodes)


def _grid_node_values(density: GridDensity2D, nodes: WeightNodes):
    c1, c2 = nodes.cell_values(density)
    prow = np.ascontiguousarray(density.p.sum(axis=1))
    pcol = np.ascontiguousarray(density.p.sum(axis=0))
    return kernels.grid_char_values(
        np.ascontiguousarray(density.p), prow, pcol, c1, c2
    )


def emp_charfn(series: TimeSeries, t1: float, t2: float) -> complex:
    """(1/n) sum_{j=1}^{n-1} exp(i (t1 Y_j + t2 Y_{j+1}))."""
    return EmpCharFn(series, cache=False).value(t1, t2)


def grid_charfn(density: GridDensity2D, t1: float, t2: float) -> complex:
    """Phi_R(i t1, i t2) = sum_ij p_ij c_i(t1) c_j(t2)."""
    e1 = density.edges(0)
    e2 = density.edges(1)
    c1 = _cell_charfn_edges(e1, np.array([t1]))[:, 0]
    c2 = _cell_charfn_edges(e2, np.array([t2]))[:, 0]
    return complex(c1 @ density.p @ c2)


def mn_criterion(phi_hat, density: GridDensity2D, nodes: WeightNodes) -> float:
    """Monte-Carlo least-squares contrast between phi_hat and the density.

    ``phi_hat`` is an EmpCharFn (or any object exposing node_values(nodes)).
    """
    phij, phi1, phi2 = phi_hat.node_values(nodes)
    gj, g1, g2 = _grid_node_values(density, nodes)
    diff = phij * g1 * g2 - gj * phi1 * phi2
    return float(np.mean(diff.real * diff.real + diff.imag * diff.imag))
