"""Backend facade for the hot kernels.

``get_kernels("numba")`` compiles the loop sources with ``@njit``;
``get_kernels("numpy")`` returns the vectorized fallbacks. Module-level
names are bound to the active backend chosen at import time (see
``backend.ACTIVE_BACKEND``); the benchmark suite and the cross-backend
tests fetch both explicitly.
"""

from __future__ import annotations

from types import SimpleNamespace

from . import _impl_loops, _kernels_np, backend

_KERNEL_NAMES = (
    "ecf_at_nodes",
    "grid_char_values",
    "gm_logpdf_matrix",
    "hmm_forward_loglik",
    "hmm_forward_backward",
    "hmm_estep",
    "ns_core",
)

_cache: dict[str, SimpleNamespace] = {}


def _build_numba() -> SimpleNamespace:
    from numba import njit

    compiled = {
        name: njit(cache=True)(getattr(_impl_loops, name))
        for name in _KERNEL_NAMES
    }
    return SimpleNamespace(name="numba", **compiled)


def _build_numpy() -> SimpleNamespace:
    return SimpleNamespace(
        name="numpy",
        **{name: getattr(_kernels_np, name) for name in _KERNEL_NAMES},
    )


def get_kernels(name: str | None = None) -> SimpleNamespace:
    """Kernel namespace for the given backend (default: the active one)."""
    resolved = backend.resolve_backend(name)
    if resolved not in _cache:
        _cache[resolved] = (
            _build_numba() if resolved == "numba" else _build_numpy()
        )
    return _cache[resolved]


_active = get_kernels(backend.ACTIVE_BACKEND)

ecf_at_nodes = _active.ecf_at_nodes
grid_char_values = _active.grid_char_values
gm_logpdf_matrix = _active.gm_logpdf_matrix
hmm_forward_loglik = _active.hmm_forward_loglik
hmm_forward_backward = _active.hmm_forward_backward
hmm_estep = _active.hmm_estep
ns_core = _active.ns_core

NS_OPTIMAL = _impl_loops.NS_OPTIMAL
NS_INFEASIBLE = _impl_loops.NS_INFEASIBLE
NS_UNBOUNDED = _impl_loops.NS_UNBOUNDED
NS_PIVOT_LIMIT = _impl_loops.NS_PIVOT_LIMIT
