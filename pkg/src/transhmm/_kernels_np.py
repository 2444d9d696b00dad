"""Vectorized numpy fallbacks for the hot kernels.

Same contracts as ``_impl_loops``; used when numba is unavailable or when
``TRANSHMM_BACKEND=numpy``. The network simplex has no useful vectorized
form, so the numpy backend runs the loop source interpreted (fine at the
problem sizes the tests use; the numba backend is the production path).
"""

from __future__ import annotations

import numpy as np

from . import _impl_loops as _loops

ns_core = _loops.ns_core

_ECF_CHUNK = 64
_ROW_CHUNK = 65536


def ecf_at_nodes(y, t1, t2):
    n = y.shape[0]
    m = t1.shape[0]
    ya = y[:-1]
    yb = y[1:]
    out = np.empty(m, np.complex128)
    for lo in range(0, m, _ECF_CHUNK):
        hi = min(lo + _ECF_CHUNK, m)
        ph = t1[lo:hi, None] * ya[None, :] + t2[lo:hi, None] * yb[None, :]
        out[lo:hi] = np.exp(1j * ph).sum(axis=1) / n
    return out


def grid_char_values(p, prow, pcol, c1, c2):
    tmp = p @ c2
    gj = (c1 * tmp).sum(axis=0)
    g1 = prow @ c1
    g2 = pcol @ c2
    return gj, g1, g2


def gm_logpdf_matrix(y, sup, logw, mu, s):
    n = y.shape[0]
    r = sup.shape[0]
    out = np.empty((n, r))
    const = logw - np.log(s) - 0.5 * _loops.LOG2PI
    for lo in range(0, n, _ROW_CHUNK):
        hi = min(lo + _ROW_CHUNK, n)
        u = y[lo:hi, None] - sup[None, :]
        t = (u[:, :, None] - mu[None, None, :]) / s[None, None, :]
        lc = const[None, None, :] - 0.5 * t * t
        lmax = lc.max(axis=2)
        out[lo:hi] = lmax + np.log(np.exp(lc - lmax[:, :, None]).sum(axis=2))
    return out


def _forward(logB, Q, mu0):
    n, r = logB.shape
    alpha = np.empty((n, r))
    shifts = np.empty(n)
    norms = np.empty(n)
    m = logB[0].max()
    a = mu0 * np.exp(logB[0] - m)
    s = a.sum()
    if s <= 0.0:
        raise ValueError("forward normalizer underflow")
    alpha[0] = a / s
    shifts[0] = m
    norms[0] = s
    loglik = m + np.log(s)
    for k in range(1, n):
        m = logB[k].max()
        a = (alpha[k - 1] @ Q) * np.exp(logB[k] - m)
        s = a.sum()
        if s <= 0.0:
            raise ValueError("forward normalizer underflow")
        alpha[k] = a / s
        shifts[k] = m
        norms[k] = s
        loglik += m + np.log(s)
    return loglik, alpha, shifts, norms


def hmm_forward_loglik(logB, Q, mu0):
    loglik, _, _, _ = _forward(logB, Q, mu0)
    return loglik


def hmm_forward_backward(logB, Q, mu0):
    n, r = logB.shape
    loglik, alpha, shifts, norms = _forward(logB, Q, mu0)
    gamma = np.empty((n, r))
    xi = np.empty((n - 1, r, r))
    beta = np.ones(r)
    gamma[n - 1] = alpha[n - 1]
    for k in range(n - 2, -1, -1):
        eb = np.exp(logB[k + 1] - shifts[k + 1]) * beta / norms[k + 1]
        t = Q * eb[None, :]
        xi[k] = alpha[k][:, None] * t
        beta = t.sum(axis=1)
        gamma[k] = alpha[k] * beta
    return loglik, gamma, xi


def hmm_estep(y, sup, Q, mu0, logw, mu, s, logB):
    n, r = logB.shape
    nd = mu.shape[0]
    loglik, alpha, shifts, norms = _forward(logB, Q, mu0)

    xi_sum = np.zeros((r, r))
    t0 = np.zeros(r)
    t1 = np.zeros(r)
    ws = np.zeros((r, nd))
    a1 = np.zeros((r, nd))
    a2 = np.zeros((r, nd))
    const = logw - np.log(s) - 0.5 * _loops.LOG2PI

    def accumulate(k, g):
        # g: gamma row at time k
        u = y[k] - sup
        t = (u[:, None] - mu[None, :]) / s[None, :]
        lc = const[None, :] - 0.5 * t * t
        w = g[:, None] * np.exp(lc - logB[k][:, None])
        ws[:] += w
        a1[:] += w * u[:, None]
        a2[:] += w * (u * u)[:, None]
        t0[:] += g
        t1[:] += g * y[k]

    beta = np.ones(r)
    accumulate(n - 1, alpha[n - 1])
    for k in range(n - 2, -1, -1):
        eb = np.exp(logB[k + 1] - shifts[k + 1]) * beta / norms[k + 1]
        t = Q * eb[None, :]
        xi_sum += alpha[k][:, None] * t
        beta = t.sum(axis=1)
        accumulate(k, alpha[k] * beta)
    return loglik, xi_sum, t0, t1, ws, a1, a2
