"""Loop-form kernel sources.

Plain-Python loops written to compile under numba's nopython mode. The numba
backend wraps every function here with ``@njit(cache=True)``; the functions
are also runnable as-is (slowly) which keeps a single source of truth for the
loop algorithms. Vectorized numpy equivalents live in ``_kernels_np``.
"""

import math

import numpy as np

LOG2PI = math.log(2.0 * math.pi)

# Network simplex exit codes.
NS_OPTIMAL = 0
NS_INFEASIBLE = 1
NS_UNBOUNDED = 2
NS_PIVOT_LIMIT = 3

_NS_EPS = 2.220446049250313e-15
_NS_ART_TOL = 1e-9


def ecf_at_nodes(y, t1, t2):
    # mean over consecutive pairs of exp(i(t1 Y_j + t2 Y_{j+1})), 1/n factor
    n = y.shape[0]
    m = t1.shape[0]
    out = np.empty(m, np.complex128)
    for l in range(m):
        a = t1[l]
        b = t2[l]
        sr = 0.0
        si = 0.0
        for j in range(n - 1):
            ph = a * y[j] + b * y[j + 1]
            sr += math.cos(ph)
            si += math.sin(ph)
        out[l] = complex(sr / n, si / n)
    return out


def grid_char_values(p, prow, pcol, c1, c2):
    # c1[i, l], c2[j, l]: per-cell characteristic values at node l.
    # Returns the joint value sum_ij p_ij c1_i c2_j and the two marginals.
    r = p.shape[0]
    m = c1.shape[1]
    gj = np.empty(m, np.complex128)
    g1 = np.empty(m, np.complex128)
    g2 = np.empty(m, np.complex128)
    for l in range(m):
        accj = 0.0 + 0.0j
        for i in range(r):
            rowdot = 0.0 + 0.0j
            for j in range(r):
                rowdot += p[i, j] * c2[j, l]
            accj += c1[i, l] * rowdot
        acc1 = 0.0 + 0.0j
        for i in range(r):
            acc1 += prow[i] * c1[i, l]
        acc2 = 0.0 + 0.0j
        for j in range(r):
            acc2 += pcol[j] * c2[j, l]
        gj[l] = accj
        g1[l] = acc1
        g2[l] = acc2
    return gj, g1, g2


def gm_logpdf_matrix(y, sup, logw, mu, s):
    # logB[k, z] = log sum_d w_d N(y_k - sup_z; mu_d, s_d^2)
    n = y.shape[0]
    r = sup.shape[0]
    nd = mu.shape[0]
    out = np.empty((n, r))
    for k in range(n):
        for z in range(r):
            u = y[k] - sup[z]
            lmax = -np.inf
            for d in range(nd):
                t = (u - mu[d]) / s[d]
                lc = logw[d] - math.log(s[d]) - 0.5 * LOG2PI - 0.5 * t * t
                if lc > lmax:
                    lmax = lc
            acc = 0.0
            for d in range(nd):
                t = (u - mu[d]) / s[d]
                lc = logw[d] - math.log(s[d]) - 0.5 * LOG2PI - 0.5 * t * t
                acc += math.exp(lc - lmax)
            out[k, z] = lmax + math.log(acc)
    return out


def hmm_forward_loglik(logB, Q, mu0):
    # scaled forward pass; per-step max shift keeps exp() in range
    n, r = logB.shape
    alpha = np.empty(r)
    nxt = np.empty(r)
    m = -np.inf
    for z in range(r):
        if logB[0, z] > m:
            m = logB[0, z]
    s = 0.0
    for z in range(r):
        v = mu0[z] * math.exp(logB[0, z] - m)
        alpha[z] = v
        s += v
    if s <= 0.0:
        raise ValueError("forward normalizer underflow")
    loglik = m + math.log(s)
    for z in range(r):
        alpha[z] /= s
    for k in range(1, n):
        m = -np.inf
        for z in range(r):
            if logB[k, z] > m:
                m = logB[k, z]
        s = 0.0
        for z2 in range(r):
            pred = 0.0
            for z in range(r):
                pred += alpha[z] * Q[z, z2]
            v = pred * math.exp(logB[k, z2] - m)
            nxt[z2] = v
            s += v
        if s <= 0.0:
            raise ValueError("forward normalizer underflow")
        loglik += m + math.log(s)
        for z in range(r):
            alpha[z] = nxt[z] / s
    return loglik


def hmm_forward_backward(logB, Q, mu0):
    # materialized smoothing pass: gamma (n,r), xi (n-1,r,r)
    n, r = logB.shape
    alpha = np.empty((n, r))
    shifts = np.empty(n)
    norms = np.empty(n)
    m = -np.inf
    for z in range(r):
        if logB[0, z] > m:
            m = logB[0, z]
    s = 0.0
    for z in range(r):
        v = mu0[z] * math.exp(logB[0, z] - m)
        alpha[0, z] = v
        s += v
    if s <= 0.0:
        raise ValueError("forward normalizer underflow")
    loglik = m + math.log(s)
    shifts[0] = m
    norms[0] = s
    for z in range(r):
        alpha[0, z] /= s
    for k in range(1, n):
        m = -np.inf
        for z in range(r):
            if logB[k, z] > m:
                m = logB[k, z]
        s = 0.0
        for z2 in range(r):
            pred = 0.0
            for z in range(r):
                pred += alpha[k - 1, z] * Q[z, z2]
            v = pred * math.exp(logB[k, z2] - m)
            alpha[k, z2] = v
            s += v
        if s <= 0.0:
            raise ValueError("forward normalizer underflow")
        loglik += m + math.log(s)
        shifts[k] = m
        norms[k] = s
        for z in range(r):
            alpha[k, z] /= s

    gamma = np.empty((n, r))
    xi = np.empty((n - 1, r, r))
    beta = np.ones(r)
    bnew = np.empty(r)
    eb = np.empty(r)
    for z in range(r):
        gamma[n - 1, z] = alpha[n - 1, z]
    for k in range(n - 2, -1, -1):
        for z2 in range(r):
            eb[z2] = math.exp(logB[k + 1, z2] - shifts[k + 1]) * beta[z2] / norms[k + 1]
        for z in range(r):
            acc = 0.0
            for z2 in range(r):
                t = Q[z, z2] * eb[z2]
                xi[k, z, z2] = alpha[k, z] * t
                acc += t
            bnew[z] = acc
            gamma[k, z] = alpha[k, z] * acc
        for z in range(r):
            beta[z] = bnew[z]
    return loglik, gamma, xi


def hmm_estep(y, sup, Q, mu0, logw, mu, s, logB):
    # fused E-step: forward stores alpha-hat, backward accumulates the
    # sufficient statistics without materializing xi or responsibilities.
    # Returns (loglik, xi_sum (r,r), T0 (r,), T1 (r,), W (r,D), A1 (r,D),
    # A2 (r,D)) where for u = y_k - sup_z and responsibility w_k(z,d):
    #   T0[z] = sum_k gamma_k(z),        T1[z] = sum_k gamma_k(z) y_k,
    #   W[z,d] = sum_k w_k(z,d), A1[z,d] = sum_k w_k(z,d) u,
    #   A2[z,d] = sum_k w_k(z,d) u^2.
    n, r = logB.shape
    nd = mu.shape[0]
    alpha = np.empty((n, r))
    shifts = np.empty(n)
    norms = np.empty(n)
    m = -np.inf
    for z in range(r):
        if logB[0, z] > m:
            m = logB[0, z]
    ssum = 0.0
    for z in range(r):
        v = mu0[z] * math.exp(logB[0, z] - m)
        alpha[0, z] = v
        ssum += v
    if ssum <= 0.0:
        raise ValueError("forward normalizer underflow")
    loglik = m + math.log(ssum)
    shifts[0] = m
    norms[0] = ssum
    for z in range(r):
        alpha[0, z] /= ssum
    for k in range(1, n):
        m = -np.inf
        for z in range(r):
            if logB[k, z] > m:
                m = logB[k, z]
        ssum = 0.0
        for z2 in range(r):
            pred = 0.0
            for z in range(r):
                pred += alpha[k - 1, z] * Q[z, z2]
            v = pred * math.exp(logB[k, z2] - m)
            alpha[k, z2] = v
            ssum += v
        if ssum <= 0.0:
            raise ValueError("forward normalizer underflow")
        loglik += m + math.log(ssum)
        shifts[k] = m
        norms[k] = ssum
        for z in range(r):
            alpha[k, z] /= ssum

    xi_sum = np.zeros((r, r))
    t0 = np.zeros(r)
    t1 = np.zeros(r)
    ws = np.zeros((r, nd))
    a1 = np.zeros((r, nd))
    a2 = np.zeros((r, nd))
    beta = np.ones(r)
    bnew = np.empty(r)
    eb = np.empty(r)

    for z in range(r):
        g = alpha[n - 1, z]
        t0[z] += g
        t1[z] += g * y[n - 1]
        u = y[n - 1] - sup[z]
        for d in range(nd):
            t = (u - mu[d]) / s[d]
            lc = logw[d] - math.log(s[d]) - 0.5 * LOG2PI - 0.5 * t * t
            w = g * math.exp(lc - logB[n - 1, z])
            ws[z, d] += w
            a1[z, d] += w * u
            a2[z, d] += w * u * u

    for k in range(n - 2, -1, -1):
        for z2 in range(r):
            eb[z2] = math.exp(logB[k + 1, z2] - shifts[k + 1]) * beta[z2] / norms[k + 1]
        for z in range(r):
            acc = 0.0
            az = alpha[k, z]
            for z2 in range(r):
                t = Q[z, z2] * eb[z2]
                xi_sum[z, z2] += az * t
                acc += t
            bnew[z] = acc
            g = az * acc
            t0[z] += g
            t1[z] += g * y[k]
            u = y[k] - sup[z]
            for d in range(nd):
                t = (u - mu[d]) / s[d]
                lc = logw[d] - math.log(s[d]) - 0.5 * LOG2PI - 0.5 * t * t
                w = g * math.exp(lc - logB[k, z])
                ws[z, d] += w
                a1[z, d] += w * u
                a2[z, d] += w * u * u
        for z in range(r):
            beta[z] = bnew[z]
    return loglik, xi_sum, t0, t1, ws, a1, a2


def ns_core(ns, nt, cost, supply, max_pivots):
    # Uncapacitated transportation network simplex on the complete bipartite
    # graph: nodes 0..ns-1 are sources, ns..ns+nt-1 sinks, plus an artificial
    # root. Real arc e < ns*nt runs e//nt -> ns + e%nt. Block pivoting with a
    # strongly-feasible spanning tree (LEMON-style bookkeeping).
    n_nodes = ns + nt
    root = n_nodes
    a_real = ns * nt
    a_all = a_real + n_nodes

    flow = np.zeros(a_all)
    state = np.ones(a_all, np.int8)  # 1 = lower (nonbasic), 0 = tree
    acost = np.empty(a_all)
    mx = 0.0
    for e in range(a_real):
        acost[e] = cost[e]
        if abs(cost[e]) > mx:
            mx = abs(cost[e])
    art_cost = (mx + 1.0) * (n_nodes + 1)

    pi = np.zeros(n_nodes + 1)
    parent = np.empty(n_nodes + 1, np.int64)
    pred = np.empty(n_nodes + 1, np.int64)
    thread = np.empty(n_nodes + 1, np.int64)
    rev_thread = np.empty(n_nodes + 1, np.int64)
    succ_num = np.empty(n_nodes + 1, np.int64)
    last_succ = np.empty(n_nodes + 1, np.int64)
    fwd = np.zeros(n_nodes + 1, np.bool_)
    dirty = np.empty(n_nodes + 2, np.int64)

    parent[root] = -1
    pred[root] = -1
    thread[root] = 0
    rev_thread[0] = root
    rev_thread[root] = n_nodes - 1
    succ_num[root] = n_nodes + 1
    last_succ[root] = n_nodes - 1

    for u in range(n_nodes):
        parent[u] = root
        pred[u] = a_real + u
        thread[u] = u + 1 if u != n_nodes - 1 else root
        if u != n_nodes - 1:
            rev_thread[u + 1] = u
        succ_num[u] = 1
        last_succ[u] = u
        e = a_real + u
        state[e] = 0
        if supply[u] >= 0.0:
            fwd[u] = True
            pi[u] = 0.0
            flow[e] = supply[u]
            acost[e] = 0.0
        else:
            fwd[u] = False
            pi[u] = art_cost
            flow[e] = -supply[u]
            acost[e] = art_cost

    block = int(math.sqrt(float(a_real)))
    if block < 10:
        block = 10
    if block > a_real:
        block = a_real
    next_arc = 0
    pivots = 0
    status = NS_OPTIMAL

    while True:
        # entering arc: block search over real arcs with scaled tolerance
        in_arc = -1
        min_c = 0.0
        cnt = block
        found = False
        e = next_arc
        for _ in range(a_real):
            if state[e] == 1:
                c = acost[e] + pi[e // nt] - pi[ns + e % nt]
                if c < min_c:
                    min_c = c
                    in_arc = e
            cnt -= 1
            if cnt == 0:
                if in_arc >= 0:
                    am = abs(acost[in_arc])
                    a2m = abs(pi[in_arc // nt])
                    a3m = abs(pi[ns + in_arc % nt])
                    if a2m > am:
                        am = a2m
                    if a3m > am:
                        am = a3m
                    if am < 1.0:
                        am = 1.0
                    if min_c < -_NS_EPS * am:
                        found = True
                        break
                min_c = 0.0
                in_arc = -1
                cnt = block
            e += 1
            if e == a_real:
                e = 0
        if not found and in_arc >= 0:
            am = abs(acost[in_arc])
            a2m = abs(pi[in_arc // nt])
            a3m = abs(pi[ns + in_arc % nt])
            if a2m > am:
                am = a2m
            if a3m > am:
                am = a3m
            if am < 1.0:
                am = 1.0
            if min_c < -_NS_EPS * am:
                found = True
        if not found:
            break
        next_arc = in_arc + 1 if in_arc + 1 < a_real else 0
        pivots += 1
        if pivots > max_pivots:
            status = NS_PIVOT_LIMIT
            break

        s_in = in_arc // nt
        t_in = ns + in_arc % nt

        # join node (lowest common ancestor by subtree sizes)
        u = s_in
        v = t_in
        while u != v:
            if succ_num[u] < succ_num[v]:
                u = parent[u]
            else:
                v = parent[v]
        join = u

        # leaving arc
        first = s_in
        second = t_in
        delta = np.inf
        u_out = -1
        result = 0
        u = first
        while u != join:
            ep = pred[u]
            d = flow[ep] if fwd[u] else np.inf
            if d < delta:
                delta = d
                u_out = u
                result = 1
            u = parent[u]
        u = second
        while u != join:
            ep = pred[u]
            d = np.inf if fwd[u] else flow[ep]
            if d <= delta:
                delta = d
                u_out = u
                result = 2
            u = parent[u]
        if result == 0:
            status = NS_UNBOUNDED
            break
        if result == 1:
            u_in = first
            v_in = second
        else:
            u_in = second
            v_in = first

        # augment flow around the cycle
        if delta > 0.0:
            flow[in_arc] += delta
            u = s_in
            while u != join:
                if fwd[u]:
                    flow[pred[u]] -= delta
                else:
                    flow[pred[u]] += delta
                u = parent[u]
            u = t_in
            while u != join:
                if fwd[u]:
                    flow[pred[u]] += delta
                else:
                    flow[pred[u]] -= delta
                u = parent[u]
        state[in_arc] = 0
        state[pred[u_out]] = 1

        # splice the subtree rooted at u_in under v_in (stem reversal)
        old_rev_thread = rev_thread[u_out]
        old_succ_num = succ_num[u_out]
        old_last_succ = last_succ[u_out]
        v_out = parent[u_out]

        u = last_succ[u_in]
        right = thread[u]
        if old_rev_thread == v_in:
            last = thread[last_succ[u_out]]
        else:
            last = thread[v_in]

        thread[v_in] = u_in
        ndirty = 0
        dirty[ndirty] = v_in
        ndirty += 1
        stem = u_in
        par_stem = v_in
        while stem != u_out:
            new_stem = parent[stem]
            thread[u] = new_stem
            dirty[ndirty] = u
            ndirty += 1
            w = rev_thread[stem]
            thread[w] = right
            rev_thread[right] = w
            parent[stem] = par_stem
            par_stem = stem
            stem = new_stem
            if last_succ[stem] == last_succ[par_stem]:
                u = rev_thread[par_stem]
            else:
                u = last_succ[stem]
            right = thread[u]
        parent[u_out] = par_stem
        thread[u] = last
        rev_thread[last] = u
        last_succ[u_out] = u

        if old_rev_thread != v_in:
            thread[old_rev_thread] = right
            rev_thread[right] = old_rev_thread

        for i in range(ndirty):
            w = dirty[i]
            rev_thread[thread[w]] = w

        tmp_sc = 0
        tmp_ls = last_succ[u_out]
        u = u_out
        while u != u_in:
            w = parent[u]
            pred[u] = pred[w]
            fwd[u] = not fwd[w]
            tmp_sc += succ_num[u] - succ_num[w]
            succ_num[u] = tmp_sc
            last_succ[w] = tmp_ls
            u = w
        pred[u_in] = in_arc
        fwd[u_in] = u_in == s_in
        succ_num[u_in] = old_succ_num

        up_limit_in = -1
        up_limit_out = -1
        if last_succ[join] == v_in:
            up_limit_out = join
        else:
            up_limit_in = join
        u = v_in
        while u != up_limit_in and last_succ[u] == v_in:
            last_succ[u] = last_succ[u_out]
            u = parent[u]
        if join != old_rev_thread and v_in != old_rev_thread:
            u = v_out
            while u != up_limit_out and last_succ[u] == old_last_succ:
                last_succ[u] = old_rev_thread
                u = parent[u]
        else:
            u = v_out
            while u != up_limit_out and last_succ[u] == old_last_succ:
                last_succ[u] = last_succ[u_out]
                u = parent[u]
        u = v_in
        while u != join:
            succ_num[u] += old_succ_num
            u = parent[u]
        u = v_out
        while u != join:
            succ_num[u] -= old_succ_num
            u = parent[u]

        # potentials shift by a constant over the moved subtree
        if fwd[u_in]:
            sigma = pi[v_in] - pi[u_in] - acost[pred[u_in]]
        else:
            sigma = pi[v_in] - pi[u_in] + acost[pred[u_in]]
        end = thread[last_succ[u_in]]
        u = u_in
        while u != end:
            pi[u] += sigma
            u = thread[u]

    if status == NS_OPTIMAL:
        for u in range(n_nodes):
            if flow[a_real + u] > _NS_ART_TOL:
                status = NS_INFEASIBLE
                break
    return status, flow[:a_real].copy()
