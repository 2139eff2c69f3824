"""Pure-Python/numpy implementations of the hot kernels.

This module mirrors the compiled `_kernels` extension function-for-function;
`_backend` picks whichever is available.  Both implementations perform float
operations in the same order, so results agree bit-for-bit.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# Row-chunk size bound for the line instability scan keeps temporaries small.
_CHUNK_CELLS = 1 << 22


def unstable_edges_dense(w, partner, alpha, bipartite, limit=-1):
    """Edges (i, j), i < j, not in the matching, with alpha*w(i,j) strictly
    below both endpoints' matched weights.  Lexicographic order."""
    m = w.shape[0]
    idx = np.arange(m)
    mw = w[idx, partner]
    thr = np.minimum.outer(mw, mw)
    bad = (alpha * w) < thr
    bad[idx, partner] = False
    if bipartite:
        half = m // 2
        mask = np.zeros((m, m), dtype=bool)
        mask[:half, half:] = True
        bad &= mask
    else:
        bad &= np.triu(np.ones((m, m), dtype=bool), 1)
    out = np.argwhere(bad)
    if limit >= 0:
        out = out[:limit]
    return np.ascontiguousarray(out, dtype=np.int64)


def unstable_edges_line(pos, partner, alpha, limit=-1):
    """Line-instance variant of unstable_edges_dense (weights from positions)."""
    m = pos.shape[0]
    mw = np.abs(pos[partner] - pos)
    chunk = max(1, _CHUNK_CELLS // m)
    cols = np.arange(m)
    found = []
    total = 0
    for i0 in range(0, m, chunk):
        i1 = min(m, i0 + chunk)
        w = np.abs(pos[None, :] - pos[i0:i1, None])
        bad = (alpha * w) < np.minimum(mw[i0:i1, None], mw[None, :])
        bad &= cols[None, :] > np.arange(i0, i1)[:, None]
        bad[np.arange(i1 - i0), partner[i0:i1]] = False
        hits = np.argwhere(bad)
        if hits.size:
            hits[:, 0] += i0
            found.append(hits)
            total += hits.shape[0]
            if 0 <= limit <= total:
                break
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    out = np.concatenate(found)
    if limit >= 0:
        out = out[:limit]
    return np.ascontiguousarray(out, dtype=np.int64)


def enumeration_scan(w, alpha, bipartite, check_stability):
    """Exhaustive scan over all perfect matchings in lexicographic order.

    Returns (total, min_cost, min_pairs, stable_count, smax_cost, smax_pairs,
    smin_cost, smin_pairs).  Witnesses are the first (lexicographically
    smallest) matchings attaining each extreme; stable fields are None/0 when
    check_stability is false, in which case branch-and-bound pruning applies.
    """
    m = w.shape[0]
    half = m // 2
    partner = [-1] * m
    wl = [list(map(float, row)) for row in w]

    total = 0
    min_cost = np.inf
    min_pairs = None
    stable_count = 0
    smax_cost = -np.inf
    smax_pairs = None
    smin_cost = np.inf
    smin_pairs = None

    def snapshot():
        return [(i, partner[i]) for i in range(m) if i < partner[i]]

    def is_stable():
        mw = [wl[i][partner[i]] for i in range(m)]
        if bipartite:
            pairs = ((i, j) for i in range(half) for j in range(half, m))
        else:
            pairs = ((i, j) for i in range(m) for j in range(i + 1, m))
        for i, j in pairs:
            if partner[i] != j:
                t = alpha * wl[i][j]
                if t < mw[i] and t < mw[j]:
                    return False
        return True

    def leaf(cost):
        nonlocal total, min_cost, min_pairs
        nonlocal stable_count, smax_cost, smax_pairs, smin_cost, smin_pairs
        total += 1
        if cost < min_cost:
            min_cost = cost
            min_pairs = snapshot()
        if check_stability and is_stable():
            stable_count += 1
            if cost > smax_cost:
                smax_cost = cost
                smax_pairs = snapshot()
            if cost < smin_cost:
                smin_cost = cost
                smin_pairs = snapshot()

    def rec(cost):
        if not check_stability and cost >= min_cost:
            return
        i = -1
        for t in range(m):
            if partner[t] < 0:
                i = t
                break
        if i < 0:
            leaf(cost)
            return
        lo = half if bipartite else i + 1
        for j in range(lo, m):
            if partner[j] < 0:
                partner[i] = j
                partner[j] = i
                rec(cost + wl[i][j])
                partner[i] = -1
                partner[j] = -1

    rec(0.0)
    return (
        total,
        min_cost,
        min_pairs,
        stable_count,
        smax_cost if stable_count else None,
        smax_pairs,
        smin_cost if stable_count else None,
        smin_pairs,
    )


def _greedy_pass(weight_of, eu, ev, ew, partner, alpha):
    m = len(partner)
    partner = list(partner)
    mw = [weight_of(v, partner[v]) for v in range(m)]
    out_idx, out_u, out_v, out_pu, out_pv = [], [], [], [], []
    eu_l, ev_l, ew_l = eu.tolist(), ev.tolist(), ew.tolist()
    for idx in range(len(eu_l)):
        u = eu_l[idx]
        v = ev_l[idx]
        pu = partner[u]
        if pu == v:
            continue
        t = alpha * ew_l[idx]
        if t < mw[u] and t < mw[v]:
            pv = partner[v]
            created = weight_of(pu, pv)
            partner[u] = v
            partner[v] = u
            partner[pu] = pv
            partner[pv] = pu
            mw[u] = ew_l[idx]
            mw[v] = ew_l[idx]
            mw[pu] = created
            mw[pv] = created
            out_idx.append(idx)
            out_u.append(u)
            out_v.append(v)
            out_pu.append(pu)
            out_pv.append(pv)
    flips = np.array([out_idx, out_u, out_v, out_pu, out_pv], dtype=np.int64).T
    flips = flips.reshape(-1, 5)
    return flips, np.asarray(partner, dtype=np.int64)


def greedy_pass_line(pos, eu, ev, ew, partner, alpha):
    """One pass over the (weight, min, max)-sorted edge list, flipping every
    unstable edge against the evolving matching.  Returns (flips, partner):
    flips rows are (edge_index, u, v, old_partner_u, old_partner_v)."""
    pl = pos.tolist()

    def weight_of(a, b):
        d = pl[b] - pl[a]
        return d if d >= 0 else -d

    return _greedy_pass(weight_of, eu, ev, ew, partner, alpha)


def greedy_pass_dense(w, eu, ev, ew, partner, alpha):
    wl = [list(map(float, row)) for row in w]

    def weight_of(a, b):
        return wl[a][b]

    return _greedy_pass(weight_of, eu, ev, ew, partner, alpha)


def tree_effects(left, right, leaf_slot, leaf_weights, alpha):
    """Virtual weights of full binary trees, batched over weight vectors.

    Nodes are topologically ordered (children before parents, root last);
    left/right are -1 on leaves, leaf_slot maps a leaf node to its column in
    leaf_weights (B, n_leaves).  Returns (root_wb (B,), leaf_sum (B,))."""
    n = left.shape[0]
    b = leaf_weights.shape[0]
    inv = 1.0 / alpha
    wb = np.empty((n, b), dtype=np.float64)
    for i in range(n):
        li = left[i]
        if li < 0:
            wb[i] = leaf_weights[:, leaf_slot[i]]
        else:
            x = wb[li]
            y = wb[right[i]]
            wb[i] = x + y + inv * np.minimum(x, y)
    leaf_sum = np.zeros(b, dtype=np.float64)
    for i in range(n):
        if left[i] < 0:
            leaf_sum += leaf_weights[:, leaf_slot[i]]
    return wb[n - 1].copy(), leaf_sum


def line_mc_trials(gaps, alpha):
    """Batch evaluation of random line instances given their gap vectors.

    For each trial: cost ratio of the long-edge matching (outer edge plus the
    off-by-one inner pairs) to the consecutive matching, and whether the
    long-edge matching is alpha-stable.  Returns (ratio (T,), stable (T,))."""
    gaps = np.asarray(gaps, dtype=np.float64)
    t, g = gaps.shape
    m = g + 1
    if m % 2 != 0 or m < 2:
        raise ValueError("gap matrix must describe an even vertex count")
    pos = np.empty((t, m), dtype=np.float64)
    pos[:, 0] = 0.0
    np.cumsum(gaps, axis=1, out=pos[:, 1:])
    c_opt = gaps[:, 0::2].sum(axis=1)
    span = pos[:, m - 1]
    c_m = span + gaps[:, 1::2].sum(axis=1) if m > 2 else span.copy()

    partner = np.empty(m, dtype=np.int64)
    partner[0] = m - 1
    partner[m - 1] = 0
    for i in range(1, m - 1, 2):
        partner[i] = i + 1
        partner[i + 1] = i
    mw = np.empty((t, m), dtype=np.float64)
    for v in range(m):
        mw[:, v] = np.abs(pos[:, partner[v]] - pos[:, v])

    unstable = np.zeros(t, dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            if partner[i] == j:
                continue
            w = pos[:, j] - pos[:, i]
            unstable |= (alpha * w) < np.minimum(mw[:, i], mw[:, j])
    return c_m / c_opt, ~unstable
