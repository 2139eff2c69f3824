# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels.

Function-for-function mirror of `_kernels_py`; see that module for the
contracts.  Float operations happen in the same order as the fallback so both
backends return bit-identical results.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def unstable_edges_dense(w, partner, alpha, bipartite, limit=-1):
    cdef double[:, ::1] W = np.ascontiguousarray(w, dtype=np.float64)
    cdef long long[::1] P = np.ascontiguousarray(partner, dtype=np.int64)
    cdef Py_ssize_t m = W.shape[0]
    cdef Py_ssize_t half = m // 2
    cdef double a = alpha
    cdef bint bip = bipartite
    cdef long long lim = limit
    cdef Py_ssize_t i, j, lo, hi
    cdef double t, mwi
    cdef double[::1] mw = np.empty(m, dtype=np.float64)
    for i in range(m):
        mw[i] = W[i, P[i]]
    found = []
    for i in range(m):
        if bip:
            if i >= half:
                break
            lo = half
        else:
            lo = i + 1
        mwi = mw[i]
        for j in range(lo, m):
            if P[i] == j:
                continue
            t = a * W[i, j]
            if t < mwi and t < mw[j]:
                found.append((i, j))
                if 0 <= lim <= <long long> len(found):
                    return np.asarray(found, dtype=np.int64).reshape(-1, 2)
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    return np.asarray(found, dtype=np.int64)


def unstable_edges_line(pos, partner, alpha, limit=-1):
    cdef double[::1] X = np.ascontiguousarray(pos, dtype=np.float64)
    cdef long long[::1] P = np.ascontiguousarray(partner, dtype=np.int64)
    cdef Py_ssize_t m = X.shape[0]
    cdef double a = alpha
    cdef long long lim = limit
    cdef Py_ssize_t i, j
    cdef double t, mwi, d
    cdef double[::1] mw = np.empty(m, dtype=np.float64)
    for i in range(m):
        d = X[P[i]] - X[i]
        mw[i] = d if d >= 0.0 else -d
    found = []
    for i in range(m):
        mwi = mw[i]
        for j in range(i + 1, m):
            if P[i] == j:
                continue
            t = a * (X[j] - X[i])
            if t < mwi and t < mw[j]:
                found.append((i, j))
                if 0 <= lim <= <long long> len(found):
                    return np.asarray(found, dtype=np.int64).reshape(-1, 2)
    if not found:
        return np.empty((0, 2), dtype=np.int64)
    return np.asarray(found, dtype=np.int64)


cdef class _Enum:
    cdef double[:, ::1] w
    cdef long long[::1] partner
    cdef double[::1] mw
    cdef long long[::1] min_pairs, smax_pairs, smin_pairs
    cdef Py_ssize_t m, half
    cdef bint bipartite, check_stability
    cdef double alpha
    cdef long long total, stable_count
    cdef double min_cost, smax_cost, smin_cost

    def __init__(self, w, alpha, bipartite, check_stability):
        self.w = np.ascontiguousarray(w, dtype=np.float64)
        self.m = self.w.shape[0]
        self.half = self.m // 2
        self.alpha = alpha
        self.bipartite = bipartite
        self.check_stability = check_stability
        self.partner = np.full(self.m, -1, dtype=np.int64)
        self.mw = np.empty(self.m, dtype=np.float64)
        self.min_pairs = np.full(self.m, -1, dtype=np.int64)
        self.smax_pairs = np.full(self.m, -1, dtype=np.int64)
        self.smin_pairs = np.full(self.m, -1, dtype=np.int64)
        self.total = 0
        self.stable_count = 0
        self.min_cost = np.inf
        self.smax_cost = -np.inf
        self.smin_cost = np.inf

    cdef void snapshot(self, long long[::1] dst) noexcept:
        cdef Py_ssize_t i
        for i in range(self.m):
            dst[i] = self.partner[i]

    cdef bint is_stable(self) noexcept:
        cdef Py_ssize_t i, j, lo
        cdef double t, mwi
        for i in range(self.m):
            self.mw[i] = self.w[i, self.partner[i]]
        for i in range(self.m):
            if self.bipartite:
                if i >= self.half:
                    break
                lo = self.half
            else:
                lo = i + 1
            mwi = self.mw[i]
            for j in range(lo, self.m):
                if self.partner[i] == j:
                    continue
                t = self.alpha * self.w[i, j]
                if t < mwi and t < self.mw[j]:
                    return False
        return True

    cdef void leaf(self, double cost) noexcept:
        self.total += 1
        if cost < self.min_cost:
            self.min_cost = cost
            self.snapshot(self.min_pairs)
        if self.check_stability and self.is_stable():
            self.stable_count += 1
            if cost > self.smax_cost:
                self.smax_cost = cost
                self.snapshot(self.smax_pairs)
            if cost < self.smin_cost:
                self.smin_cost = cost
                self.snapshot(self.smin_pairs)

    cdef void rec(self, double cost) noexcept:
        cdef Py_ssize_t i = -1, t, j, lo
        if not self.check_stability and cost >= self.min_cost:
            return
        for t in range(self.m):
            if self.partner[t] < 0:
                i = t
                break
        if i < 0:
            self.leaf(cost)
            return
        lo = self.half if self.bipartite else i + 1
        for j in range(lo, self.m):
            if self.partner[j] < 0:
                self.partner[i] = j
                self.partner[j] = i
                self.rec(cost + self.w[i, j])
                self.partner[i] = -1
                self.partner[j] = -1


def _pairs_from_flat(long long[::1] flat, Py_ssize_t m):
    if flat[0] < 0:
        return None
    out = []
    cdef Py_ssize_t i
    for i in range(m):
        if i < flat[i]:
            out.append((i, int(flat[i])))
    return out


def enumeration_scan(w, alpha, bipartite, check_stability):
    cdef _Enum e = _Enum(w, alpha, bipartite, check_stability)
    e.rec(0.0)
    min_pairs = _pairs_from_flat(e.min_pairs, e.m)
    smax_pairs = _pairs_from_flat(e.smax_pairs, e.m)
    smin_pairs = _pairs_from_flat(e.smin_pairs, e.m)
    return (
        int(e.total),
        float(e.min_cost),
        min_pairs,
        int(e.stable_count),
        float(e.smax_cost) if e.stable_count else None,
        smax_pairs,
        float(e.smin_cost) if e.stable_count else None,
        smin_pairs,
    )


cdef _greedy_core(double[::1] X, double[:, ::1] W, bint use_line,
                  long long[::1] eu, long long[::1] ev, double[::1] ew,
                  long long[::1] partner0, double alpha):
    cdef Py_ssize_t m = partner0.shape[0]
    cdef Py_ssize_t ne = eu.shape[0]
    cdef long long[::1] partner = partner0.copy()
    cdef double[::1] mw = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t idx, u, v, pu, pv
    cdef double t, created, d
    for u in range(m):
        if use_line:
            d = X[partner[u]] - X[u]
            mw[u] = d if d >= 0.0 else -d
        else:
            mw[u] = W[u, partner[u]]
    flips = []
    for idx in range(ne):
        u = eu[idx]
        v = ev[idx]
        pu = partner[u]
        if pu == v:
            continue
        t = alpha * ew[idx]
        if t < mw[u] and t < mw[v]:
            pv = partner[v]
            if use_line:
                d = X[pv] - X[pu]
                created = d if d >= 0.0 else -d
            else:
                created = W[pu, pv]
            partner[u] = v
            partner[v] = u
            partner[pu] = pv
            partner[pv] = pu
            mw[u] = ew[idx]
            mw[v] = ew[idx]
            mw[pu] = created
            mw[pv] = created
            flips.append((idx, u, v, pu, pv))
    out = np.asarray(flips, dtype=np.int64).reshape(-1, 5)
    return out, np.asarray(partner)


def greedy_pass_line(pos, eu, ev, ew, partner, alpha):
    cdef double[::1] X = np.ascontiguousarray(pos, dtype=np.float64)
    cdef double[:, ::1] W = np.empty((1, 1), dtype=np.float64)
    return _greedy_core(
        X, W, True,
        np.ascontiguousarray(eu, dtype=np.int64),
        np.ascontiguousarray(ev, dtype=np.int64),
        np.ascontiguousarray(ew, dtype=np.float64),
        np.ascontiguousarray(partner, dtype=np.int64),
        alpha,
    )


def greedy_pass_dense(w, eu, ev, ew, partner, alpha):
    cdef double[:, ::1] W = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[::1] X = np.empty(1, dtype=np.float64)
    return _greedy_core(
        X, W, False,
        np.ascontiguousarray(eu, dtype=np.int64),
        np.ascontiguousarray(ev, dtype=np.int64),
        np.ascontiguousarray(ew, dtype=np.float64),
        np.ascontiguousarray(partner, dtype=np.int64),
        alpha,
    )


def tree_effects(left, right, leaf_slot, leaf_weights, alpha):
    cdef long long[::1] L = np.ascontiguousarray(left, dtype=np.int64)
    cdef long long[::1] R = np.ascontiguousarray(right, dtype=np.int64)
    cdef long long[::1] S = np.ascontiguousarray(leaf_slot, dtype=np.int64)
    cdef double[:, ::1] LW = np.ascontiguousarray(leaf_weights, dtype=np.float64)
    cdef Py_ssize_t n = L.shape[0]
    cdef Py_ssize_t b = LW.shape[0]
    cdef double inv = 1.0 / alpha
    cdef double[:, ::1] wb = np.empty((n, b), dtype=np.float64)
    cdef Py_ssize_t i, k
    cdef long long li, ri
    cdef double x, y
    for i in range(n):
        li = L[i]
        if li < 0:
            for k in range(b):
                wb[i, k] = LW[k, S[i]]
        else:
            ri = R[i]
            for k in range(b):
                x = wb[li, k]
                y = wb[ri, k]
                wb[i, k] = x + y + inv * (x if x < y else y)
    leaf_sum_arr = np.zeros(b, dtype=np.float64)
    cdef double[::1] leaf_sum = leaf_sum_arr
    for i in range(n):
        if L[i] < 0:
            for k in range(b):
                leaf_sum[k] += LW[k, S[i]]
    return np.asarray(wb[n - 1]).copy(), leaf_sum_arr


def line_mc_trials(gaps, alpha):
    cdef double[:, ::1] G = np.ascontiguousarray(gaps, dtype=np.float64)
    cdef Py_ssize_t t = G.shape[0]
    cdef Py_ssize_t g = G.shape[1]
    cdef Py_ssize_t m = g + 1
    if m % 2 != 0 or m < 2:
        raise ValueError("gap matrix must describe an even vertex count")
    cdef double a = alpha
    ratio_arr = np.empty(t, dtype=np.float64)
    stable_arr = np.empty(t, dtype=bool)
    cdef double[::1] ratio = ratio_arr
    cdef cnp.uint8_t[::1] stable = stable_arr.view(np.uint8)
    cdef long long[::1] partner = np.empty(m, dtype=np.int64)
    cdef double[::1] pos = np.empty(m, dtype=np.float64)
    cdef double[::1] mw = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t k, i, j
    cdef double c_opt, c_m, d, w
    cdef bint bad
    partner[0] = m - 1
    partner[m - 1] = 0
    for i in range(1, m - 1, 2):
        partner[i] = i + 1
        partner[i + 1] = i
    for k in range(t):
        pos[0] = 0.0
        for i in range(g):
            pos[i + 1] = pos[i] + G[k, i]
        c_opt = 0.0
        for i in range(0, g, 2):
            c_opt += G[k, i]
        c_m = 0.0
        for i in range(1, g, 2):
            c_m += G[k, i]
        c_m = pos[m - 1] + c_m
        for i in range(m):
            d = pos[partner[i]] - pos[i]
            mw[i] = d if d >= 0.0 else -d
        bad = False
        for i in range(m):
            if bad:
                break
            for j in range(i + 1, m):
                if partner[i] == j:
                    continue
                w = a * (pos[j] - pos[i])
                if w < mw[i] and w < mw[j]:
                    bad = True
                    break
        ratio[k] = c_m / c_opt
        stable[k] = not bad
    return ratio_arr, stable_arr
