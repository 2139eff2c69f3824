"""Brute-force reference implementations the tests compare against.

Everything here is deliberately naive: plain loops, recursion, and exact
Fraction arithmetic where it helps.  Independence from the library code is
the point, not speed.
"""

from fractions import Fraction
import itertools
import math


def all_matchings(vertices):
    """Yield every perfect matching of the vertex list as sorted (u, v) pairs."""
    vs = sorted(vertices)
    if not vs:
        yield ()
        return
    u = vs[0]
    for v in vs[1:]:
        rest = [x for x in vs[1:] if x != v]
        for tail in all_matchings(rest):
            yield ((u, v),) + tail


def bipartite_matchings(n_pairs):
    """Perfect matchings of K_{n,n}; left side 0..n-1, right side n..2n-1."""
    left = range(n_pairs)
    for perm in itertools.permutations(range(n_pairs, 2 * n_pairs)):
        yield tuple(sorted(zip(left, perm)))


def matching_cost(weight, pairs):
    return sum(weight(u, v) for u, v in pairs)


def unstable_edges(weight, n, pairs, alpha, bipartite=False):
    """Edges outside the matching whose alpha-scaled weight is strictly below
    both endpoints' matched weights.  Definition-level, lexicographic order."""
    mate = {}
    for u, v in pairs:
        mate[u] = v
        mate[v] = u
    half = n // 2
    out = []
    for u in range(n):
        for v in range(u + 1, n):
            if mate[u] == v:
                continue
            if bipartite and not (u < half <= v):
                continue
            t = alpha * weight(u, v)
            if t < weight(u, mate[u]) and t < weight(v, mate[v]):
                out.append((u, v))
    return out


def stable_matchings(weight, n, alpha, bipartite=False):
    gen = bipartite_matchings(n // 2) if bipartite else all_matchings(range(n))
    return [
        pairs
        for pairs in gen
        if not unstable_edges(weight, n, pairs, alpha, bipartite)
    ]


def rt_position(i):
    """Closed form for the i-th point of the doubling line construction:
    bit j >= 1 contributes 2 * 3^(j-1), bit 0 contributes 1."""
    pos = i & 1
    j = 1
    while i >> j:
        if (i >> j) & 1:
            pos += 2 * 3 ** (j - 1)
        j += 1
    return pos


def rt_alpha_positions(k, alpha, eps):
    """Exact Fraction recurrence: duplicate the block, shift the copy by the
    block span times (2 + 1/alpha - eps)... minus the span itself as the gap."""
    a = Fraction(alpha)
    e = Fraction(eps)
    pts = [Fraction(0), Fraction(1)]
    for _ in range(k - 1):
        span = pts[-1] - pts[0]
        shift = span + (1 / a - e) * span
        pts = pts + [p + shift for p in pts]
    return pts


def triangle_violation(weight, n, slack=0.0):
    """First (i, j, k) with w(i,j) > w(i,k) + w(k,j) + slack, or None."""
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) < 3:
                    continue
                if weight(i, j) > weight(i, k) + weight(k, j) + slack:
                    return (i, j, k)
    return None


def catalan(m):
    return math.comb(2 * m, m) // (m + 1)


def shape_wb(shape, weights, alpha):
    """Virtual weight of a nested-tuple tree shape (None = leaf), consuming
    leaf weights left to right."""
    it = iter(weights)

    def rec(s):
        if s is None:
            return next(it)
        x = rec(s[0])
        y = rec(s[1])
        return x + y + min(x, y) / alpha

    return rec(shape)


def shape_leaf_count(shape):
    if shape is None:
        return 1
    return shape_leaf_count(shape[0]) + shape_leaf_count(shape[1])


def all_shapes(m):
    """Every full binary tree shape with m leaves as nested tuples."""
    if m == 1:
        yield None
        return
    for lsize in range(1, m):
        for l in all_shapes(lsize):
            for r in all_shapes(m - lsize):
                yield (l, r)
