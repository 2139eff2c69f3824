"""Compare the compiled kernels against the pure-numpy fallback.

Runs each hot kernel on a representative workload with both backends and
prints a table of best-of-N wall times.  Usage:

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from selfish_matching import _kernels_py as kpy

try:
    from selfish_matching import _kernels as kc
except ImportError:
    kc = None

import selfish_matching as sm


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    rng = np.random.default_rng(0)

    # dense instability scan: 400 vertices, every off-matching pair checked
    n = 400
    pts = rng.uniform(0.0, 1.0, size=(n, 2))
    w = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(w, 0.0)
    perm = rng.permutation(n)
    partner = np.empty(n, dtype=np.int64)
    partner[perm[0::2]] = perm[1::2]
    partner[perm[1::2]] = perm[0::2]
    yield "unstable_edges_dense", (w, partner, 1.0, False, -1)

    # line instability scan: 20000 positions
    m = 20000
    pos = np.cumsum(rng.uniform(0.05, 1.0, size=m))
    lpart = np.arange(m, dtype=np.int64)
    lpart[0::2] += 1
    lpart[1::2] -= 1
    yield "unstable_edges_line", (pos, lpart, 1.0, -1)

    # exhaustive matching enumeration: 7 pairs, 135135 matchings
    inst = sm.gen_random_euclidean(7, seed=3)
    yield "enumeration_scan", (inst.weight_matrix(), 1.0, False, True)

    # greedy pass over the full sorted edge list of a 600-pair line
    line = sm.gen_random_line(600, seed=4)
    lp = line.positions_array()
    eu, ev, ew = sm.sorted_edge_list(line)
    gpart = np.arange(1200, dtype=np.int64)
    gpart[0::2] += 1
    gpart[1::2] -= 1
    yield "greedy_pass_line", (lp, eu, ev, ew, gpart, 1.0)

    # batched virtual-weight evaluation: 4096-leaf balanced tree, 200 rows
    tree = sm.balanced_complete_tree(4096, 1.0)
    weights = rng.uniform(0.1, 1.0, size=(200, 4096))
    yield "tree_effects", (tree.left, tree.right, tree.leaf_slot, weights, 1.0)

    # Monte Carlo line ratios: 200000 trials on 8 vertices
    gaps = rng.uniform(0.01, 1.0, size=(200000, 7))
    yield "line_mc_trials", (gaps, 1.0)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3, help="best of N runs")
    opts = parser.parse_args(argv)

    if kc is None:
        print("compiled extension not built; timing the python backend only")

    rows = []
    for name, args in workloads():
        t_py = bench(getattr(kpy, name), args, opts.repeat)
        if kc is not None:
            t_c = bench(getattr(kc, name), args, opts.repeat)
            rows.append((name, t_py, t_c, t_py / t_c))
        else:
            rows.append((name, t_py, None, None))

    print(f"{'kernel':24s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, t_py, t_c, ratio in rows:
        if t_c is None:
            print(f"{name:24s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
        else:
            print(
                f"{name:24s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms {ratio:7.1f}x"
            )


if __name__ == "__main__":
    main()
