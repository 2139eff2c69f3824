"""Matching containers, enumeration, stability, and exact worst/best ratios,
checked against plain brute force."""

import math

import numpy as np
import pytest

import selfish_matching as sm

from _oracles import (
    all_matchings,
    bipartite_matchings,
    matching_cost,
    stable_matchings,
    unstable_edges,
)


def weight_fn(inst):
    return lambda a, b: inst.weight(a, b)


# -- containers ------------------------------------------------------------


def test_from_pairs_canonicalizes():
    m = sm.PerfectMatching.from_pairs([(3, 0), (2, 1)])
    assert m.pairs == ((0, 3), (1, 2))
    assert m.n_pairs == 2
    assert m.partner_of(0) == 3 and m.partner_of(2) == 1
    assert m.vertices() == frozenset({0, 1, 2, 3})


def test_from_pairs_rejects_overlap_and_self_loops():
    with pytest.raises(sm.ValidationError):
        sm.PerfectMatching.from_pairs([(0, 1), (1, 2)])
    with pytest.raises(sm.ValidationError):
        sm.PerfectMatching.from_pairs([(0, 0)])


def test_partner_array_roundtrip():
    m = sm.PerfectMatching.from_pairs([(0, 2), (1, 3)])
    arr = m.partner_array(4)
    assert arr.tolist() == [2, 3, 0, 1]
    assert sm.matching_from_partner(arr) == m


def test_matching_serialization_roundtrip():
    m = sm.PerfectMatching.from_pairs([(1, 2), (0, 3)])
    text = sm.serialize_matching(m)
    assert text == '{"pairs":[[0,3],[1,2]]}'
    assert sm.deserialize_matching(text) == m
    with pytest.raises(sm.ParseError):
        sm.deserialize_matching("[")
    with pytest.raises(sm.ValidationError):
        sm.deserialize_matching('{"pairs":[[0,1],[1,2]]}')


def test_cost_is_exact_on_integer_instances():
    inst = sm.gen_rt(3)
    c = sm.cost(inst, sm.consecutive_matching(inst))
    assert isinstance(c, int)
    assert c == 4


def test_cost_validates_coverage():
    inst = sm.gen_rt(3)
    with pytest.raises(sm.VertexMismatchError):
        sm.cost(inst, sm.PerfectMatching.from_pairs([(0, 1), (2, 3)]))
    bp = sm.gen_random_euclidean(2, seed=0, bipartite=True)
    same_side = sm.PerfectMatching.from_pairs([(0, 1), (2, 3)])
    with pytest.raises(sm.ValidationError):
        sm.cost(bp, same_side)


# -- reference matchings on lines -------------------------------------------


def test_consecutive_matching_pairs_neighbors():
    inst = sm.from_line([0.0, 0.1, 5.0, 5.1, 9.0, 9.2])
    assert sm.consecutive_matching(inst).pairs == ((0, 1), (2, 3), (4, 5))


def test_consecutive_requires_line_embedding():
    inst = sm.build_complete([[0, 1, 1, 2], [1, 0, 1, 1], [1, 1, 0, 1], [2, 1, 1, 0]])
    with pytest.raises(sm.NoEmbeddingError):
        sm.consecutive_matching(inst)
    with pytest.raises(sm.NoEmbeddingError):
        sm.line_pos_matching(inst)


def test_line_pos_matching_shape():
    # outer pair plus shifted-by-one inner neighbors
    inst = sm.from_line([0, 1, 2, 3, 6, 7, 8, 9])
    assert sm.line_pos_matching(inst).pairs == ((0, 7), (1, 2), (3, 4), (5, 6))
    two = sm.from_line([0.0, 1.0])
    assert sm.line_pos_matching(two).pairs == ((0, 1),)


@pytest.mark.parametrize("k", range(1, 9))
def test_rt_cost_formulas_exact_integers(k):
    inst = sm.gen_rt(k)
    c_opt = sm.cost(inst, sm.consecutive_matching(inst))
    c_pos = sm.cost(inst, sm.line_pos_matching(inst))
    assert c_opt == 2 ** (k - 1)
    assert c_pos == 2 * 3 ** (k - 1) - 2 ** (k - 1)


# -- enumeration -------------------------------------------------------------


def test_enumerate_counts_double_factorial_and_factorial():
    inst = sm.gen_random_euclidean(3, seed=1)
    assert len(list(sm.enumerate_perfect_matchings(inst))) == 15  # 5!!
    bp = sm.gen_random_euclidean(3, seed=1, bipartite=True)
    assert len(list(sm.enumerate_perfect_matchings(bp))) == 6  # 3!


def test_enumerate_is_lexicographic_and_exhaustive():
    inst = sm.gen_random_euclidean(3, seed=4)
    got = [m.pairs for m in sm.enumerate_perfect_matchings(inst)]
    want = list(all_matchings(range(6)))
    assert got == want


def test_enumeration_cap():
    inst = sm.gen_random_line(3, seed=0)
    with pytest.raises(sm.InstanceTooLargeError):
        list(sm.enumerate_perfect_matchings(inst, max_enum=2))
    with pytest.raises(sm.InstanceTooLargeError):
        sm.min_cost_matching(sm.gen_random_line(sm.DEFAULT_MAX_ENUM + 1, seed=0))


@pytest.mark.parametrize("seed", range(8))
def test_min_cost_matches_bruteforce(seed):
    inst = sm.gen_random_euclidean(3, seed=seed)
    got = sm.min_cost_matching(inst)
    w = weight_fn(inst)
    want = min(all_matchings(range(6)), key=lambda p: matching_cost(w, p))
    assert sm.cost(inst, got) == pytest.approx(matching_cost(w, want), rel=1e-12)


# -- stability ----------------------------------------------------------------


def test_stability_tie_is_stable():
    # alpha * w equal to a matched weight must NOT count as unstable
    inst = sm.from_line([0.0, 1.0, 2.0, 3.0])
    cons = sm.consecutive_matching(inst)
    assert sm.is_alpha_stable(inst, cons, 1.0)
    rep = sm.stability_report(inst, cons, 1.0)
    assert rep.unstable == ()
    assert rep.is_stable


def test_stability_strict_violation_detected():
    inst = sm.from_line([0.0, 10.0, 10.5, 21.0])
    m = sm.PerfectMatching.from_pairs([(0, 1), (2, 3)])
    rep = sm.stability_report(inst, m, 1.0)
    assert [(u, v) for u, v, *_ in rep.unstable] == [(1, 2)]
    assert not sm.is_alpha_stable(inst, m, 1.0)
    # a large enough alpha restores stability
    assert sm.is_alpha_stable(inst, m, 25.0)


def test_stability_alpha_below_one_rejected():
    inst = sm.gen_rt(2)
    with pytest.raises(sm.AlphaOutOfRangeError):
        sm.is_alpha_stable(inst, sm.consecutive_matching(inst), 0.5)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_stability_report_matches_definition(seed, alpha):
    inst = sm.gen_random_euclidean(3, seed=seed)
    w = weight_fn(inst)
    for pairs in all_matchings(range(6)):
        m = sm.PerfectMatching.from_pairs(pairs)
        rep = sm.stability_report(inst, m, alpha)
        got = [(u, v) for u, v, *_ in rep.unstable]
        assert got == unstable_edges(w, 6, pairs, alpha)


# -- exact worst/best stable ratios -------------------------------------------


def test_frozen_two_block_instance():
    inst = sm.gen_rt(2)
    costs = sorted(sm.cost(inst, m) for m in sm.enumerate_perfect_matchings(inst))
    assert costs == [2, 4, 4]

    poa, worst = sm.exact_poa(inst, 1.0)
    assert poa == pytest.approx(2.0)
    assert worst.pairs == ((0, 3), (1, 2))

    pos, best = sm.exact_pos(inst, 1.0)
    assert pos == pytest.approx(1.0)
    assert best.pairs == ((0, 1), (2, 3))

    assert sm.count_alpha_stable(inst, 1.0) == 2


@pytest.mark.parametrize("seed", range(6))
def test_exact_ratios_match_bruteforce(seed):
    inst = sm.gen_random_euclidean(3, seed=100 + seed)
    w = weight_fn(inst)
    alpha = (1.0, 2.0)[seed % 2]
    costs = {p: matching_cost(w, p) for p in all_matchings(range(6))}
    opt = min(costs.values())
    stable = stable_matchings(w, 6, alpha)
    assert stable, "ratio checks need at least one stable matching"

    poa, _ = sm.exact_poa(inst, alpha)
    pos, _ = sm.exact_pos(inst, alpha)
    assert poa == pytest.approx(max(costs[p] for p in stable) / opt, rel=1e-12)
    assert pos == pytest.approx(min(costs[p] for p in stable) / opt, rel=1e-12)
    assert sm.count_alpha_stable(inst, alpha) == len(stable)


def test_exact_ratios_bipartite():
    inst = sm.gen_random_euclidean(3, seed=42, bipartite=True)
    w = weight_fn(inst)
    costs = {p: matching_cost(w, p) for p in bipartite_matchings(3)}
    opt = min(costs.values())
    stable = stable_matchings(w, 6, 1.0, bipartite=True)
    poa, _ = sm.exact_poa(inst, 1.0)
    assert poa == pytest.approx(max(costs[p] for p in stable) / opt, rel=1e-12)


def test_alpha_widens_the_stable_set():
    # every 1-stable matching stays stable as alpha grows
    for seed in range(4):
        inst = sm.gen_random_euclidean(3, seed=seed)
        counts = [sm.count_alpha_stable(inst, a) for a in (1.0, 2.0, 4.0, 8.0)]
        assert counts == sorted(counts)
        assert counts[0] >= 1


def test_unique_stable_matching_on_spaced_family():
    for alpha in (1.0, 2.0, 4.0):
        inst = sm.gen_rt_alpha(3, alpha)
        assert sm.count_alpha_stable(inst, alpha) == 1


# -- symmetric difference ------------------------------------------------------


def test_alternating_cycles_of_disjoint_matchings():
    a = sm.PerfectMatching.from_pairs([(0, 1), (2, 3)])
    b = sm.PerfectMatching.from_pairs([(0, 3), (1, 2)])
    assert sm.alternating_cycles(a, b) == [[0, 1, 2, 3]]
    assert sm.alternating_cycles(a, a) == []


def test_alternating_cycles_mixed():
    a = sm.PerfectMatching.from_pairs([(0, 1), (2, 3), (4, 5), (6, 7)])
    b = sm.PerfectMatching.from_pairs([(0, 2), (1, 3), (4, 5), (6, 7)])
    cycles = sm.alternating_cycles(a, b)
    assert len(cycles) == 1
    assert sorted(cycles[0]) == [0, 1, 2, 3]
    # shared pairs never show up
    flat = {v for cyc in cycles for v in cyc}
    assert flat.isdisjoint({4, 5, 6, 7})


def test_alternating_cycles_require_same_vertex_set():
    a = sm.PerfectMatching.from_pairs([(0, 1)])
    b = sm.PerfectMatching.from_pairs([(0, 1), (2, 3)])
    with pytest.raises(sm.VertexMismatchError):
        sm.alternating_cycles(a, b)
