"""Flip forests, virtual weights, light depths, abstract trees, and the
bound-chain checks."""

import json
import math

import numpy as np
import pytest

import selfish_matching as sm

from _oracles import all_shapes, catalan, shape_wb


def one_flip_trace():
    inst = sm.gen_rt_alpha(2, 1.0, 0.01)
    return inst, sm.run_greedy(inst, sm.consecutive_matching(inst), 1.0)


# -- forest construction -------------------------------------------------------


def test_one_flip_forest_structure():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    assert forest.n_nodes == 3
    assert forest.roots == (2,)
    assert len(forest.leaves()) == 2

    leaf_a, leaf_b, root = forest.nodes
    assert (leaf_a.edge, leaf_b.edge, root.edge) == ((0, 1), (2, 3), (0, 3))
    assert root.children == (0, 1)
    assert leaf_a.wb == pytest.approx(1.0)
    assert leaf_b.wb == pytest.approx(1.0, rel=1e-12)
    assert root.wb == pytest.approx(3.0)
    assert root.weight == pytest.approx(2.99)
    # the lighter subtree hangs off the smaller virtual weight
    assert (leaf_a.lam, leaf_b.lam, root.lam) == (1, 0, 0)
    assert forest.root_of() == {0: 2, 1: 2, 2: 2}
    assert forest.root_virtual_sum() == pytest.approx(3.0)
    assert forest.leaf_virtual_sum() == pytest.approx(2.0)


def test_zero_flip_forest_is_all_singletons():
    inst = sm.gen_rt(3)
    trace = sm.run_greedy(inst, sm.consecutive_matching(inst), 1.0)
    forest = sm.build_forest(trace)
    assert trace.events == ()
    assert forest.roots == tuple(range(4))
    assert all(x.is_leaf for x in forest.nodes)
    for r in forest.roots:
        assert sm.effect(forest, root=r) == pytest.approx(1.0)


def test_multi_flip_forest_accounts_every_event():
    inst = sm.gen_rt_alpha(4, 2.0)
    trace = sm.run_greedy(inst, sm.consecutive_matching(inst), 2.0)
    forest = sm.build_forest(trace)
    n_leaves = len(forest.leaves())
    assert n_leaves == inst.n_pairs
    assert forest.n_nodes == n_leaves + len(trace.events)
    # children precede parents, so one upward sweep suffices
    for x in forest.nodes:
        assert all(c < x.id for c in x.children)


def test_forest_light_depths_mapping():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    assert sm.light_depths(forest) == {0: 1, 1: 0, 2: 0}


def test_effect_root_selection_guards():
    inst = sm.gen_rt(2)
    trace = sm.run_greedy(inst, sm.consecutive_matching(inst), 1.0)
    forest = sm.build_forest(trace)  # two singleton trees
    with pytest.raises(sm.ValidationError):
        sm.effect(forest)
    with pytest.raises(sm.ValidationError):
        sm.effect(forest, root=99)
    assert sm.effect(forest, root=forest.roots[0]) == pytest.approx(1.0)


def test_virtual_weights_reannotates_copy():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    redone = sm.virtual_weights(forest, 2.0)
    assert redone.alpha == 2.0
    # min child weight now only counts at half strength
    assert redone.nodes[2].wb == pytest.approx(2.5, rel=1e-12)
    assert forest.nodes[2].wb == pytest.approx(3.0)  # original untouched


# -- bound chain -----------------------------------------------------------------


def test_weight_bound_on_frozen_forest():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    report = sm.check_weight_bound(forest)
    assert report.passed
    assert report.checked == 3
    assert report.failures == ()


def test_weight_bound_flags_violations():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    forest.nodes[2].weight = 10.0
    report = sm.check_weight_bound(forest)
    assert not report.passed
    assert "node 2" in report.failures[0]


def test_decomposition_identity_on_frozen_forest():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    report = sm.check_decomposition_identities(forest)
    assert report.passed, report.failures
    # root weight splits into depth-scaled leaf contributions
    want = 2.0 ** 1 * forest.nodes[0].wb + 2.0 ** 0 * forest.nodes[1].wb
    assert forest.nodes[2].wb == pytest.approx(want, rel=1e-12)


def test_decomposition_flags_tampered_weights():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    forest.nodes[2].wb = 17.0
    report = sm.check_decomposition_identities(forest)
    assert not report.passed


def test_cost_bound_on_frozen_trace():
    _, trace = one_flip_trace()
    forest = sm.build_forest(trace)
    report = sm.forest_cost_bound(trace, forest)
    assert report.passed, report.failures
    assert report.c_opt == pytest.approx(2.0)
    assert report.c_final == pytest.approx(3.98, rel=1e-12)
    assert report.flipped_weight == pytest.approx(0.99)
    assert report.root_virtual_sum == pytest.approx(3.0)
    assert report.leaf_virtual_sum == pytest.approx(2.0)
    # final cost within twice the root virtual sum minus the optimum
    assert report.c_final <= 2 * report.root_virtual_sum - report.c_opt + 1e-9


def test_cost_bound_rejects_mismatched_forest():
    inst = sm.gen_rt_alpha(2, 1.0, 0.01)
    trace = sm.run_greedy(inst, sm.consecutive_matching(inst), 1.0)
    idle = sm.run_greedy(inst, sm.consecutive_matching(inst), 50.0)
    report = sm.forest_cost_bound(trace, sm.build_forest(idle))
    assert not report.passed
    assert "union" in report.failures[0]


@pytest.mark.parametrize("alpha", [1.0, 2.0, 4.0])
def test_bound_chain_on_random_traces(alpha):
    for seed in range(12):
        inst = sm.gen_random_line(7, seed=seed)
        trace = sm.run_greedy(inst, sm.consecutive_matching(inst), alpha)
        forest = sm.build_forest(trace)
        assert sm.check_weight_bound(forest).passed
        assert sm.check_decomposition_identities(forest).passed
        assert sm.forest_cost_bound(trace, forest).passed


# -- abstract trees ----------------------------------------------------------------


def test_balanced_tree_three_leaves():
    tree = sm.balanced_complete_tree(3, 1.0)
    assert tree.n_leaves == 3
    assert tree.n_nodes == 5
    # one shallow leaf at depth 1, two at depth 2, weights (2+1/a)^-depth
    weights = sorted(tree.leaf_weights.tolist())
    assert weights == pytest.approx([1 / 9, 1 / 9, 1 / 3])
    assert sm.effect(tree) == pytest.approx(9 / 5, rel=1e-12)
    assert sm.closed_form_effect(3, 1.0) == pytest.approx(9 / 5, rel=1e-12)


def test_balanced_tree_single_leaf():
    tree = sm.balanced_complete_tree(1, 2.0)
    assert tree.n_nodes == 1
    assert sm.effect(tree) == pytest.approx(1.0)
    assert sm.closed_form_effect(1, 2.0) == 1.0


def test_closed_form_values():
    assert sm.closed_form_effect(2, 1.0) == pytest.approx(3 / 2)
    assert sm.closed_form_effect(4, 1.0) == pytest.approx(9 / 4)
    assert sm.closed_form_effect(4, 2.0) == pytest.approx(1.5625)
    assert sm.closed_form_effect(5, 1.0) == pytest.approx(27 / 11, rel=1e-12)
    with pytest.raises(sm.ValidationError):
        sm.closed_form_effect(0, 1.0)
    with pytest.raises(sm.AlphaOutOfRangeError):
        sm.closed_form_effect(4, 0.5)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 8.0])
def test_balanced_tree_matches_closed_form(alpha):
    for n in list(range(1, 34)) + [100, 255, 256, 257]:
        got = sm.effect(sm.balanced_complete_tree(n, alpha))
        assert got == pytest.approx(sm.closed_form_effect(n, alpha), rel=1e-9)


def test_closed_form_monotone_in_n_and_alpha():
    for alpha in (1.0, 2.0):
        vals = [sm.closed_form_effect(n, alpha) for n in range(1, 65)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    by_alpha = [sm.closed_form_effect(8, a) for a in (1.0, 2.0, 4.0, 16.0)]
    assert all(b < a for a, b in zip(by_alpha, by_alpha[1:]))


def test_from_shape_two_leaves():
    tree = sm.from_shape((None, None), [1.0, 1.0], alpha=1.0)
    assert float(tree.wb()[tree.root]) == pytest.approx(3.0)
    tree = sm.from_shape((None, None), [1.0, 2.0], alpha=2.0)
    assert float(tree.wb()[tree.root]) == pytest.approx(3.5)
    assert sm.effect(tree) == pytest.approx(3.5 / 3.0, rel=1e-12)


def test_from_shape_light_depth_tiebreak():
    # equal-wb siblings: the smaller node id is the light one
    tree = sm.from_shape(((None, None), None), [1.0, 1.0, 1.0], alpha=1.0)
    assert tree.light_depths().tolist() == [1, 0, 0, 1, 0]


def test_from_shape_validation():
    with pytest.raises(sm.ValidationError):
        sm.from_shape((None, None, None))
    with pytest.raises(sm.ValidationError):
        sm.from_shape((None, None), [1.0])
    with pytest.raises(sm.ValidationError):
        sm.from_shape((None, None), [1.0, -2.0])


def test_from_shape_handles_deep_combs():
    shape = None
    for _ in range(2500):
        shape = (shape, None)
    tree = sm.from_shape(shape)
    assert tree.n_leaves == 2501
    assert sm.effect(tree) > 1.0


def test_effect_scale_invariant():
    rng = np.random.default_rng(31)
    for shape in list(all_shapes(5))[:10]:
        w = rng.uniform(0.1, 2.0, size=5)
        base = sm.effect(sm.from_shape(shape, w, alpha=2.0))
        scaled = sm.effect(sm.from_shape(shape, 1000.0 * w, alpha=2.0))
        assert scaled == pytest.approx(base, rel=1e-12)


def test_effect_zero_leaves_is_one():
    tree = sm.from_shape((None, (None, None)), [0.0, 0.0, 0.0])
    assert sm.effect(tree) == 1.0


def test_wb_matches_recursive_oracle():
    rng = np.random.default_rng(13)
    for n in range(1, 7):
        for shape in all_shapes(n):
            w = rng.uniform(0.0, 3.0, size=n)
            alpha = float(rng.choice([1.0, 2.0, 4.0]))
            tree = sm.from_shape(shape, w, alpha=alpha)
            assert float(tree.wb()[tree.root]) == pytest.approx(
                shape_wb(shape, w, alpha), rel=1e-12
            )


def test_tree_effects_batch_matches_scalar_effect():
    rng = np.random.default_rng(37)
    tree = sm.balanced_complete_tree(6, 2.0)
    rows = rng.uniform(0.0, 2.0, size=(8, 6))
    rows[3] = 0.0
    batch = sm.tree_effects_batch(tree, rows)
    for b in range(rows.shape[0]):
        single = sm.effect(
            sm.AbstractTree(tree.left, tree.right, tree.leaf_slot, rows[b], 2.0)
        )
        assert batch[b] == pytest.approx(single, rel=1e-12)


def test_decomposition_identities_on_abstract_trees():
    rng = np.random.default_rng(41)
    for shape in list(all_shapes(6))[::7]:
        tree = sm.from_shape(shape, rng.uniform(0.1, 1.0, size=6), alpha=2.0)
        report = sm.check_decomposition_identities(tree)
        assert report.passed, report.failures


# -- shape enumeration ---------------------------------------------------------------


def test_shape_counts_are_catalan():
    for n in range(1, 13):
        assert sm.count_tree_shapes(n) == catalan(n - 1)
    assert sm.count_tree_shapes(16) == catalan(15)
    assert sm.count_tree_shapes(17) == catalan(16)  # counting has no cap


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_is_complete_and_distinct(n):
    shapes = list(sm.enumerate_tree_shapes(n))
    assert len(shapes) == sm.count_tree_shapes(n)
    assert len(set(shapes)) == len(shapes)
    assert set(shapes) == set(all_shapes(n))


def test_enumeration_streams_past_memo_limit():
    gen = sm.enumerate_tree_shapes(13)
    first = [next(gen) for _ in range(5)]
    from _oracles import shape_leaf_count
    assert all(shape_leaf_count(s) == 13 for s in first)


def test_enumeration_cap():
    with pytest.raises(sm.NTooLargeError):
        list(sm.enumerate_tree_shapes(17))


# -- serialization ----------------------------------------------------------------------


def test_serialize_forest_golden():
    _, trace = one_flip_trace()
    text = sm.serialize_forest(sm.build_forest(trace))
    payload = json.loads(text)
    assert payload["alpha"] == 1.0
    (tree,) = payload["trees"]
    assert tree["edge"] == [0, 3]
    assert tree["lambda"] == 0
    assert tree["wb"] == pytest.approx(3.0)
    kids = tree["children"]
    assert [k["edge"] for k in kids] == [[0, 1], [2, 3]]
    assert [k["lambda"] for k in kids] == [1, 0]
    assert kids[0]["children"] == []


def test_serialize_tree_golden():
    text = sm.serialize_tree(sm.balanced_complete_tree(2, 1.0))
    assert json.loads(text) == {
        "alpha": 1.0,
        "tree": {
            "children": [
                {"children": [], "lambda": 1, "leaf_weight": 1 / 3, "wb": 1 / 3},
                {"children": [], "lambda": 0, "leaf_weight": 1 / 3, "wb": 1 / 3},
            ],
            "lambda": 0,
            "wb": pytest.approx(2 / 3 + 1 / 3),
        },
    }


def test_serialize_tree_deep_comb():
    shape = None
    for _ in range(2000):
        shape = (shape, None)
    text = sm.serialize_tree(sm.from_shape(shape))
    assert text.count("leaf_weight") == 2001
