"""Flip forests and abstract full binary trees with virtual weights.

A flip trace transcribes into a forest: every optimal-matching edge is a
leaf, every flip contributes an inner node for the edge it creates, with the
two removed edges as children.  Virtual weights follow the recursion
w_bar(x) = w_bar(y) + w_bar(z) + (1/alpha) * min(w_bar(y), w_bar(z)) and
upper-bound real edge weights; the checks here verify that bound, the
light-depth decomposition identity, and the cost bound they imply.  Abstract
trees carry the same recursion over free leaf weights, with the balanced
complete tree as the extremal shape.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from ._backend import kernels
from .errors import (
    InconsistentTraceError,
    NTooLargeError,
    ValidationError,
)
from .greedy import FlipTrace
from .matchings import _check_alpha, cost

_MAX_BALANCED_LEAVES = 1 << 20
_MAX_ENUM_LEAVES = 16
_SHAPE_MEMO_LIMIT = 12


def _slack(scale: float) -> float:
    return 1e-9 * max(1.0, abs(scale))


# -- flip forests ------------------------------------------------------------------


@dataclass
class ForestNode:
    """Node of a flip forest; children listed as (node for u's removed edge,
    node for v's removed edge).  Ids are creation-ordered, so children always
    precede their parent."""

    id: int
    edge: Tuple[int, int]
    weight: float
    children: Tuple[int, ...]
    wb: float = 0.0
    lam: int = 0

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class FlipForest:
    alpha: float
    nodes: Tuple[ForestNode, ...]
    roots: Tuple[int, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def leaves(self) -> Tuple[ForestNode, ...]:
        return tuple(x for x in self.nodes if x.is_leaf)

    def root_virtual_sum(self) -> float:
        return float(sum(self.nodes[r].wb for r in self.roots))

    def leaf_virtual_sum(self) -> float:
        return float(sum(x.wb for x in self.nodes if x.is_leaf))

    def root_of(self) -> Dict[int, int]:
        """Map node id -> id of the root of its tree."""
        out = {}
        for r in self.roots:
            out[r] = r
        for x in reversed(self.nodes):
            for ch in x.children:
                out[ch] = out[x.id]
        return out


def _annotate(nodes: List[ForestNode], roots: Tuple[int, ...], alpha: float):
    inv = 1.0 / alpha
    for x in nodes:
        if x.is_leaf:
            x.wb = x.weight
        else:
            wy = nodes[x.children[0]].wb
            wz = nodes[x.children[1]].wb
            x.wb = wy + wz + inv * min(wy, wz)
    for r in roots:
        nodes[r].lam = 0
    for x in reversed(nodes):
        if x.is_leaf:
            continue
        y, z = (nodes[c] for c in x.children)
        if (y.wb, y.edge) <= (z.wb, z.edge):
            light, heavy = y, z
        else:
            light, heavy = z, y
        light.lam = x.lam + 1
        heavy.lam = x.lam


def build_forest(trace: FlipTrace) -> FlipForest:
    """Transcribe a trace; leaves are the initial matching's edges, one inner
    node per event.  Annotated with virtual weights at trace.alpha."""
    alpha = _check_alpha(trace.alpha)
    instance = trace.instance
    nodes: List[ForestNode] = []
    active: Dict[Tuple[int, int], int] = {}
    for pair in trace.initial.pairs:
        nid = len(nodes)
        nodes.append(
            ForestNode(
                id=nid,
                edge=pair,
                weight=float(instance.weight(*pair)),
                children=(),
            )
        )
        active[pair] = nid
    for event in trace.events:
        y = active.pop(event.removed[0], None)
        z = active.pop(event.removed[1], None)
        if y is None or z is None:
            raise InconsistentTraceError(
                f"event at index {event.index} removes edges {event.removed} "
                "that are not active"
            )
        nid = len(nodes)
        nodes.append(
            ForestNode(
                id=nid,
                edge=event.created,
                weight=float(event.created_weight),
                children=(y, z),
            )
        )
        active[event.created] = nid
    roots = tuple(sorted(active.values()))
    _annotate(nodes, roots, alpha)
    return FlipForest(alpha=alpha, nodes=tuple(nodes), roots=roots)


def virtual_weights(
    obj: Union[FlipForest, "AbstractTree"], alpha: float
) -> Union[FlipForest, "AbstractTree"]:
    """Re-annotate with virtual weights and light depths at the given alpha;
    returns a new object, the input is left untouched."""
    alpha = _check_alpha(alpha)
    if isinstance(obj, AbstractTree):
        return AbstractTree(
            obj.left, obj.right, obj.leaf_slot, obj.leaf_weights, alpha
        )
    nodes = [
        ForestNode(id=x.id, edge=x.edge, weight=x.weight, children=x.children)
        for x in obj.nodes
    ]
    _annotate(nodes, obj.roots, alpha)
    return FlipForest(alpha=alpha, nodes=tuple(nodes), roots=obj.roots)


def light_depths(obj: Union[FlipForest, "AbstractTree"]):
    """Light depth per node: 0 at roots, +1 across each light link.  Returns
    {id: depth} for forests, an int array indexed by node for trees."""
    if isinstance(obj, AbstractTree):
        return obj.light_depths()
    return {x.id: x.lam for x in obj.nodes}


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    checked: int
    failures: Tuple[str, ...]


def check_weight_bound(forest: FlipForest) -> BoundReport:
    """Real edge weight never exceeds the node's virtual weight."""
    failures = []
    for x in forest.nodes:
        if x.weight > x.wb + _slack(x.wb):
            failures.append(
                f"node {x.id} edge {x.edge}: w={x.weight!r} exceeds wb={x.wb!r}"
            )
    return BoundReport(
        passed=not failures, checked=forest.n_nodes, failures=tuple(failures)
    )


def check_decomposition_identities(
    obj: Union[FlipForest, "AbstractTree"],
) -> BoundReport:
    """Per node x: wb(x) = sum over subtree leaves of
    (1+1/alpha)^(lam(leaf)-lam(x)) * wb(leaf), relative 1e-9; per leaf:
    wb(root) >= (2+1/alpha)^lam(leaf) * wb(leaf)."""
    if isinstance(obj, AbstractTree):
        nodes_wb = obj.wb()
        lam = obj.light_depths()
        n = nodes_wb.shape[0]
        children = [
            () if obj.left[i] < 0 else (int(obj.left[i]), int(obj.right[i]))
            for i in range(n)
        ]
        roots = (n - 1,)
        root_lookup = {i: n - 1 for i in range(n)}
        alpha = obj.alpha
        wb_of = lambda i: float(nodes_wb[i])
        lam_of = lambda i: int(lam[i])
        ids = range(n)
        is_leaf = [not children[i] for i in range(n)]
    else:
        children = [x.children for x in obj.nodes]
        roots = obj.roots
        root_lookup = obj.root_of()
        alpha = obj.alpha
        wb_of = lambda i: obj.nodes[i].wb
        lam_of = lambda i: obj.nodes[i].lam
        ids = range(obj.n_nodes)
        is_leaf = [x.is_leaf for x in obj.nodes]

    base = 1.0 + 1.0 / alpha
    failures = []
    checked = 0
    # S[x] accumulates sum of (1+1/alpha)^lam(leaf) * wb(leaf) over x's leaves;
    # valid because children precede parents in id order.
    s = {}
    for i in ids:
        if is_leaf[i]:
            s[i] = base ** lam_of(i) * wb_of(i)
        else:
            s[i] = s[children[i][0]] + s[children[i][1]]
        expected = s[i] * base ** (-lam_of(i))
        checked += 1
        if not math.isclose(wb_of(i), expected, rel_tol=1e-9, abs_tol=1e-12):
            failures.append(
                f"node {i}: wb={wb_of(i)!r} but leaf decomposition gives {expected!r}"
            )
    growth = 2.0 + 1.0 / alpha
    for i in ids:
        if not is_leaf[i]:
            continue
        rwb = wb_of(root_lookup[i])
        lhs = growth ** lam_of(i) * wb_of(i)
        checked += 1
        if lhs > rwb + _slack(rwb):
            failures.append(
                f"leaf {i}: (2+1/a)^{lam_of(i)} * wb = {lhs!r} exceeds root wb {rwb!r}"
            )
    return BoundReport(passed=not failures, checked=checked, failures=tuple(failures))


@dataclass(frozen=True)
class CostBoundReport:
    passed: bool
    c_opt: float
    c_final: float
    flipped_weight: float
    root_virtual_sum: float
    leaf_virtual_sum: float
    failures: Tuple[str, ...]


def forest_cost_bound(trace: FlipTrace, forest: FlipForest) -> CostBoundReport:
    """Final cost vs 2 * (root virtual sum) - c(M*), and the flipped-weight
    chain that proves it."""
    instance = trace.instance
    c_opt = float(cost(instance, trace.initial))
    c_final = float(cost(instance, trace.final))
    flipped = float(sum(event.weight for event in trace.events))
    root_sum = forest.root_virtual_sum()
    leaf_sum = forest.leaf_virtual_sum()
    failures = []
    final_edges = set(trace.final.pairs)
    accounted = {forest.nodes[r].edge for r in forest.roots}
    accounted.update(event.edge for event in trace.events)
    if accounted != final_edges:
        failures.append(
            "final matching is not the union of root edges and flipped edges"
        )
    if flipped > (root_sum - leaf_sum) + _slack(root_sum):
        failures.append(
            f"flipped weight {flipped!r} exceeds root-leaf virtual gap "
            f"{root_sum - leaf_sum!r}"
        )
    bound = 2.0 * root_sum - c_opt
    if c_final > bound + _slack(bound):
        failures.append(f"final cost {c_final!r} exceeds bound {bound!r}")
    return CostBoundReport(
        passed=not failures,
        c_opt=c_opt,
        c_final=c_final,
        flipped_weight=flipped,
        root_virtual_sum=root_sum,
        leaf_virtual_sum=leaf_sum,
        failures=tuple(failures),
    )


# -- abstract trees ----------------------------------------------------------------


class AbstractTree:
    """Full binary tree as flat arrays with children-before-parent ordering;
    the root is the last node.  `leaf_slot[i]` indexes into `leaf_weights`
    for leaves and is -1 on inner nodes."""

    def __init__(
        self,
        left: np.ndarray,
        right: np.ndarray,
        leaf_slot: np.ndarray,
        leaf_weights: np.ndarray,
        alpha: float = 1.0,
    ):
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.leaf_slot = np.asarray(leaf_slot, dtype=np.int64)
        self.leaf_weights = np.asarray(leaf_weights, dtype=np.float64)
        self.alpha = _check_alpha(alpha)
        n = self.left.shape[0]
        n_leaves = self.leaf_weights.shape[0]
        if n != 2 * n_leaves - 1:
            raise ValidationError(
                f"{n} nodes is not a full binary tree over {n_leaves} leaves"
            )
        if np.any(self.leaf_weights < 0):
            raise ValidationError("leaf weights must be non-negative")
        self._wb: Optional[np.ndarray] = None
        self._leaf_sum: Optional[float] = None

    @property
    def n_nodes(self) -> int:
        return self.left.shape[0]

    @property
    def n_leaves(self) -> int:
        return self.leaf_weights.shape[0]

    @property
    def root(self) -> int:
        return self.n_nodes - 1

    def is_leaf(self, i: int) -> bool:
        return self.left[i] < 0

    def wb(self) -> np.ndarray:
        if self._wb is None:
            inv = 1.0 / self.alpha
            out = np.zeros(self.n_nodes)
            for i in range(self.n_nodes):
                if self.left[i] < 0:
                    out[i] = self.leaf_weights[self.leaf_slot[i]]
                else:
                    x, y = out[self.left[i]], out[self.right[i]]
                    out[i] = x + y + inv * min(x, y)
            self._wb = out
        return self._wb

    def leaf_sum(self) -> float:
        if self._leaf_sum is None:
            order = self.leaf_slot[self.leaf_slot >= 0]
            self._leaf_sum = float(self.leaf_weights[order].sum())
        return self._leaf_sum

    def light_depths(self) -> np.ndarray:
        """Tie between equal-wb siblings designates the smaller node id light."""
        wb = self.wb()
        lam = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes - 1, -1, -1):
            if self.left[i] < 0:
                continue
            lo, hi = int(self.left[i]), int(self.right[i])
            light = lo if wb[lo] <= wb[hi] else hi
            heavy = hi if light == lo else lo
            lam[light] = lam[i] + 1
            lam[heavy] = lam[i]
        return lam


def effect(obj: Union[AbstractTree, FlipForest], root: Optional[int] = None) -> float:
    """Root virtual weight over total leaf virtual weight, 1 when the leaf sum
    is zero.  For a forest, `root` selects the tree (optional when single)."""
    if isinstance(obj, AbstractTree):
        root_wb, leaf_sum = kernels.tree_effects(
            obj.left, obj.right, obj.leaf_slot,
            np.ascontiguousarray(obj.leaf_weights[None, :]), obj.alpha,
        )
        if leaf_sum[0] == 0.0:
            return 1.0
        return float(root_wb[0] / leaf_sum[0])
    if root is None:
        if len(obj.roots) != 1:
            raise ValidationError(
                f"forest has {len(obj.roots)} trees; pass root= to pick one"
            )
        root = obj.roots[0]
    if root not in obj.roots:
        raise ValidationError(f"node {root} is not a root")
    in_tree = np.zeros(obj.n_nodes, dtype=bool)
    in_tree[root] = True
    leaf_total = 0.0
    for x in reversed(obj.nodes):
        if not in_tree[x.id]:
            continue
        if x.is_leaf:
            leaf_total += x.wb
        else:
            in_tree[list(x.children)] = True
    if leaf_total == 0.0:
        return 1.0
    return obj.nodes[root].wb / leaf_total


def closed_form_effect(n_leaves: int, alpha: float) -> float:
    """(2+1/a)^h / (2^h + k/a) with h = ceil(log2 n) and k = 2^h - n."""
    alpha = _check_alpha(alpha)
    if n_leaves < 1:
        raise ValidationError(f"need at least one leaf, got {n_leaves}")
    h = (n_leaves - 1).bit_length()
    k = (1 << h) - n_leaves
    return (2.0 + 1.0 / alpha) ** h / (2.0 ** h + k / alpha)


def balanced_complete_tree(n_leaves: int, alpha: float = 1.0) -> AbstractTree:
    """Complete full binary tree whose leaf at depth d weighs (2+1/a)^(-d),
    making every sibling pair virtually balanced and the root weight 1."""
    alpha = _check_alpha(alpha)
    if n_leaves < 1:
        raise ValidationError(f"need at least one leaf, got {n_leaves}")
    if n_leaves > _MAX_BALANCED_LEAVES:
        raise NTooLargeError(
            f"{n_leaves} leaves exceeds the {_MAX_BALANCED_LEAVES} limit"
        )
    # Level-synchronous construction: level j holds the subtree sizes obtained
    # by splitting each size-m >= 2 node of level j-1 into ceil/floor halves.
    levels = [np.array([n_leaves], dtype=np.int64)]
    while True:
        t = levels[-1][levels[-1] >= 2]
        if t.shape[0] == 0:
            break
        nxt = np.empty(2 * t.shape[0], dtype=np.int64)
        nxt[0::2] = (t + 1) // 2
        nxt[1::2] = t // 2
        levels.append(nxt)
    n_nodes = 2 * n_leaves - 1
    left = np.full(n_nodes, -1, dtype=np.int64)
    right = np.full(n_nodes, -1, dtype=np.int64)
    leaf_slot = np.full(n_nodes, -1, dtype=np.int64)
    leaf_weights = np.empty(n_leaves)
    # Ids blocked per level, deepest level first, so children precede parents.
    starts = np.concatenate(
        ([0], np.cumsum([lv.shape[0] for lv in reversed(levels)])[:-1])
    )
    ids = [
        np.arange(s, s + lv.shape[0], dtype=np.int64)
        for s, lv in zip(starts[::-1], levels)
    ]
    q = 2.0 + 1.0 / alpha
    slot = 0
    for j, sizes in enumerate(levels):
        inner = sizes >= 2
        if inner.any():
            left[ids[j][inner]] = ids[j + 1][0::2]
            right[ids[j][inner]] = ids[j + 1][1::2]
        n_leaf_here = int((~inner).sum())
        if n_leaf_here:
            leaf_slot[ids[j][~inner]] = np.arange(slot, slot + n_leaf_here)
            leaf_weights[slot : slot + n_leaf_here] = q ** (-j)
            slot += n_leaf_here
    return AbstractTree(left, right, leaf_slot, leaf_weights, alpha)


def from_shape(
    shape, leaf_weights=None, alpha: float = 1.0
) -> AbstractTree:
    """Build a tree from a nested-pair shape: a leaf is None, an inner node is
    (left_shape, right_shape).  Leaf slots number leaves left to right."""
    left_list: List[int] = []
    right_list: List[int] = []
    slot_list: List[int] = []
    n_leaves = 0

    # Explicit post-order stack; shapes can nest arbitrarily deep (comb trees).
    stack: List[tuple] = [(shape, False)]
    results: List[int] = []
    while stack:
        node, expanded = stack.pop()
        if node is None:
            left_list.append(-1)
            right_list.append(-1)
            slot_list.append(n_leaves)
            n_leaves += 1
            results.append(len(left_list) - 1)
            continue
        if not (isinstance(node, tuple) and len(node) == 2):
            raise ValidationError(f"malformed shape node: {node!r}")
        if expanded:
            b = results.pop()
            a = results.pop()
            left_list.append(a)
            right_list.append(b)
            slot_list.append(-1)
            results.append(len(left_list) - 1)
        else:
            stack.append((node, True))
            stack.append((node[1], False))
            stack.append((node[0], False))
    if leaf_weights is None:
        leaf_weights = np.ones(n_leaves)
    leaf_weights = np.asarray(leaf_weights, dtype=np.float64)
    if leaf_weights.shape != (n_leaves,):
        raise ValidationError(
            f"shape has {n_leaves} leaves but got {leaf_weights.shape} weights"
        )
    return AbstractTree(
        np.array(left_list, dtype=np.int64),
        np.array(right_list, dtype=np.int64),
        np.array(slot_list, dtype=np.int64),
        leaf_weights,
        alpha,
    )


_shape_memo: Dict[int, tuple] = {1: (None,)}


def count_tree_shapes(n_leaves: int) -> int:
    """Catalan(n-1)."""
    if n_leaves < 1:
        raise ValidationError(f"need at least one leaf, got {n_leaves}")
    m = n_leaves - 1
    return math.comb(2 * m, m) // (m + 1)


def enumerate_tree_shapes(n_leaves: int) -> Iterator:
    """All full binary tree shapes with the given number of leaves, as nested
    pairs, in a fixed deterministic order.  Shapes for small leaf counts are
    memoized; larger ones stream without being stored."""
    if n_leaves < 1:
        raise ValidationError(f"need at least one leaf, got {n_leaves}")
    if n_leaves > _MAX_ENUM_LEAVES:
        raise NTooLargeError(
            f"{n_leaves} leaves exceeds the {_MAX_ENUM_LEAVES} enumeration limit"
        )
    if n_leaves <= _SHAPE_MEMO_LIMIT:
        for m in range(2, n_leaves + 1):
            if m not in _shape_memo:
                _shape_memo[m] = tuple(
                    (l, r)
                    for i in range(1, m)
                    for l in _shape_memo[i]
                    for r in _shape_memo[m - i]
                )
        return iter(_shape_memo[n_leaves])

    def gen(m: int) -> Iterator:
        if m <= _SHAPE_MEMO_LIMIT:
            yield from enumerate_tree_shapes(m)
            return
        for i in range(1, m):
            for l in gen(i):
                for r in gen(m - i):
                    yield (l, r)

    return gen(n_leaves)


def tree_effects_batch(tree: AbstractTree, weight_rows: np.ndarray) -> np.ndarray:
    """Effect of the tree's shape under many leaf-weight vectors at once;
    rows of shape (batch, n_leaves)."""
    weight_rows = np.ascontiguousarray(weight_rows, dtype=np.float64)
    if weight_rows.ndim != 2 or weight_rows.shape[1] != tree.n_leaves:
        raise ValidationError(
            f"weight rows must be (batch, {tree.n_leaves}), got {weight_rows.shape}"
        )
    if np.any(weight_rows < 0):
        raise ValidationError("leaf weights must be non-negative")
    root_wb, leaf_sum = kernels.tree_effects(
        tree.left, tree.right, tree.leaf_slot, weight_rows, tree.alpha
    )
    out = np.ones(weight_rows.shape[0])
    np.divide(root_wb, leaf_sum, out=out, where=leaf_sum > 0)
    return out


# -- serialization -----------------------------------------------------------------


def _dumps_deep(payload, depth_hint: int) -> str:
    limit = sys.getrecursionlimit()
    needed = 4 * depth_hint + 200
    if needed > limit:
        sys.setrecursionlimit(needed)
    try:
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))
    finally:
        if needed > limit:
            sys.setrecursionlimit(limit)


def serialize_forest(forest: FlipForest) -> str:
    objs: List[dict] = []
    for x in forest.nodes:
        obj = {
            "edge": list(x.edge),
            "w": x.weight,
            "wb": x.wb,
            "lambda": x.lam,
            "children": [objs[c] for c in x.children],
        }
        objs.append(obj)
    payload = {
        "alpha": forest.alpha,
        "trees": [objs[r] for r in forest.roots],
    }
    depth = forest.n_nodes + 2
    return _dumps_deep(payload, depth)


def serialize_tree(tree: AbstractTree) -> str:
    wb = tree.wb()
    lam = tree.light_depths()
    objs: List[dict] = []
    for i in range(tree.n_nodes):
        obj = {"wb": float(wb[i]), "lambda": int(lam[i])}
        if tree.is_leaf(i):
            obj["leaf_weight"] = float(tree.leaf_weights[tree.leaf_slot[i]])
            obj["children"] = []
        else:
            obj["children"] = [objs[int(tree.left[i])], objs[int(tree.right[i])]]
        objs.append(obj)
    payload = {"alpha": tree.alpha, "tree": objs[tree.root]}
    return _dumps_deep(payload, tree.n_nodes + 2)
