"""Perfect matchings: cost, stability, and exact optima by exhaustive scan.

A matching edge (u, v) not in M is alpha-unstable when alpha * w(u,v) is
strictly below the weight of both endpoints' current matched edges; both
endpoints would then defect.  Ties are stable on purpose: the comparison is
an exact float `<` with no tolerance.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ._backend import kernels
from .errors import (
    AlphaOutOfRangeError,
    InstanceTooLargeError,
    NoEmbeddingError,
    NoStableMatchingError,
    ParseError,
    ValidationError,
    VertexMismatchError,
)
from .instances import InstanceKind, MetricInstance

# Exhaustive enumeration visits (2n-1)!! matchings (n! bipartite); the default
# vertex cap keeps that around 2e6.
DEFAULT_MAX_ENUM = 16


@dataclass(frozen=True)
class PerfectMatching:
    """Canonical form: every pair is (min, max) and pairs sort by first entry."""

    pairs: Tuple[Tuple[int, int], ...]

    @staticmethod
    def from_pairs(pairs) -> "PerfectMatching":
        canon = tuple(sorted((min(a, b), max(a, b)) for a, b in pairs))
        seen = set()
        for a, b in canon:
            if a == b:
                raise ValidationError(f"self-loop ({a},{b}) is not a matching edge")
            for t in (a, b):
                if t < 0:
                    raise ValidationError(f"negative vertex id {t}")
                if t in seen:
                    raise ValidationError(f"vertex {t} appears in more than one pair")
                seen.add(t)
        return PerfectMatching(canon)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def vertices(self) -> frozenset:
        return frozenset(v for p in self.pairs for v in p)

    def partner_array(self, n_vertices: int) -> np.ndarray:
        """Dense partner lookup; raises VertexMismatch unless the matching
        covers exactly 0..n_vertices-1."""
        partner = np.full(n_vertices, -1, dtype=np.int64)
        for a, b in self.pairs:
            if b >= n_vertices:
                raise VertexMismatchError(
                    f"vertex {b} out of range for {n_vertices} vertices"
                )
            partner[a] = b
            partner[b] = a
        if len(self.pairs) * 2 != n_vertices:
            raise VertexMismatchError(
                f"matching covers {2 * len(self.pairs)} vertices, instance has {n_vertices}"
            )
        return partner

    def partner_of(self, v: int) -> int:
        for a, b in self.pairs:
            if a == v:
                return b
            if b == v:
                return a
        raise VertexMismatchError(f"vertex {v} not covered")


def matching_from_partner(partner) -> PerfectMatching:
    pairs = tuple(
        (i, int(p)) for i, p in enumerate(partner) if i < p
    )
    return PerfectMatching(pairs)


def cost(instance: MetricInstance, matching: PerfectMatching):
    """Total weight; summed in canonical pair order.  Exact (int) on integer
    line embeddings."""
    matching.partner_array(instance.n_vertices)  # validates coverage
    total = 0
    for a, b in matching.pairs:
        if not instance.has_edge(a, b):
            raise ValidationError(f"pair ({a},{b}) is not an edge of this instance")
        total = total + instance.weight(a, b)
    return total


# -- enumeration ---------------------------------------------------------------


def _check_enum_size(instance: MetricInstance, max_enum: Optional[int]) -> None:
    cap = DEFAULT_MAX_ENUM if max_enum is None else max_enum
    if instance.n_vertices > cap:
        raise InstanceTooLargeError(
            f"{instance.n_vertices} vertices exceeds the enumeration cap {cap}; "
            "raise max_enum to override"
        )


def enumerate_perfect_matchings(
    instance: MetricInstance, max_enum: Optional[int] = None
) -> Iterator[PerfectMatching]:
    """All perfect matchings in lexicographic order of their canonical form.

    (2n-1)!! of them on complete instances, n! on bipartite ones.
    """
    _check_enum_size(instance, max_enum)
    m = instance.n_vertices
    half = m // 2
    if instance.kind is InstanceKind.BIPARTITE:
        right = range(half, m)
        for perm in itertools.permutations(right):
            yield PerfectMatching(tuple((i, perm[i]) for i in range(half)))
        return

    partner = [-1] * m

    def rec():
        i = -1
        for t in range(m):
            if partner[t] < 0:
                i = t
                break
        if i < 0:
            yield matching_from_partner(partner)
            return
        for j in range(i + 1, m):
            if partner[j] < 0:
                partner[i] = j
                partner[j] = i
                yield from rec()
                partner[i] = -1
                partner[j] = -1

    yield from rec()


def min_cost_matching(
    instance: MetricInstance, max_enum: Optional[int] = None
) -> PerfectMatching:
    """Exhaustive minimum; ties resolve to the lexicographically smallest."""
    _check_enum_size(instance, max_enum)
    scan = kernels.enumeration_scan(
        instance.weight_matrix(),
        1.0,
        instance.kind is InstanceKind.BIPARTITE,
        False,
    )
    return PerfectMatching(tuple(tuple(p) for p in scan[2]))


def consecutive_matching(instance: MetricInstance) -> PerfectMatching:
    """Pairs (x1,x2), (x3,x4), ...; minimum-cost on any line instance."""
    if not instance.is_line:
        raise NoEmbeddingError("consecutive_matching needs a line embedding")
    m = instance.n_vertices
    return PerfectMatching(tuple((i, i + 1) for i in range(0, m, 2)))


def line_pos_matching(instance: MetricInstance) -> PerfectMatching:
    """The long-edge pairing: (x2,x3), (x4,x5), ..., plus (x1, x_{2n}).

    Degenerates to the single edge (x1, x2) when n = 1.
    """
    if not instance.is_line:
        raise NoEmbeddingError("line_pos_matching needs a line embedding")
    m = instance.n_vertices
    if m == 2:
        return PerfectMatching(((0, 1),))
    pairs = [(0, m - 1)] + [(i, i + 1) for i in range(1, m - 2, 2)]
    return PerfectMatching(tuple(sorted(pairs)))


# -- stability -----------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    alpha: float
    unstable: Tuple[Tuple[int, int, float, float, float], ...]

    @property
    def is_stable(self) -> bool:
        return not self.unstable

    def payload(self) -> dict:
        return {
            "alpha": self.alpha,
            "unstable": [list(entry) for entry in self.unstable],
        }


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 1.0:
        raise AlphaOutOfRangeError(f"alpha must be >= 1, got {alpha}")
    return alpha


def _unstable_pairs(instance, partner, alpha, limit=-1):
    if instance.is_line:
        return kernels.unstable_edges_line(
            instance.positions_array(), partner, alpha, limit
        )
    return kernels.unstable_edges_dense(
        instance.weight_matrix(),
        partner,
        alpha,
        instance.kind is InstanceKind.BIPARTITE,
        limit,
    )


def stability_report(
    instance: MetricInstance, matching: PerfectMatching, alpha: float
) -> StabilityReport:
    """All alpha-unstable non-matching edges, lexicographic, with the three
    weights that witnessed each violation."""
    alpha = _check_alpha(alpha)
    partner = matching.partner_array(instance.n_vertices)
    edges = _unstable_pairs(instance, partner, alpha)
    entries = []
    for u, v in edges:
        u, v = int(u), int(v)
        entries.append(
            (
                u,
                v,
                float(instance.weight(u, v)),
                float(instance.weight(u, int(partner[u]))),
                float(instance.weight(v, int(partner[v]))),
            )
        )
    return StabilityReport(alpha=alpha, unstable=tuple(entries))


def is_alpha_stable(
    instance: MetricInstance, matching: PerfectMatching, alpha: float
) -> bool:
    alpha = _check_alpha(alpha)
    partner = matching.partner_array(instance.n_vertices)
    return _unstable_pairs(instance, partner, alpha, limit=1).shape[0] == 0


# -- alternating structure ------------------------------------------------------


def alternating_cycles(
    optimal: PerfectMatching, candidate: PerfectMatching
) -> List[List[int]]:
    """Vertex-disjoint cycles covering the symmetric difference.

    Each cycle starts at its smallest vertex, oriented toward that vertex's
    optimal-matching partner; cycles are ordered by smallest vertex.
    """
    po = {}
    for a, b in optimal.pairs:
        po[a] = b
        po[b] = a
    pc = {}
    for a, b in candidate.pairs:
        pc[a] = b
        pc[b] = a
    if set(po) != set(pc):
        raise VertexMismatchError("matchings cover different vertex sets")
    cycles = []
    seen = set()
    for start in sorted(po):
        if start in seen or po[start] == pc[start]:
            continue
        cycle = []
        v = start
        use_optimal = True
        while True:
            cycle.append(v)
            seen.add(v)
            v = po[v] if use_optimal else pc[v]
            use_optimal = not use_optimal
            if v == start:
                break
        cycles.append(cycle)
    return cycles


# -- exact optima over stable matchings -----------------------------------------


def _stable_scan(instance, alpha, max_enum):
    alpha = _check_alpha(alpha)
    _check_enum_size(instance, max_enum)
    scan = kernels.enumeration_scan(
        instance.weight_matrix(),
        alpha,
        instance.kind is InstanceKind.BIPARTITE,
        True,
    )
    if scan[3] == 0:
        raise NoStableMatchingError(
            f"no {alpha}-stable perfect matching found (is the instance metric?)"
        )
    return scan


def exact_poa(
    instance: MetricInstance, alpha: float, max_enum: Optional[int] = None
) -> Tuple[float, PerfectMatching]:
    """Worst stable-to-optimal cost ratio, with the witness matching."""
    scan = _stable_scan(instance, alpha, max_enum)
    witness = PerfectMatching(tuple(tuple(p) for p in scan[5]))
    return scan[4] / scan[1], witness


def exact_pos(
    instance: MetricInstance, alpha: float, max_enum: Optional[int] = None
) -> Tuple[float, PerfectMatching]:
    """Best stable-to-optimal cost ratio, with the witness matching."""
    scan = _stable_scan(instance, alpha, max_enum)
    witness = PerfectMatching(tuple(tuple(p) for p in scan[7]))
    return scan[6] / scan[1], witness


def count_alpha_stable(
    instance: MetricInstance, alpha: float, max_enum: Optional[int] = None
) -> int:
    alpha = _check_alpha(alpha)
    _check_enum_size(instance, max_enum)
    scan = kernels.enumeration_scan(
        instance.weight_matrix(),
        alpha,
        instance.kind is InstanceKind.BIPARTITE,
        True,
    )
    return scan[3]


# -- sorted edge list (shared by the greedy pass) --------------------------------


def sorted_edge_list(instance: MetricInstance):
    """All present edges sorted by (weight, min endpoint, max endpoint).

    Returns (eu, ev, ew) aligned int64/int64/float64 arrays.
    """
    m = instance.n_vertices
    if instance.kind is InstanceKind.BIPARTITE:
        half = m // 2
        eu = np.repeat(np.arange(half, dtype=np.int64), half)
        ev = np.tile(np.arange(half, m, dtype=np.int64), half)
        ew = instance.weight_matrix()[eu, ev]
    else:
        iu, jv = np.triu_indices(m, 1)
        eu = iu.astype(np.int64)
        ev = jv.astype(np.int64)
        if instance.is_line:
            p = instance.positions_array()
            ew = p[ev] - p[eu]
        else:
            ew = instance.weight_matrix()[eu, ev]
    order = np.lexsort((ev, eu, ew))
    return eu[order], ev[order], ew[order]


# -- serialization ---------------------------------------------------------------


def serialize_matching(matching: PerfectMatching) -> str:
    return json.dumps(
        {"pairs": [list(p) for p in matching.pairs]},
        sort_keys=True,
        separators=(",", ":"),
    )


def matching_from_payload(payload) -> PerfectMatching:
    if not isinstance(payload, dict) or "pairs" not in payload:
        raise ValidationError("matching payload needs a 'pairs' array")
    pairs = payload["pairs"]
    if not isinstance(pairs, list) or not all(
        isinstance(p, list) and len(p) == 2 and all(isinstance(t, int) for t in p)
        for p in pairs
    ):
        raise ValidationError("'pairs' must be a list of [u, v] integer pairs")
    return PerfectMatching.from_pairs(tuple(tuple(p) for p in pairs))


def deserialize_matching(text: str) -> PerfectMatching:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    return matching_from_payload(payload)
