"""Metric instances: line embeddings, layered line families, random generators.

An instance is a complete (or complete bipartite) graph on an even number of
vertices with positive symmetric edge weights.  Line instances store the
embedding positions and derive weights on demand, which keeps the large
layered families cheap to hold in memory; matrix instances store the full
square weight array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    AlphaOutOfRangeError,
    EpsilonOutOfRangeError,
    InstanceTooLargeError,
    KOutOfRangeError,
    NonPositiveWeightError,
    NotIncreasingError,
    NotMetricError,
    NotSymmetricError,
    OddVertexCountError,
    ParseError,
    ValidationError,
)

# Relative slack used by metric_check; inequalities tighter than this count as
# satisfied so that honestly-computed Euclidean instances never get flagged.
METRIC_RTOL = 1e-9

# Materializing a full weight matrix above this vertex count is almost
# certainly a mistake (line instances never need it).
_MATRIX_LIMIT = 8192


class InstanceKind(str, Enum):
    COMPLETE = "complete"
    BIPARTITE = "bipartite"


@dataclass(frozen=True)
class LineEmbedding:
    """Strictly increasing positions on the real line; w(i,j) = |x_i - x_j|."""

    positions: tuple

    def __len__(self) -> int:
        return len(self.positions)


class MetricInstance:
    """A weighted instance; either matrix-backed or backed by a line embedding.

    The constructor performs no validation.  Use the builders (`from_line`,
    `build_complete`, `build_bipartite`) or the generators, which do.
    """

    def __init__(
        self,
        n_vertices: int,
        kind: InstanceKind,
        weights: Optional[np.ndarray] = None,
        embedding: Optional[LineEmbedding] = None,
        meta: Optional[dict] = None,
    ):
        self.n_vertices = n_vertices
        self.kind = kind
        self._weights = weights
        self.embedding = embedding
        self.meta = dict(meta) if meta else {}
        self._pos_array: Optional[np.ndarray] = None

    # -- basic structure ---------------------------------------------------

    @property
    def n_pairs(self) -> int:
        return self.n_vertices // 2

    @property
    def is_line(self) -> bool:
        return self.embedding is not None

    @property
    def positions(self) -> Optional[tuple]:
        return self.embedding.positions if self.embedding else None

    def positions_array(self) -> np.ndarray:
        if self.embedding is None:
            raise ValidationError("instance has no line embedding")
        if self._pos_array is None:
            self._pos_array = np.asarray(self.embedding.positions, dtype=np.float64)
        return self._pos_array

    def side(self, v: int) -> int:
        """0 for the first bipartition class, 1 for the second."""
        return 0 if v < self.n_pairs else 1

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        if self.kind is InstanceKind.BIPARTITE:
            return self.side(i) != self.side(j)
        return True

    def edges(self) -> Iterator[tuple]:
        """All present edges as (i, j) with i < j, lexicographic order."""
        if self.kind is InstanceKind.BIPARTITE:
            half = self.n_pairs
            for i in range(half):
                for j in range(half, self.n_vertices):
                    yield (i, j)
        else:
            for i in range(self.n_vertices):
                for j in range(i + 1, self.n_vertices):
                    yield (i, j)

    def n_edges(self) -> int:
        if self.kind is InstanceKind.BIPARTITE:
            return self.n_pairs * self.n_pairs
        return self.n_vertices * (self.n_vertices - 1) // 2

    # -- weights -----------------------------------------------------------

    def weight(self, i: int, j: int):
        """Weight of edge (i, j); exact (native int) on integer embeddings."""
        if self.embedding is not None:
            a, b = self.embedding.positions[i], self.embedding.positions[j]
            return b - a if b >= a else a - b
        return float(self._weights[i, j])

    def weight_row(self, i: int) -> np.ndarray:
        if self.embedding is not None:
            p = self.positions_array()
            return np.abs(p - p[i])
        return self._weights[i]

    def weight_matrix(self) -> np.ndarray:
        if self._weights is None:
            if self.n_vertices > _MATRIX_LIMIT:
                raise InstanceTooLargeError(
                    f"refusing to materialize a {self.n_vertices}x{self.n_vertices} "
                    "weight matrix; use the embedding-based accessors"
                )
            p = self.positions_array()
            self._weights = np.abs(p[:, None] - p[None, :])
        return self._weights

    def __repr__(self) -> str:
        tag = "line" if self.is_line else self.kind.value
        return f"MetricInstance({tag}, n_vertices={self.n_vertices})"


# -- builders ---------------------------------------------------------------


def from_line(positions: Sequence, meta: Optional[dict] = None) -> MetricInstance:
    """Instance induced by points on the line. Positions must strictly increase."""
    pos = tuple(positions)
    if len(pos) < 2 or len(pos) % 2 != 0:
        raise OddVertexCountError(f"need an even number >= 2 of positions, got {len(pos)}")
    for a, b in zip(pos, pos[1:]):
        if not b > a:
            raise NotIncreasingError(f"positions must strictly increase, got {a} then {b}")
    return MetricInstance(len(pos), InstanceKind.COMPLETE, embedding=LineEmbedding(pos), meta=meta)


def _check_square_symmetric(weights: np.ndarray) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError(f"weights must be a square matrix, got shape {w.shape}")
    m = w.shape[0]
    if m < 2 or m % 2 != 0:
        raise OddVertexCountError(f"need an even vertex count >= 2, got {m}")
    if not np.array_equal(w, w.T):
        i, j = np.argwhere(w != w.T)[0]
        raise NotSymmetricError(f"w[{i},{j}]={w[i, j]!r} != w[{j},{i}]={w[j, i]!r}")
    w = w.copy()
    np.fill_diagonal(w, 0.0)  # diagonal is unused; keep serialization canonical
    return w


def build_complete(weights, meta: Optional[dict] = None) -> MetricInstance:
    """Validated complete instance: symmetric, positive off-diagonal, metric."""
    w = _check_square_symmetric(weights)
    m = w.shape[0]
    off = ~np.eye(m, dtype=bool)
    if np.any(w[off] <= 0.0):
        i, j = [int(t) for t in np.argwhere((w <= 0.0) & off)[0]]
        raise NonPositiveWeightError(f"w[{i},{j}]={w[i, j]!r} must be positive")
    inst = MetricInstance(m, InstanceKind.COMPLETE, weights=w, meta=meta)
    rep = metric_check(inst)
    if not rep.passes:
        raise NotMetricError(rep.message, witness=rep.witness)
    return inst


def build_bipartite(weights, meta: Optional[dict] = None) -> MetricInstance:
    """Validated bipartite instance.

    `weights` is the full square array; only the cross block is meaningful and
    it must be positive and satisfy the quadrilateral inequality
    w(u,v) <= w(u,v') + w(u',v') + w(u',v).
    """
    w = _check_square_symmetric(weights)
    m = w.shape[0]
    half = m // 2
    cross = w[:half, half:]
    if np.any(cross <= 0.0):
        u, v = [int(t) for t in np.argwhere(cross <= 0.0)[0]]
        raise NonPositiveWeightError(f"w[{u},{v + half}]={cross[u, v]!r} must be positive")
    inst = MetricInstance(m, InstanceKind.BIPARTITE, weights=w, meta=meta)
    rep = metric_check(inst)
    if not rep.passes:
        raise NotMetricError(rep.message, witness=rep.witness)
    return inst


# -- metric validation -------------------------------------------------------


@dataclass(frozen=True)
class MetricReport:
    passes: bool
    witness: Optional[tuple] = None
    message: str = ""


def metric_check(instance: MetricInstance) -> MetricReport:
    """Verify the (bipartite: quadrilateral) triangle inequality.

    Inequalities get a relative slack of 1e-9; the witness is the
    lexicographically first violating vertex tuple.
    """
    if instance.is_line:
        pos = instance.embedding.positions
        for a, b in zip(pos, pos[1:]):
            if not b > a:
                return MetricReport(False, None, "line positions not strictly increasing")
        return MetricReport(True)

    w = instance.weight_matrix()
    m = instance.n_vertices
    if instance.kind is InstanceKind.BIPARTITE:
        half = m // 2
        c = w[:half, half:]
        # b[v', v] = min over u' of c[u',v'] + c[u',v]
        b = np.empty((half, half))
        for vp in range(half):
            b[vp] = (c[:, vp][:, None] + c).min(axis=0)
        for u in range(half):
            best = (c[u][:, None] + b).min(axis=0) * (1.0 + METRIC_RTOL)
            bad = np.nonzero(c[u] > best)[0]
            if bad.size:
                v = int(bad[0])
                vp = int(np.argmin(c[u] + b[:, v]))
                up = int(np.argmin(c[:, vp] + c[:, v]))
                return MetricReport(
                    False,
                    (u, v + half, up, vp + half),
                    f"quadrilateral inequality fails at u={u}, v={v + half} "
                    f"via u'={up}, v'={vp + half}",
                )
        return MetricReport(True)

    for i in range(m):
        # rhs[k, j] = w[i,k] + w[k,j]; diagonal k in {i, j} is harmless slack-free truth
        rhs = w[i][:, None] + w
        bad = w[i][None, :] > rhs * (1.0 + METRIC_RTOL)
        bad[:, i] = False
        np.fill_diagonal(bad, False)
        if bad.any():
            k, j = [int(t) for t in np.argwhere(bad)[0]]
            return MetricReport(
                False,
                (i, j, k),
                f"triangle inequality fails: w[{i},{j}]={float(w[i, j])!r} > "
                f"w[{i},{k}] + w[{k},{j}] = {float(w[i, k] + w[k, j])!r}",
            )
    return MetricReport(True)


# -- layered line families ----------------------------------------------------


def gen_rt(k: int) -> MetricInstance:
    """Layered line instance on 2^k integer positions.

    Level 1 is [0, 1]; level j+1 places two copies of level j with a gap equal
    to the level-j diameter, so the diameter triples (plus nothing) each level:
    diameter(k) = 3^(k-1).  All arithmetic is exact integer arithmetic.
    """
    if not 1 <= k <= 30:
        raise KOutOfRangeError(f"k must be in [1, 30], got {k}")
    pos = [0, 1]
    diam = 1
    for _ in range(k - 1):
        shift = 2 * diam
        pos = pos + [p + shift for p in pos]
        diam = 3 * diam
    return from_line(pos, meta={"family": "rt", "k": k})


def default_epsilon(alpha: float) -> float:
    """Default spacing slack for gen_rt_alpha; independent of k."""
    return 1.0 / (16.0 * alpha)


def gen_rt_alpha(k: int, alpha: float, epsilon: Optional[float] = None) -> MetricInstance:
    """Layered line instance with level gaps scaled by (1/alpha - epsilon).

    Level j has diameter (2 + 1/alpha - epsilon)^(j-1); the gap inserted between
    the two level-j copies is (1/alpha - epsilon) times that diameter.  For
    sufficiently small epsilon the instance has a unique alpha-stable matching.
    """
    if not 1 <= k <= 30:
        raise KOutOfRangeError(f"k must be in [1, 30], got {k}")
    if not alpha >= 1.0:
        raise AlphaOutOfRangeError(f"alpha must be >= 1, got {alpha}")
    eps = default_epsilon(alpha) if epsilon is None else float(epsilon)
    if not 0.0 < eps < 1.0 / alpha:
        raise EpsilonOutOfRangeError(f"epsilon must lie in (0, 1/alpha), got {eps}")
    pos = [0.0, 1.0]
    diam = 1.0
    for _ in range(k - 1):
        shift = diam + (1.0 / alpha - eps) * diam
        pos = pos + [p + shift for p in pos]
        diam = (2.0 + 1.0 / alpha - eps) * diam
    return from_line(
        pos, meta={"family": "rt-alpha", "k": k, "alpha": alpha, "epsilon": eps}
    )


# -- random generators --------------------------------------------------------


def gen_random_line(
    n_pairs: int, seed: int = 0, gap_distribution: str = "uniform"
) -> MetricInstance:
    """2*n_pairs sorted positions with i.i.d. positive gaps."""
    if n_pairs < 1:
        raise ValidationError(f"n_pairs must be >= 1, got {n_pairs}")
    rng = np.random.default_rng(seed)
    m = 2 * n_pairs
    if gap_distribution == "uniform":
        gaps = 1.0 - rng.random(m - 1)  # (0, 1]
    elif gap_distribution == "exponential":
        gaps = rng.exponential(1.0, m - 1)
    else:
        raise ValidationError(f"unknown gap_distribution {gap_distribution!r}")
    pos = np.concatenate([[0.0], np.cumsum(gaps)])
    return from_line(
        [float(p) for p in pos],
        meta={
            "family": "random-line",
            "n_pairs": n_pairs,
            "seed": seed,
            "gap_distribution": gap_distribution,
        },
    )


def gen_random_euclidean(
    n_pairs: int,
    seed: int = 0,
    dimension: int = 2,
    bipartite: bool = False,
) -> MetricInstance:
    """Uniform points in the unit cube; weights are Euclidean distances.

    dimension=1 without bipartition returns the equivalent sorted line
    instance.  Coincident points are redrawn so all present edges are positive.
    """
    if n_pairs < 1:
        raise ValidationError(f"n_pairs must be >= 1, got {n_pairs}")
    if dimension not in (1, 2):
        raise ValidationError(f"dimension must be 1 or 2, got {dimension}")
    rng = np.random.default_rng(seed)
    m = 2 * n_pairs
    meta = {
        "family": "random-euclidean",
        "n_pairs": n_pairs,
        "seed": seed,
        "dimension": dimension,
        "bipartite": bipartite,
    }
    while True:
        pts = rng.random((m, dimension))
        d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2))
        off = ~np.eye(m, dtype=bool)
        if np.all(d[off] > 0.0):
            break
    if dimension == 1 and not bipartite:
        pos = np.sort(pts[:, 0])
        return from_line([float(p) for p in pos], meta=meta)
    if bipartite:
        half = n_pairs
        d[:half, :half] = 0.0
        d[half:, half:] = 0.0
        return build_bipartite(d, meta=meta)
    return build_complete(d, meta=meta)


# -- serialization ------------------------------------------------------------


def _instance_payload(instance: MetricInstance) -> dict:
    if instance.is_line:
        payload = {"kind": "line", "positions": list(instance.embedding.positions)}
    else:
        payload = {
            "kind": instance.kind.value,
            "weights": [list(map(float, row)) for row in instance.weight_matrix()],
        }
    if instance.meta:
        payload["meta"] = instance.meta
    return payload


def serialize_instance(instance: MetricInstance) -> str:
    return json.dumps(_instance_payload(instance), sort_keys=True, separators=(",", ":"))


def deserialize_instance(text: str) -> MetricInstance:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    return instance_from_payload(payload)


def instance_from_payload(payload) -> MetricInstance:
    if not isinstance(payload, dict):
        raise ValidationError("instance payload must be a JSON object")
    kind = payload.get("kind")
    meta = payload.get("meta")
    if meta is not None and not isinstance(meta, dict):
        raise ValidationError("meta must be an object")
    if kind == "line":
        positions = payload.get("positions")
        if not isinstance(positions, list) or not all(
            isinstance(p, (int, float)) and not isinstance(p, bool) for p in positions
        ):
            raise ValidationError("line instance needs a numeric positions array")
        return from_line(positions, meta=meta)
    if kind in ("complete", "bipartite"):
        weights = payload.get("weights")
        if not isinstance(weights, list):
            raise ValidationError(f"{kind} instance needs a weights matrix")
        builder = build_complete if kind == "complete" else build_bipartite
        return builder(np.asarray(weights, dtype=np.float64), meta=meta)
    raise ValidationError(f"unknown instance kind {kind!r}")
