"""Greedy stabilization by flipping unstable edges in weight order.

Starting from a minimum-cost matching, scan every edge once in
(weight, min endpoint, max endpoint) order; when the scanned edge (u, v) is
alpha-unstable against the current matching, remove (u, M(u)) and (v, M(v))
and add (u, v) together with (M(u), M(v)).  One pass suffices because any
edge that becomes unstable after a flip is strictly heavier than the flipped
edge, hence still ahead in the scan order; a full stability verification runs
afterwards as a backstop and the trace checker below re-derives the relevant
facts from scratch.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ._backend import kernels
from .errors import (
    InconsistentTraceError,
    InternalInstabilityError,
    ParseError,
    ValidationError,
)
from .instances import InstanceKind, MetricInstance
from .matchings import (
    PerfectMatching,
    _check_alpha,
    matching_from_partner,
    sorted_edge_list,
    stability_report,
)

EDGE_ORDER = "(weight,min,max) ascending"


@dataclass(frozen=True)
class FlipEvent:
    """One flip: `removed` lists u's pair first, then v's pair."""

    index: int
    edge: Tuple[int, int]
    removed: Tuple[Tuple[int, int], Tuple[int, int]]
    created: Tuple[int, int]
    weight: float
    removed_weights: Tuple[float, float]
    created_weight: float


@dataclass(frozen=True)
class FlipTrace:
    instance: MetricInstance
    alpha: float
    edge_order: str
    initial: PerfectMatching
    events: Tuple[FlipEvent, ...]
    final: PerfectMatching

    @property
    def flipped_edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(ev.edge for ev in self.events)


def _canon(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


def run_greedy(
    instance: MetricInstance,
    optimal: PerfectMatching,
    alpha: float,
    edges=None,
) -> FlipTrace:
    """One greedy pass from `optimal` (must be minimum-cost; not verified here
    because callers obtain it at scales where enumeration is impossible).

    `edges` optionally reuses a precomputed sorted_edge_list(instance).
    Raises InternalInstability if the final matching fails verification.
    """
    alpha = _check_alpha(alpha)
    partner0 = optimal.partner_array(instance.n_vertices)
    eu, ev, ew = sorted_edge_list(instance) if edges is None else edges
    if instance.is_line:
        flips, pfinal = kernels.greedy_pass_line(
            instance.positions_array(), eu, ev, ew, partner0, alpha
        )
    else:
        flips, pfinal = kernels.greedy_pass_dense(
            instance.weight_matrix(), eu, ev, ew, partner0, alpha
        )
    events = []
    for idx, u, v, pu, pv in flips:
        idx, u, v, pu, pv = int(idx), int(u), int(v), int(pu), int(pv)
        events.append(
            FlipEvent(
                index=idx,
                edge=(u, v),
                removed=(_canon(u, pu), _canon(v, pv)),
                created=_canon(pu, pv),
                weight=float(instance.weight(u, v)),
                removed_weights=(
                    float(instance.weight(u, pu)),
                    float(instance.weight(v, pv)),
                ),
                created_weight=float(instance.weight(pu, pv)),
            )
        )
    final = matching_from_partner(pfinal)
    report = stability_report(instance, final, alpha)
    if not report.is_stable:
        raise InternalInstabilityError(
            f"greedy output is not {alpha}-stable; first violation "
            f"{report.unstable[0]}"
        )
    return FlipTrace(
        instance=instance,
        alpha=alpha,
        edge_order=EDGE_ORDER,
        initial=PerfectMatching(tuple(optimal.pairs)),
        events=tuple(events),
        final=final,
    )


def _other(pair: Tuple[int, int], v: int) -> int:
    if pair[0] == v:
        return pair[1]
    if pair[1] == v:
        return pair[0]
    raise InconsistentTraceError(f"pair {pair} does not contain vertex {v}")


def replay(trace: FlipTrace) -> PerfectMatching:
    """Re-apply the events to the initial matching; raises InconsistentTrace
    if an event's removed edges are not currently matched."""
    partner = trace.initial.partner_array(trace.instance.n_vertices)
    for ev in trace.events:
        u, v = ev.edge
        pu = _other(ev.removed[0], u)
        pv = _other(ev.removed[1], v)
        if partner[u] != pu or partner[v] != pv:
            raise InconsistentTraceError(
                f"event at index {ev.index}: removed edges {ev.removed} "
                "are not in the current matching"
            )
        if ev.created != _canon(pu, pv):
            raise InconsistentTraceError(
                f"event at index {ev.index}: created edge {ev.created} does not "
                f"join the removed partners {pu}, {pv}"
            )
        partner[u] = v
        partner[v] = u
        partner[pu] = pv
        partner[pv] = pu
    return matching_from_partner(partner)


# -- trace lemma checks ----------------------------------------------------------


@dataclass(frozen=True)
class TraceCheckReport:
    """Outcome of the structural checks on a flip trace.

    creation_ok: every edge that turned unstable at a flip is strictly heavier
        than the flipped edge.
    order_ok: at the end of every iteration, every currently unstable edge
        comes strictly later in the scan order, i.e. its (weight, min, max)
        key strictly exceeds the processed edge's key.  Under distinct weights
        this is exactly "unstable edges are strictly heavier"; under exact
        ties only the order-strict form holds (a flipped edge's equal-weight
        twin may stay unstable until its own iteration).
    permanence_ok: flipped edges stay in the matching through the final one.
    flips_unstable_ok: every recorded flip was genuinely unstable when applied.
    """

    creation_ok: bool
    order_ok: bool
    permanence_ok: bool
    flips_unstable_ok: bool
    failures: Tuple[str, ...]

    @property
    def passed(self) -> bool:
        return (
            self.creation_ok
            and self.order_ok
            and self.permanence_ok
            and self.flips_unstable_ok
        )


def _validate_events_against_order(trace, eu, ev):
    last = -1
    for event in trace.events:
        i = event.index
        if not last < i < eu.shape[0]:
            raise InconsistentTraceError(
                f"event index {i} out of order (previous {last})"
            )
        if (int(eu[i]), int(ev[i])) != tuple(event.edge):
            raise InconsistentTraceError(
                f"event at index {i} says edge {event.edge}, sorted order has "
                f"({int(eu[i])},{int(ev[i])})"
            )
        last = i


def check_trace_lemmas(
    trace: FlipTrace, method: str = "auto", edges=None
) -> TraceCheckReport:
    """Replay the trace and verify the structural lemmas behind the one-pass
    greedy.  `method="rescan"` recomputes the unstable set from its definition
    after every iteration (quadratic; reference for tests); the default
    maintains it incrementally, which is exact because a flip only changes the
    matched weights of the four touched vertices.
    """
    instance = trace.instance
    eu, ev, ew = sorted_edge_list(instance) if edges is None else edges
    _validate_events_against_order(trace, eu, ev)
    if method == "auto" or method == "incremental":
        return _check_incremental(instance, trace, eu, ev, ew)
    if method == "rescan":
        return _check_rescan(instance, trace, eu, ev, ew)
    raise ValidationError(f"unknown method {method!r}")


def _check_incremental(instance, trace, eu, ev, ew):
    n = instance.n_vertices
    alpha = trace.alpha
    partner = trace.initial.partner_array(n)
    mw = np.array(
        [float(instance.weight(v, int(partner[v]))) for v in range(n)]
    )
    bipartite = instance.kind is InstanceKind.BIPARTITE
    half = n // 2

    if instance.is_line:
        initial = kernels.unstable_edges_line(
            instance.positions_array(), partner, alpha
        )
    else:
        initial = kernels.unstable_edges_dense(
            instance.weight_matrix(), partner, alpha, bipartite
        )
    in_u = np.zeros((n, n), dtype=bool)
    heap = []
    for a, b in initial:
        a, b = int(a), int(b)
        in_u[a, b] = in_u[b, a] = True
        heapq.heappush(heap, (float(instance.weight(a, b)), a, b))

    def min_unstable():
        while heap and not in_u[heap[0][1], heap[0][2]]:
            heapq.heappop(heap)
        return heap[0] if heap else None

    failures = []
    creation_ok = order_ok = permanence_ok = flips_unstable_ok = True
    locked = {}
    prev_index = 0
    n_edges = eu.shape[0]

    def check_stretch(last_index):
        nonlocal order_ok
        mu = min_unstable()
        scan_key = (float(ew[last_index]), int(eu[last_index]), int(ev[last_index]))
        if mu is not None and not (mu > scan_key):
            order_ok = False
            failures.append(
                f"unstable edge ({mu[1]},{mu[2]}) weight {mu[0]!r} not after "
                f"processed edge {scan_key} in scan order at iteration {last_index}"
            )

    for event in trace.events:
        i = event.index
        u, v = event.edge
        pu = _other(event.removed[0], u)
        pv = _other(event.removed[1], v)
        if i - 1 >= prev_index:
            check_stretch(i - 1)
        t = alpha * float(ew[i])
        if not (t < mw[u] and t < mw[v]):
            flips_unstable_ok = False
            failures.append(
                f"flip at index {i} of ({u},{v}) was not unstable: "
                f"alpha*w={t!r} vs matched {float(mw[u])!r}, {float(mw[v])!r}"
            )
        if partner[u] != pu or partner[v] != pv:
            raise InconsistentTraceError(
                f"event at index {i}: removed edges not in current matching"
            )
        for a, b in (event.removed[0], event.removed[1]):
            if locked.get(a) == b:
                permanence_ok = False
                failures.append(
                    f"flip at index {i} removed previously flipped edge ({a},{b})"
                )
        partner[u] = v
        partner[v] = u
        partner[pu] = pv
        partner[pv] = pu
        w_flip = float(ew[i])
        w_created = float(instance.weight(pu, pv))
        mw[u] = mw[v] = w_flip
        mw[pu] = mw[pv] = w_created
        locked[u] = v
        locked[v] = u
        for a in (u, v, pu, pv):
            row = np.asarray(instance.weight_row(a), dtype=np.float64)
            cand = (alpha * row) < np.minimum(mw[a], mw)
            cand[a] = False
            cand[partner[a]] = False
            if bipartite:
                if a < half:
                    cand[:half] = False
                else:
                    cand[half:] = False
            changed = np.nonzero(cand != in_u[a])[0]
            for x in changed:
                x = int(x)
                if cand[x]:
                    in_u[a, x] = in_u[x, a] = True
                    heapq.heappush(heap, (float(row[x]), min(a, x), max(a, x)))
                    if not (float(row[x]) > w_flip):
                        creation_ok = False
                        failures.append(
                            f"flip at index {i} created unstable edge "
                            f"({min(a, x)},{max(a, x)}) of weight {float(row[x])!r} "
                            f"not above flipped weight {w_flip!r}"
                        )
                else:
                    in_u[a, x] = in_u[x, a] = False
        prev_index = i
    check_stretch(n_edges - 1)
    if matching_from_partner(partner) != trace.final:
        raise InconsistentTraceError("replayed final matching differs from trace")
    return TraceCheckReport(
        creation_ok=creation_ok,
        order_ok=order_ok,
        permanence_ok=permanence_ok,
        flips_unstable_ok=flips_unstable_ok,
        failures=tuple(failures),
    )


def _check_rescan(instance, trace, eu, ev, ew):
    """Definition-level reference: recompute the unstable set after every
    iteration with plain loops.  Quadratic in the edge count."""
    n = instance.n_vertices
    alpha = trace.alpha
    partner = [int(p) for p in trace.initial.partner_array(n)]
    w = instance.weight

    def unstable_set():
        out = {}
        for a in range(n):
            for b in range(a + 1, n):
                if not instance.has_edge(a, b) or partner[a] == b:
                    continue
                t = alpha * w(a, b)
                if t < w(a, partner[a]) and t < w(b, partner[b]):
                    out[(a, b)] = float(w(a, b))
        return out

    failures = []
    creation_ok = order_ok = permanence_ok = flips_unstable_ok = True
    locked = {}
    events = {event.index: event for event in trace.events}
    current = unstable_set()
    for i in range(eu.shape[0]):
        event = events.get(i)
        if event is not None:
            u, v = event.edge
            pu = _other(event.removed[0], u)
            pv = _other(event.removed[1], v)
            t = alpha * float(ew[i])
            if not (t < w(u, partner[u]) and t < w(v, partner[v])):
                flips_unstable_ok = False
                failures.append(f"flip at index {i} of ({u},{v}) was not unstable")
            if partner[u] != pu or partner[v] != pv:
                raise InconsistentTraceError(
                    f"event at index {i}: removed edges not in current matching"
                )
            for a, b in (event.removed[0], event.removed[1]):
                if locked.get(a) == b:
                    permanence_ok = False
                    failures.append(
                        f"flip at index {i} removed previously flipped edge ({a},{b})"
                    )
            partner[u] = v
            partner[v] = u
            partner[pu] = pv
            partner[pv] = pu
            locked[u] = v
            locked[v] = u
            before = current
            current = unstable_set()
            for key, wx in current.items():
                if key not in before and not (wx > float(ew[i])):
                    creation_ok = False
                    failures.append(
                        f"flip at index {i} created unstable edge {key} of weight "
                        f"{wx!r} not above flipped weight {float(ew[i])!r}"
                    )
        scan_key = (float(ew[i]), int(eu[i]), int(ev[i]))
        for key, wx in current.items():
            if not ((wx, key[0], key[1]) > scan_key):
                order_ok = False
                failures.append(
                    f"unstable edge {key} weight {wx!r} not after processed "
                    f"edge {scan_key} in scan order at iteration {i}"
                )
                break
    if matching_from_partner(np.asarray(partner)) != trace.final:
        raise InconsistentTraceError("replayed final matching differs from trace")
    return TraceCheckReport(
        creation_ok=creation_ok,
        order_ok=order_ok,
        permanence_ok=permanence_ok,
        flips_unstable_ok=flips_unstable_ok,
        failures=tuple(failures),
    )


# -- serialization ---------------------------------------------------------------


def serialize_trace(trace: FlipTrace) -> str:
    payload = {
        "alpha": trace.alpha,
        "edge_order": trace.edge_order,
        "events": [
            {
                "i": event.index,
                "flip": list(event.edge),
                "removed": [list(event.removed[0]), list(event.removed[1])],
                "created": list(event.created),
            }
            for event in trace.events
        ],
        "final": {"pairs": [list(p) for p in trace.final.pairs]},
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def deserialize_trace(text: str, instance: MetricInstance) -> FlipTrace:
    """Rebind a serialized trace to its instance.  The initial matching is
    reconstructed by undoing the events from the final matching."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValidationError("trace payload must be a JSON object")
    try:
        alpha = float(payload["alpha"])
        edge_order = payload["edge_order"]
        raw_events = payload["events"]
        final_pairs = payload["final"]["pairs"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"trace payload missing field: {exc}") from exc
    if edge_order != EDGE_ORDER:
        raise ValidationError(f"unsupported edge_order {edge_order!r}")
    final = PerfectMatching.from_pairs(tuple(tuple(p) for p in final_pairs))
    partner = final.partner_array(instance.n_vertices)
    events = []
    for raw in raw_events:
        try:
            index = int(raw["i"])
            u, v = (int(t) for t in raw["flip"])
            removed = tuple(tuple(int(t) for t in p) for p in raw["removed"])
            created = tuple(int(t) for t in raw["created"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed event: {raw!r}") from exc
        events.append(
            FlipEvent(
                index=index,
                edge=(u, v),
                removed=(removed[0], removed[1]),
                created=created,
                weight=float(instance.weight(u, v)),
                removed_weights=(
                    float(instance.weight(*removed[0])),
                    float(instance.weight(*removed[1])),
                ),
                created_weight=float(instance.weight(*created)),
            )
        )
    for event in reversed(events):
        u, v = event.edge
        pu = _other(event.removed[0], u)
        pv = _other(event.removed[1], v)
        if partner[u] != v or partner[pu] != pv:
            raise InconsistentTraceError(
                f"event at index {event.index} cannot be undone from the final matching"
            )
        partner[u] = pu
        partner[pu] = u
        partner[v] = pv
        partner[pv] = v
    initial = matching_from_partner(partner)
    return FlipTrace(
        instance=instance,
        alpha=alpha,
        edge_order=edge_order,
        initial=initial,
        events=tuple(events),
        final=final,
    )
