"""Command line harness: generate, analyze, sweep, and search pipelines.

Sweeps emit one record per (family, k, alpha) with a fixed CSV schema; the
randomized searches shard deterministically, so results depend only on the
arguments and the seed, never on the worker count.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ._backend import kernels
from .errors import (
    NotMetricError,
    SelfishMatchingError,
    ValidationError,
)
from .flipforest import (
    build_forest,
    check_decomposition_identities,
    check_weight_bound,
    closed_form_effect,
    count_tree_shapes,
    enumerate_tree_shapes,
    forest_cost_bound,
    from_shape,
    serialize_tree,
    tree_effects_batch,
)
from .greedy import check_trace_lemmas, run_greedy, serialize_trace
from .instances import (
    default_epsilon,
    deserialize_instance,
    from_line,
    gen_random_euclidean,
    gen_random_line,
    gen_rt,
    gen_rt_alpha,
    metric_check,
    serialize_instance,
)
from .matchings import (
    _stable_scan,
    consecutive_matching,
    cost,
    line_pos_matching,
    min_cost_matching,
    sorted_edge_list,
    stability_report,
)

CSV_HEADER = (
    "family,k,alpha,epsilon,n_pairs,c_opt,c_greedy,ratio,bound,flips,"
    "checks,seed,wall_time_ms"
)
DEFAULT_SEED = 0
_MC_CHUNK = 4096


def _g17(x: float) -> str:
    return "%.17g" % float(x)


def pos_exponent(alpha: float) -> float:
    return math.log2(1.0 + 1.0 / (2.0 * alpha))


def pos_bound(n_pairs: int, alpha: float) -> float:
    """Growth-rate reference n^log2(1+1/(2a)); no hidden constant."""
    return float(n_pairs) ** pos_exponent(alpha)


def adaptive_alpha(n_pairs: int) -> float:
    """ceil(log2 n_pairs), floored at 1."""
    return float(max(1, math.ceil(math.log2(max(1, n_pairs)))))


@dataclass(frozen=True)
class ExperimentRecord:
    family: str
    k: int
    alpha: float
    epsilon: Optional[float]
    n_pairs: int
    c_opt: float
    c_greedy: float
    ratio: float
    bound: float
    flips: int
    checks: str
    seed: Optional[int]
    wall_time_ms: int

    def csv_row(self) -> str:
        return ",".join(
            [
                self.family,
                str(self.k),
                _g17(self.alpha),
                "" if self.epsilon is None else _g17(self.epsilon),
                str(self.n_pairs),
                _g17(self.c_opt),
                _g17(self.c_greedy),
                _g17(self.ratio),
                _g17(self.bound),
                str(self.flips),
                self.checks,
                "" if self.seed is None else str(self.seed),
                str(self.wall_time_ms),
            ]
        )

    def to_obj(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SearchRecord:
    kind: str
    trials: int
    best_found: float
    theoretical_max: float
    witness: Optional[dict]

    @property
    def passed(self) -> bool:
        return self.best_found <= self.theoretical_max + 1e-9

    def to_obj(self) -> dict:
        obj = asdict(self)
        obj["passed"] = self.passed
        return obj


# -- sweep -------------------------------------------------------------------------


def _sweep_row(task: tuple) -> ExperimentRecord:
    family, k, alpha, epsilon_opt, candidate = task
    t0 = time.perf_counter()
    fam_name = family if candidate == "greedy" else family + "-linepos"
    eps = None
    try:
        if family == "rt":
            inst = gen_rt(k)
        elif family == "rt-alpha":
            eps = default_epsilon(alpha) if epsilon_opt is None else epsilon_opt
            inst = gen_rt_alpha(k, alpha, eps)
        else:
            raise ValidationError(f"unknown sweep family {family!r}")
        optimal = consecutive_matching(inst)
        c_opt = float(cost(inst, optimal))
        if candidate == "greedy":
            edges = sorted_edge_list(inst)
            trace = run_greedy(inst, optimal, alpha, edges=edges)
            final = trace.final
            flips = len(trace.events)
            forest = build_forest(trace)
            ok = (
                check_trace_lemmas(trace, edges=edges).passed
                and check_weight_bound(forest).passed
                and check_decomposition_identities(forest).passed
                and forest_cost_bound(trace, forest).passed
            )
        elif candidate == "line-pos":
            final = line_pos_matching(inst)
            flips = 0
            ok = stability_report(inst, final, alpha).is_stable
        else:
            raise ValidationError(f"unknown candidate {candidate!r}")
        c_greedy = float(cost(inst, final))
        wall = max(0, round((time.perf_counter() - t0) * 1000.0))
        return ExperimentRecord(
            family=fam_name,
            k=k,
            alpha=alpha,
            epsilon=eps,
            n_pairs=inst.n_pairs,
            c_opt=c_opt,
            c_greedy=c_greedy,
            ratio=c_greedy / c_opt,
            bound=pos_bound(inst.n_pairs, alpha),
            flips=flips,
            checks="pass" if ok else "fail",
            seed=None,
            wall_time_ms=wall,
        )
    except SelfishMatchingError:
        wall = max(0, round((time.perf_counter() - t0) * 1000.0))
        return ExperimentRecord(
            family=fam_name,
            k=k,
            alpha=alpha,
            epsilon=eps,
            n_pairs=2 ** (k - 1),
            c_opt=math.nan,
            c_greedy=math.nan,
            ratio=math.nan,
            bound=pos_bound(2 ** (k - 1), alpha),
            flips=0,
            checks="fail",
            seed=None,
            wall_time_ms=wall,
        )


def _parallel_map(fn, tasks: list, threads: int) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def run_sweep(
    family: str,
    k_values: Sequence[int],
    alphas: Union[str, Sequence[float]],
    epsilon: Optional[float] = None,
    candidate: str = "greedy",
    threads: int = 1,
) -> List[ExperimentRecord]:
    """One record per (k, alpha); alphas="adaptive" picks ceil(log2 n_pairs)
    per k.  Failed rows are marked checks=fail and the sweep continues."""
    if family not in ("rt", "rt-alpha"):
        raise ValidationError(f"unknown sweep family {family!r}")
    if candidate not in ("greedy", "line-pos"):
        raise ValidationError(f"unknown candidate {candidate!r}")
    tasks = []
    for k in k_values:
        if alphas == "adaptive":
            row_alphas = [adaptive_alpha(2 ** (k - 1))]
        else:
            row_alphas = [float(a) for a in alphas]
        for alpha in row_alphas:
            tasks.append((family, int(k), float(alpha), epsilon, candidate))
    return _parallel_map(_sweep_row, tasks, threads)


def records_to_csv(records: Sequence[ExperimentRecord]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in records]) + "\n"


# -- randomized searches -----------------------------------------------------------


def _mc_chunk(task: tuple):
    n_vertices, n_trials, seed_seq = task
    rng = np.random.default_rng(seed_seq)
    gaps = 1.0 - rng.random((n_trials, n_vertices - 1))
    ratios, stable = kernels.line_mc_trials(gaps, 1.0)
    idx = np.flatnonzero(stable)
    if idx.size == 0:
        return None
    j = int(idx[int(np.argmax(ratios[idx]))])
    return (float(ratios[j]), gaps[j].copy())


def run_search_line_mc(
    n_vertices: int, trials: int, seed: int = DEFAULT_SEED, threads: int = 1
) -> SearchRecord:
    """Random weighted lines; keeps trials whose long-edge pairing is 1-stable
    and records the worst stable-to-optimal ratio seen."""
    if n_vertices < 2 or n_vertices & (n_vertices - 1):
        raise ValidationError(f"vertex count must be a power of two, got {n_vertices}")
    if n_vertices > 16:
        raise ValidationError(f"vertex count capped at 16, got {n_vertices}")
    k = n_vertices.bit_length() - 1
    theoretical = 2.0 * 1.5 ** (k - 1) - 1.0
    best = 1.0
    best_gaps = None
    if trials > 0:
        n_chunks = (trials + _MC_CHUNK - 1) // _MC_CHUNK
        children = np.random.SeedSequence(seed).spawn(n_chunks)
        tasks = [
            (n_vertices, min(_MC_CHUNK, trials - c * _MC_CHUNK), children[c])
            for c in range(n_chunks)
        ]
        for result in _parallel_map(_mc_chunk, tasks, threads):
            if result is None:
                continue
            ratio, gaps = result
            if best_gaps is None or ratio > best:
                best = max(best, ratio)
                best_gaps = gaps
    witness = None
    if best_gaps is not None:
        positions = np.concatenate(([0.0], np.cumsum(best_gaps)))
        witness = json.loads(serialize_instance(from_line(positions.tolist())))
    return SearchRecord(
        kind="line-MC-PoA",
        trials=trials,
        best_found=best,
        theoretical_max=theoretical,
        witness=witness,
    )


def _structured_weights(n_leaves: int) -> np.ndarray:
    one_hot = np.zeros(n_leaves)
    one_hot[0] = 1.0
    return np.stack(
        [np.ones(n_leaves), one_hot, 0.5 ** np.arange(n_leaves, dtype=np.float64)]
    )


def _tree_weight_batch(n_leaves: int, trials: int, seed: int) -> np.ndarray:
    structured = _structured_weights(n_leaves)
    if trials <= 0:
        return structured
    rng = np.random.default_rng(seed)
    return np.concatenate([structured, rng.random((trials, n_leaves))])


def _tree_shard(task: tuple):
    n_leaves, alpha, shard, n_shards, trials, seed = task
    weights = _tree_weight_batch(n_leaves, trials, seed)
    best = -math.inf
    best_pos = -1
    best_row = -1
    best_shape = None
    for pos, shape in enumerate(enumerate_tree_shapes(n_leaves)):
        if pos % n_shards != shard:
            continue
        tree = from_shape(shape, None, alpha)
        effects = tree_effects_batch(tree, weights)
        row = int(np.argmax(effects))
        value = float(effects[row])
        if value > best:
            best, best_pos, best_row, best_shape = value, pos, row, shape
    return (best, best_pos, best_row, best_shape)


def run_search_tree_effect(
    n_leaves: int,
    alpha: float,
    trials: int = 100,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> SearchRecord:
    """Exhaustive over tree shapes, `trials` random leaf-weight vectors per
    shape plus the uniform, one-hot, and geometric vectors.  The same weight
    batch is evaluated on every shape."""
    theoretical = closed_form_effect(n_leaves, alpha)
    n_shapes = count_tree_shapes(n_leaves)
    n_shards = max(1, min(threads, n_shapes))
    tasks = [
        (n_leaves, float(alpha), s, n_shards, trials, seed) for s in range(n_shards)
    ]
    results = _parallel_map(_tree_shard, tasks, threads)
    best, best_pos, best_row, best_shape = max(
        results, key=lambda r: (r[0], -r[1])
    )
    weights = _tree_weight_batch(n_leaves, trials, seed)
    witness_tree = from_shape(best_shape, weights[best_row], alpha)
    return SearchRecord(
        kind="tree-effect",
        trials=n_shapes * weights.shape[0],
        best_found=best,
        theoretical_max=theoretical,
        witness=json.loads(serialize_tree(witness_tree)),
    )


# -- analyze / generate / check pipelines --------------------------------------------


def _instance_summary(instance) -> dict:
    if instance.is_line:
        pos = instance.embedding.positions
        diameter = float(pos[-1] - pos[0])
    else:
        diameter = float(instance.weight_matrix().max())
    return {
        "kind": instance.kind.value if not instance.is_line else "line",
        "n_vertices": instance.n_vertices,
        "n_pairs": instance.n_pairs,
        "diameter": diameter,
    }


def run_analyze(
    instance,
    alpha: float,
    exact: bool = False,
    greedy: bool = False,
    forest: bool = False,
    max_enum: Optional[int] = None,
    trace_out: Optional[str] = None,
) -> Tuple[dict, bool]:
    """Requested pipeline stages on one instance; forest implies greedy."""
    payload = {"alpha": float(alpha), "instance": _instance_summary(instance)}
    passed = True
    if exact:
        scan = _stable_scan(instance, alpha, max_enum)
        c_opt = float(scan[1])
        payload["exact"] = {
            "total_matchings": int(scan[0]),
            "stable_count": int(scan[3]),
            "c_opt": c_opt,
            "poa": float(scan[4]) / c_opt,
            "poa_witness": [list(p) for p in scan[5]],
            "pos": float(scan[6]) / c_opt,
            "pos_witness": [list(p) for p in scan[7]],
        }
    if greedy or forest:
        if instance.is_line:
            optimal = consecutive_matching(instance)
        else:
            optimal = min_cost_matching(instance, max_enum)
        edges = sorted_edge_list(instance)
        trace = run_greedy(instance, optimal, alpha, edges=edges)
        lemmas = check_trace_lemmas(trace, edges=edges)
        passed = passed and lemmas.passed
        c_opt = float(cost(instance, optimal))
        c_greedy = float(cost(instance, trace.final))
        if trace_out:
            with open(trace_out, "w") as fh:
                fh.write(serialize_trace(trace) + "\n")
        payload["greedy"] = {
            "c_opt": c_opt,
            "c_greedy": c_greedy,
            "ratio": c_greedy / c_opt,
            "flips": len(trace.events),
            "lemma_checks": "pass" if lemmas.passed else "fail",
            "trace_path": trace_out,
        }
        if forest:
            fst = build_forest(trace)
            wb_rep = check_weight_bound(fst)
            dec_rep = check_decomposition_identities(fst)
            cost_rep = forest_cost_bound(trace, fst)
            stage_ok = wb_rep.passed and dec_rep.passed and cost_rep.passed
            passed = passed and stage_ok
            payload["forest"] = {
                "trees": len(fst.roots),
                "weight_bound": "pass" if wb_rep.passed else "fail",
                "decomposition": "pass" if dec_rep.passed else "fail",
                "cost_bound": "pass" if cost_rep.passed else "fail",
                "root_virtual_sum": cost_rep.root_virtual_sum,
                "leaf_virtual_sum": cost_rep.leaf_virtual_sum,
                "flipped_weight": cost_rep.flipped_weight,
            }
    payload["passed"] = passed
    return payload, passed


# -- CLI ---------------------------------------------------------------------------


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="RNG seed for randomized commands (default 0)")
    g.add_argument("--max-enum", type=int, dest="max_enum", default=argparse.SUPPRESS,
                   help="vertex cap for exhaustive enumeration (default 16)")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                   help="worker processes; SELFISH_MATCHING_THREADS mirrors this")
    g.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS,
                   help="output format (sweep defaults to csv, others to json)")
    g.add_argument("-o", "--output", dest="output", default=argparse.SUPPRESS,
                   help="write output to this path instead of stdout")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="selfish-matching",
        description="Matching stability experiments: generators, greedy flips, "
        "flip forests, exact enumeration, and extremality searches.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common],
                       help="write an instance as JSON")
    p.add_argument("family",
                   choices=("rt", "rt-alpha", "random-line", "random-euclidean"))
    p.add_argument("--k", type=int, help="recursion depth for rt families")
    p.add_argument("--alpha", type=float, help="stability factor for rt-alpha")
    p.add_argument("--epsilon", type=float,
                   help="spacing slack for rt-alpha (default 1/(16*alpha))")
    p.add_argument("--pairs", type=int, help="pair count for random families")
    p.add_argument("--dimension", type=int, choices=(1, 2), default=2)
    p.add_argument("--bipartite", action="store_true")

    p = sub.add_parser("analyze", parents=[common],
                       help="run pipeline stages on an instance file")
    p.add_argument("instance", help="path to an instance JSON file")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--exact", action="store_true",
                   help="exhaustive PoA/PoS/stable-count")
    p.add_argument("--greedy", action="store_true",
                   help="greedy run with trace lemma checks")
    p.add_argument("--forest", action="store_true",
                   help="flip-forest bound chain (implies --greedy)")
    p.add_argument("--trace-out", dest="trace_out",
                   help="also write the greedy trace JSON here")

    p = sub.add_parser("sweep", parents=[common],
                       help="run a (k, alpha) grid and emit experiment records")
    p.add_argument("family", choices=("rt", "rt-alpha"))
    p.add_argument("--k-min", type=int, default=1, dest="k_min")
    p.add_argument("--k-max", type=int, default=8, dest="k_max")
    p.add_argument("--alpha", default="1",
                   help='comma separated list, or "adaptive" for ceil(log2 n)')
    p.add_argument("--epsilon", type=float,
                   help="fixed spacing slack (default: per-alpha default)")
    p.add_argument("--candidate", choices=("greedy", "line-pos"), default="greedy",
                   help="matching whose cost fills the c_greedy column")

    p = sub.add_parser("search-line-mc", parents=[common],
                       help="random search for extremal stable line ratios")
    p.add_argument("--vertices", type=int, default=8,
                   help="power of two, at most 16")
    p.add_argument("--trials", type=int, default=10000)

    p = sub.add_parser("search-tree-effect", parents=[common],
                       help="exhaustive shapes, randomized leaf weights")
    p.add_argument("--leaves", type=int, default=8)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=100,
                   help="random weight vectors per shape")

    p = sub.add_parser("check", parents=[common],
                       help="metric validation of an instance file")
    p.add_argument("instance", help="path to an instance JSON file")

    return parser


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _to_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _flatten(prefix: str, value, rows: list) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], rows)
    else:
        # cells mirror the JSON rendering: true/false, %.17g floats
        cell = value
        if isinstance(value, (list, tuple)):
            cell = json.dumps(value, separators=(",", ":"))
        elif isinstance(value, bool):
            cell = "true" if value else "false"
        elif isinstance(value, float):
            cell = _g17(value)
        rows.append((prefix, cell))


def _to_kv_csv(payload: dict) -> str:
    rows: list = []
    _flatten("", payload, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, cell in rows:
        writer.writerow([key, "" if cell is None else cell])
    return buf.getvalue()


def _emit_payload(payload: dict, fmt: str, output: Optional[str]) -> None:
    _emit(_to_json(payload) if fmt == "json" else _to_kv_csv(payload), output)


def _cmd_generate(args, seed, output) -> int:
    family = args.family
    if family == "rt":
        if args.k is None:
            raise ValidationError("generate rt needs --k")
        instance = gen_rt(args.k)
    elif family == "rt-alpha":
        if args.k is None or args.alpha is None:
            raise ValidationError("generate rt-alpha needs --k and --alpha")
        instance = gen_rt_alpha(args.k, args.alpha, args.epsilon)
    elif family == "random-line":
        if args.pairs is None:
            raise ValidationError("generate random-line needs --pairs")
        instance = gen_random_line(args.pairs, seed)
    else:
        if args.pairs is None:
            raise ValidationError("generate random-euclidean needs --pairs")
        instance = gen_random_euclidean(
            args.pairs, seed, dimension=args.dimension, bipartite=args.bipartite
        )
    report = metric_check(instance)
    summary_fields = _instance_summary(instance)
    summary = (
        f"n_vertices={summary_fields['n_vertices']} "
        f"n_pairs={summary_fields['n_pairs']} "
        f"diameter={_g17(summary_fields['diameter'])} "
        f"metric_check={'pass' if report.passes else 'fail'}"
    )
    text = serialize_instance(instance) + "\n"
    if output:
        _emit(text, output)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0 if report.passes else 1


def _cmd_analyze(args, max_enum, fmt, output) -> int:
    with open(args.instance) as fh:
        instance = deserialize_instance(fh.read())
    payload, passed = run_analyze(
        instance,
        args.alpha,
        exact=args.exact,
        greedy=args.greedy,
        forest=args.forest,
        max_enum=max_enum,
        trace_out=args.trace_out,
    )
    _emit_payload(payload, fmt, output)
    return 0 if passed else 1


def _parse_sweep_alphas(text: str):
    if text == "adaptive":
        return "adaptive"
    try:
        return [float(part) for part in text.split(",") if part]
    except ValueError as exc:
        raise ValidationError(f"bad --alpha value {text!r}") from exc


def _cmd_sweep(args, threads, fmt, output) -> int:
    records = run_sweep(
        args.family,
        range(args.k_min, args.k_max + 1),
        _parse_sweep_alphas(args.alpha),
        epsilon=args.epsilon,
        candidate=args.candidate,
        threads=threads,
    )
    ok = all(r.checks == "pass" for r in records)
    if fmt == "csv":
        _emit(records_to_csv(records), output)
    else:
        _emit(_to_json({"records": [r.to_obj() for r in records]}), output)
    return 0 if ok else 1


def _cmd_search_line_mc(args, seed, threads, fmt, output) -> int:
    record = run_search_line_mc(args.vertices, args.trials, seed, threads)
    _emit_payload(record.to_obj(), fmt, output)
    return 0 if record.passed else 1


def _cmd_search_tree_effect(args, seed, threads, fmt, output) -> int:
    record = run_search_tree_effect(
        args.leaves, args.alpha, args.trials, seed, threads
    )
    _emit_payload(record.to_obj(), fmt, output)
    return 0 if record.passed else 1


def _cmd_check(args, fmt, output) -> int:
    with open(args.instance) as fh:
        text = fh.read()
    try:
        instance = deserialize_instance(text)
        report = metric_check(instance)
        payload = {
            "passes": report.passes,
            "witness": None if report.witness is None else list(report.witness),
            "message": report.message,
        }
    except NotMetricError as exc:
        payload = {
            "passes": False,
            "witness": None if exc.witness is None else list(exc.witness),
            "message": str(exc),
        }
    _emit_payload(payload, fmt, output)
    return 0 if payload["passes"] else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = DEFAULT_SEED
    max_enum = getattr(args, "max_enum", None)
    threads = getattr(args, "threads", None)
    if threads is None:
        env = os.environ.get("SELFISH_MATCHING_THREADS", "")
        threads = int(env) if env else 1
    fmt = getattr(args, "format", None)
    if fmt is None:
        fmt = "csv" if args.command == "sweep" else "json"
    output = getattr(args, "output", None)
    try:
        if args.command == "generate":
            return _cmd_generate(args, seed, output)
        if args.command == "analyze":
            return _cmd_analyze(args, max_enum, fmt, output)
        if args.command == "sweep":
            return _cmd_sweep(args, threads, fmt, output)
        if args.command == "search-line-mc":
            return _cmd_search_line_mc(args, seed, threads, fmt, output)
        if args.command == "search-tree-effect":
            return _cmd_search_tree_effect(args, seed, threads, fmt, output)
        if args.command == "check":
            return _cmd_check(args, fmt, output)
        parser.error(f"unknown command {args.command!r}")
    except SelfishMatchingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
