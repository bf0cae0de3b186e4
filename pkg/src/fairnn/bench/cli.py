"""Command-line entry point.

Subcommands: build, query, fairness, ratio, case-study, timing, selftest.
Tabular output goes to stdout (or --out) as CSV or JSON-lines.  Exit
codes: 0 on success, 2 when a rare failure event aborts a sampling run,
1 on usage or I/O errors.
"""

import argparse
import csv
import io
import json
import sys
from collections import Counter

import numpy as np

from ..errors import BuildError, EstimationError, FairnnError, SamplingError
from ..fair_nn import (fair_ann_approx, fair_nn_approx, fair_nn_dependent,
                       fair_nn_independent, fair_nn_independent_whp)
from ..lsh import EuclideanGrid, MinHash1Bit, build_lsh, standard_ann_query
from .data import FORMATS, ingest, synthetic_set_dataset
from .experiments import (Algorithm, DEFAULT_ALGORITHMS, ExperimentConfig,
                          run_case_study, run_fairness_experiment,
                          run_ratio_study, run_timing)
from .storage import load_index, save_index

QUERY_MODES = ("dependent", "ann-approx", "nn-approx", "independent",
               "independent-whp", "standard")


def write_rows(rows, fmt, out):
    if not rows:
        return
    if fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    else:
        for row in rows:
            out.write(json.dumps(row, sort_keys=True) + "\n")


def _add_io_args(p):
    p.add_argument("--format", choices=("csv", "json-lines"),
                   default="json-lines", help="output row format")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _add_data_args(p):
    p.add_argument("--data", required=True, help="dataset file")
    p.add_argument("--data-format", choices=FORMATS, default="id-set-lines")
    p.add_argument("--kind", choices=("set", "vector", "unit"), default=None,
                   help="override the inferred dataset kind")


def _add_index_params(p):
    p.add_argument("--k", type=int, default=8, help="hashes per table key")
    p.add_argument("--L", type=int, default=100, help="tables per replica")
    p.add_argument("--t-rep", type=int, default=1, help="replica count")
    p.add_argument("--w", type=float, default=None, help="grid width (Euclidean)")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--approx-radius", type=float, default=None)
    p.add_argument("--sim-near", type=float, default=None,
                   help="near similarity threshold (set data)")
    p.add_argument("--sim-far", type=float, default=None,
                   help="far similarity threshold (set data)")
    p.add_argument("--seed", type=int, default=0)


def _build_index_from_args(args):
    ds = ingest(args.data, args.data_format, kind=args.kind)
    if ds.kind == "set":
        kind = MinHash1Bit(args.k)
        return ds, build_lsh(ds.items, kind, L=args.L, t_rep=args.t_rep,
                             radius=args.radius,
                             approx_radius=args.approx_radius,
                             sim_near=args.sim_near, sim_far=args.sim_far,
                             seed=args.seed)
    if args.w is None:
        raise BuildError("Euclidean indexing needs --w")
    kind = EuclideanGrid(args.k, args.w)
    return ds, build_lsh(ds.items, kind, L=args.L, t_rep=args.t_rep,
                         radius=args.radius, approx_radius=args.approx_radius,
                         seed=args.seed)


def cmd_build(args):
    ds, index = _build_index_from_args(args)
    save_index(index, args.index, id_map=ds.id_map)
    print(f"built index over {index.n} points -> {args.index}", file=sys.stderr)
    return []


def cmd_query(args):
    from .storage import read_params
    index = load_index(args.index)
    id_map = read_params(args.index).get("id_map")
    intern = {tok: i for i, tok in enumerate(id_map)} if id_map else None
    queries = ingest(args.queries, args.query_format,
                     kind="set" if index.is_jaccard else "vector",
                     intern=intern)
    rng = np.random.default_rng(args.seed)
    if args.mode in ("independent", "independent-whp"):
        index.attach_sketches()
    rows = []
    for qid in range(len(queries)):
        q = queries.items[qid]
        counts = Counter()
        for _ in range(args.repeats):
            if args.mode == "dependent":
                ans = fair_nn_dependent(index, q, rng)
                x = ans.point if ans.ok else None
            elif args.mode == "ann-approx":
                ans = fair_ann_approx(index, q, args.eps, rng)
                x = ans.point if ans.ok else None
            elif args.mode == "nn-approx":
                ans = fair_nn_approx(index, q, args.eps, rng)
                x = ans.point if ans.ok else None
            elif args.mode == "independent":
                ans = fair_nn_independent(index, q, rng)
                x = ans.point if ans.ok else None
            elif args.mode == "independent-whp":
                ans = fair_nn_independent_whp(index, q, rng)
                x = ans.point if ans.ok else None
            else:
                x = standard_ann_query(index, q)
            counts[x if x is not None else -1] += 1
        for element_id in sorted(counts):
            rows.append({"query_id": qid, "element_id": element_id,
                         "count": counts[element_id]})
    return rows


def _experiment_config(args, algorithms=None):
    radius = args.radius
    approx_radius = args.approx_radius
    if args.sim_near is not None:
        radius = 1.0 - args.sim_near
        approx_radius = 1.0 - args.sim_far
    if radius is None or approx_radius is None:
        raise BuildError("need --radius/--approx-radius or --sim-near/--sim-far")
    return ExperimentConfig(
        radius=radius, approx_radius=approx_radius, k=args.k, L=args.L,
        t_rep=args.t_rep, w=args.w,
        alpha=getattr(args, "alpha", None), beta=getattr(args, "beta", None),
        num_queries=args.num_queries, knn_rank=args.knn_rank,
        query_threshold=args.query_threshold,
        repeats_per_near=getattr(args, "repeats_per_near", 100),
        seed=args.seed,
        algorithms=algorithms or DEFAULT_ALGORITHMS)


def cmd_fairness(args):
    ds = ingest(args.data, args.data_format, kind=args.kind)
    algorithms = tuple(Algorithm(a) for a in args.algorithms.split(",")) \
        if args.algorithms else DEFAULT_ALGORITHMS
    cfg = _experiment_config(args, algorithms)
    report = run_fairness_experiment(ds, cfg)
    rows = [dict(row, table="tvd") for row in report.tvd_rows]
    rows += [dict(row, table="freq-delta") for row in report.freq_delta_rows]
    return rows


def cmd_ratio(args):
    ds = ingest(args.data, args.data_format, kind=args.kind)
    radii = [float(x) for x in args.radii.split(",")]
    factors = [float(x) for x in args.factors.split(",")]
    return run_ratio_study(ds, radii, factors, num_queries=args.num_queries,
                           knn_rank=args.knn_rank,
                           threshold=args.query_threshold, seed=args.seed)


def cmd_case_study(args):
    result = run_case_study(repeats=args.repeats,
                            fair_repeats=args.fair_repeats, seed=args.seed)
    rows = [{"metric": "jaccard", **{k: v for k, v in result["jaccard"].items()}},
            {"metric": "naive_freq", **result["naive_freq"]},
            {"metric": "fair_counts",
             **{str(k): v for k, v in result["fair_counts"].items()}}]
    return rows


def cmd_timing(args):
    ds = ingest(args.data, args.data_format, kind=args.kind)
    cfg = _experiment_config(args)
    return run_timing(ds, cfg, draws=args.draws)


def cmd_selftest(args):
    """Quick behavioural checks of the core samplers."""
    from scipy.stats import chisquare
    from ..set_family import SubFamilyQuery, build_family
    from ..sketches import DistinctSketch
    from ..union_sampling import sample_exact_degree, urn_probe_values

    rng = np.random.default_rng(0)
    checks = []

    fam = build_family([[0, 1, 2, 3], [2, 3, 4], [4, 5]], seed=1)
    q = SubFamilyQuery(set_ids=[0, 1, 2])
    counts = Counter(sample_exact_degree(fam, q, rng).element
                     for _ in range(6000))
    p = chisquare([counts[i] for i in range(6)]).pvalue
    checks.append(("exact-degree uniformity (chi-square p > 0.001)", p > 0.001))

    vals = urn_probe_values(6, 3, 200000, rng)
    checks.append(("urn probe mean near 1/3",
                   abs(float(vals.mean()) - 1 / 3) < 0.01))

    sk = DistinctSketch(seed=7)
    sk.insert_many(np.arange(50))  # below the row capacity, counts exactly
    checks.append(("sketch exact below capacity", sk.estimate() == 50.0))

    ok = True
    for name, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'}: {name}")
        ok = ok and passed
    if not ok:
        raise SamplingError("selftest failed")
    return []


def build_parser():
    ap = argparse.ArgumentParser(prog="fairnn",
                                 description="fair near-neighbor sampling")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and save an index")
    _add_data_args(p)
    _add_index_params(p)
    p.add_argument("--index", required=True, help="output index file")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="sample near neighbors for query points")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True, help="query point file")
    p.add_argument("--query-format", choices=FORMATS, default="id-set-lines")
    p.add_argument("--mode", choices=QUERY_MODES, default="independent")
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--eps", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    _add_io_args(p)
    p.set_defaults(func=cmd_query)

    for name, fn in (("fairness", cmd_fairness), ("timing", cmd_timing)):
        p = sub.add_parser(name)
        _add_data_args(p)
        _add_index_params(p)
        p.add_argument("--num-queries", type=int, default=50)
        p.add_argument("--knn-rank", type=int, default=40)
        p.add_argument("--query-threshold", type=float, default=0.0)
        if name == "fairness":
            p.add_argument("--repeats-per-near", type=int, default=100)
            p.add_argument("--algorithms", default=None,
                           help="comma-separated strategy names")
        else:
            p.add_argument("--draws", type=int, default=100)
        _add_io_args(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("ratio", help="neighborhood growth ratio study")
    _add_data_args(p)
    p.add_argument("--radii", required=True, help="comma-separated radii")
    p.add_argument("--factors", required=True, help="comma-separated factors")
    p.add_argument("--num-queries", type=int, default=50)
    p.add_argument("--knn-rank", type=int, default=40)
    p.add_argument("--query-threshold", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    _add_io_args(p)
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("case-study", help="adversarial clustered-set study")
    p.add_argument("--repeats", type=int, default=100000)
    p.add_argument("--fair-repeats", type=int, default=300)
    p.add_argument("--seed", type=int, default=0)
    _add_io_args(p)
    p.set_defaults(func=cmd_case_study)

    p = sub.add_parser("selftest", help="quick behavioural checks")
    _add_io_args(p)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        rows = args.func(args)
        fmt = getattr(args, "format", "json-lines")
        if getattr(args, "out", None):
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                write_rows(rows, fmt, fh)
        else:
            write_rows(rows, fmt, sys.stdout)
        return 0
    except (SamplingError, EstimationError) as exc:
        print(f"sampling failure event: {exc}", file=sys.stderr)
        return 2
    except (BuildError, FairnnError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
