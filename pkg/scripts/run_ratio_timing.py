"""Neighborhood growth ratios and per-strategy timing on synthetic data.

The ratio table reports n(q, c*r) / n(q, r): how many extra points an
approximate neighborhood admits.  The timing table reports wall-clock
seconds per draw for each sampling strategy on the same workload.
"""

import argparse

from fairnn.bench import (ExperimentConfig, run_ratio_study, run_timing,
                          synthetic_vector_dataset)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--clusters", type=int, default=8)
    ap.add_argument("--per-cluster", type=int, default=40)
    ap.add_argument("--radius", type=float, default=1.8)
    ap.add_argument("--draws", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ds = synthetic_vector_dataset(args.clusters, args.per_cluster, dim=16,
                                  spread=0.4, seed=args.seed)
    rows = run_ratio_study(ds, radii=[args.radius], factors=[1.0, 1.5, 2.0],
                           num_queries=10, knn_rank=10, seed=args.seed)
    by_factor = {}
    for row in rows:
        by_factor.setdefault(row["factor"], []).append(row["ratio"])
    print("neighborhood growth n(q, c*r) / n(q, r):")
    for c, ratios in sorted(by_factor.items()):
        finite = [r for r in ratios if r != float("inf")]
        mean = sum(finite) / len(finite) if finite else float("nan")
        print(f"  c={c:.1f}  mean ratio {mean:.2f}  over {len(finite)} queries")

    cfg = ExperimentConfig(radius=args.radius, approx_radius=2 * args.radius,
                           k=6, L=20, w=3.0, num_queries=10, knn_rank=10,
                           seed=args.seed)
    print("\nseconds per draw:")
    for row in run_timing(ds, cfg, draws=args.draws):
        print(f"  {row['algorithm']:>18}  {row['seconds_per_draw']:.6f}")


if __name__ == "__main__":
    main()
