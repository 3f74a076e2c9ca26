"""Sweep the sequence length and chart how the online rule closes the gap.

For each n the script simulates the estimated odds rule against draws with
p_k = h * p and compares the win rate to the known-p benchmark on the same
instance.  The gap should shrink as n grows.

Usage:
    python3 scripts/asymptotics_sweep.py --p 0.1 --h 0.9 --reps 60000 --seed 600
"""

import argparse
import json

from lastsuccess import adaptive as adp
from lastsuccess.simulate import SimConfig, simulate_adaptive


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+",
                        default=[10, 25, 50, 100, 200])
    parser.add_argument("--p", type=float, default=0.1)
    parser.add_argument("--h", type=float, default=0.9)
    parser.add_argument("--reps", type=int, default=60_000)
    parser.add_argument("--seed", type=int, default=600)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    rows = []
    for i, n in enumerate(args.n):
        scores = adp.health_scores([args.h] * n)
        config = SimConfig(replications=args.reps, seed=args.seed + i,
                           scenario="adaptive")
        report = simulate_adaptive(args.p, scores, config)
        rows.append({
            "n": n,
            "win_rate": report.win_rate,
            "benchmark": report.benchmark,
            "gap": report.benchmark - report.win_rate,
            "ci99": report.ci99_halfwidth,
        })

    if args.json:
        print(json.dumps(rows, sort_keys=True))
        return 0
    print(f"{'n':>6}  {'win rate':>10}  {'benchmark':>10}  {'gap':>10}  {'99% CI':>10}")
    for row in rows:
        print(f"{row['n']:>6}  {row['win_rate']:>10.4f}  {row['benchmark']:>10.4f}"
              f"  {row['gap']:>10.4f}  {row['ci99']:>10.4f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
