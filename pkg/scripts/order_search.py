"""Search treatment orders: how much does reordering the queue buy?

The win probability of the stop-at-next-success rule depends on the order
of the treatments.  This script prints the plan for the order as given,
then the exhaustive best order (n <= 10) and its value.

Usage:
    python3 scripts/order_search.py --probs 0.35,0.1,0.05,0.3,0.1,0.15,0.25
"""

import argparse
import json

from lastsuccess import odds


def parse_probs(text: str) -> list[float]:
    return [float(part) for part in text.replace(",", " ").split()]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--probs", type=parse_probs,
                        default=[0.35, 0.1, 0.05, 0.3, 0.1, 0.15, 0.25])
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()

    profile = odds.odds_of(args.probs)
    plan = odds.stop_index(profile)
    perm, best_plan = odds.best_order(profile)
    best_probs = [profile.probs[i] for i in perm]

    if args.json:
        print(json.dumps({
            "probs": list(profile.probs),
            "s": plan.s,
            "V": plan.V,
            "best_order": [i + 1 for i in perm],
            "best_probs": best_probs,
            "best_s": best_plan.s,
            "best_V": best_plan.V,
            "lift": best_plan.V - plan.V,
        }, sort_keys=True))
        return 0

    print(f"as given    V = {plan.V:.6f} at s = {plan.s}")
    print(f"best order  V = {best_plan.V:.6f} at s = {best_plan.s}")
    print(f"order       {' '.join(str(i + 1) for i in perm)}")
    print(f"probs       {' '.join(f'{p:g}' for p in best_probs)}")
    print(f"lift        {best_plan.V - plan.V:+.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
