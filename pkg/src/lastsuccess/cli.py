"""Command-line front door: plan, simulate, serve, replay.

`plan` prints the protocol tableaus the way the source algorithms lay
them out on paper: lines (i)-(iii) hold the success probabilities, the
failure probabilities, and the odds in reversed order (two decimals for
display; the summary and --json carry the exact values).  For score-based
instances the known-constant lines are the scores and their prefix sums,
and recorded outcomes fill the remaining lines.

`simulate` runs the Monte Carlo engine for one scenario, `serve` hosts
the session API, and `replay` folds a stored event log and prints the
canonical session state JSON.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Any, Sequence

from . import adaptive as adp
from . import horizon as hz
from . import odds
from .errors import EngineError
from .simulate import SimConfig, simulate_adaptive, simulate_horizon, simulate_known

__all__ = ["main"]


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.replace(",", " ").split()]


def _load_instance(path: str) -> dict[str, Any]:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise EngineError("instance file must hold a JSON object")
    schema = doc.get("schema", 1)
    if schema != 1:
        raise EngineError(f"unsupported instance schema {schema!r}")
    return doc


def _two_dec(values: Sequence[float]) -> str:
    return "  ".join(f"{v:.2f}" for v in values)


def _tableau_lines(profile: odds.OddsProfile) -> list[str]:
    rev = list(reversed(profile.probs))
    rev_q = list(reversed(profile.fails))
    rev_r = list(reversed(profile.odds))
    return [
        f"(i)    {_two_dec(rev)}",
        f"(ii)   {_two_dec(rev_q)}",
        f"(iii)  {_two_dec(rev_r)}",
    ]


def _print_plan(profile: odds.OddsProfile, out) -> dict[str, Any]:
    plan = odds.stop_index(profile)
    curve = odds.value_curve(profile)
    for line in _tableau_lines(profile):
        print(line, file=out)
    print(f"s = {plan.s}", file=out)
    print(f"R = {plan.R!r}", file=out)
    print(f"Q = {plan.Q!r}", file=out)
    print(f"V = {plan.V!r}", file=out)
    return {
        "probs": list(profile.probs),
        "s": plan.s,
        "R": plan.R,
        "Q": plan.Q,
        "V": plan.V,
        "curve": list(curve.values),
    }


def _print_adaptive_plan(
    scores: adp.HealthScores, word: str | None, alpha: float | None, out
) -> dict[str, Any]:
    print(f"(i)    {_two_dec(scores.h)}", file=out)
    print(f"(ii)   {_two_dec(scores.H)}", file=out)
    payload: dict[str, Any] = {"h": list(scores.h), "H": list(scores.H)}
    if not word:
        print("record outcomes (+/-) to fill lines (iii) onward", file=out)
        return payload
    state = adp.from_outcomes(scores, word)
    running = [sum(1 for c in word[: i + 1] if c == "+") for i in range(state.k)]
    print(f"(iii)  {'  '.join(str(s) for s in running)}", file=out)
    terms = adp.estimated_future_odds(state)
    print(f"(iv)   {_two_dec(terms)}", file=out)
    report = adp.inference_report(state)
    p_future = [min(1.0, h_j * report.p_hat) for h_j in scores.h[state.k :]]
    q_future = [1.0 - pj for pj in p_future]
    print(f"(v)    {_two_dec(p_future)}", file=out)
    print(f"(vi)   {_two_dec(q_future)}", file=out)
    verdict = adp.should_stop(state)
    print(f"k = {state.k}, S = {state.S}, p_hat = {report.p_hat!r}", file=out)
    finite = math.isfinite(report.future_odds_sum)
    print(
        f"future odds sum = {report.future_odds_sum!r}"
        f" -> {verdict.action.value}",
        file=out,
    )
    print(f"expected further successes = {report.expected_further!r}", file=out)
    print(f"probability of no further success = {report.prob_no_further!r}", file=out)
    payload.update(
        {
            "outcomes": word,
            "k": state.k,
            "S": state.S,
            "p_hat": report.p_hat,
            "future_odds_sum": report.future_odds_sum if finite else None,
            "future_odds_finite": finite,
            "expected_further": report.expected_further,
            "prob_no_further": report.prob_no_further,
            "action": verdict.action.value,
        }
    )
    if alpha is not None:
        policy = adp.SequencePolicy(alpha=alpha)
        fired = adp.threshold_stop(report, policy)
        print(f"threshold alpha = {alpha!r}: {'Stop' if fired else 'Continue'}", file=out)
        payload["alpha"] = alpha
        payload["threshold_stop"] = fired
    return payload


def _cmd_plan(args: argparse.Namespace, out) -> int:
    doc: dict[str, Any] = {}
    if args.instance:
        doc = _load_instance(args.instance)
    probs = args.probs if args.probs is not None else doc.get("probs")
    h = args.h if args.h is not None else doc.get("h")
    alpha = args.alpha if args.alpha is not None else doc.get("alpha")
    if (probs is None) == (h is None):
        raise EngineError("provide exactly one of probs (known odds) or h (scores)")
    if probs is not None:
        profile = odds.odds_of(probs)
        payload = _print_plan(profile, out)
        if args.best_order:
            perm, plan = odds.best_order(profile)
            print(
                f"best order = {' '.join(str(i + 1) for i in perm)}"
                f" with V = {plan.V!r}",
                file=out,
            )
            payload["best_order"] = [i + 1 for i in perm]
            payload["best_order_V"] = plan.V
    else:
        if args.best_order:
            raise EngineError("--best-order applies to known-probability instances")
        scores = adp.health_scores(h)
        payload = _print_adaptive_plan(scores, args.outcomes, alpha, out)
    if args.json:
        print(json.dumps(payload, sort_keys=True), file=out)
    return 0


def _cmd_simulate(args: argparse.Namespace, out) -> int:
    doc: dict[str, Any] = {}
    if args.instance:
        doc = _load_instance(args.instance)
    config = SimConfig(
        replications=args.reps,
        seed=args.seed,
        scenario=args.scenario,
        batch_size=args.batch_size,
    )
    if args.scenario == "known-odds":
        probs = args.probs if args.probs is not None else doc.get("probs")
        if probs is None:
            raise EngineError("known-odds simulation needs probs")
        profile = odds.odds_of(probs)
        report = simulate_known(profile, odds.stop_index(profile), config)
    elif args.scenario == "adaptive":
        h = args.h if args.h is not None else doc.get("h")
        p = args.p if args.p is not None else doc.get("p")
        if h is None or p is None:
            raise EngineError("adaptive simulation needs h and p")
        report = simulate_adaptive(p, adp.health_scores(h), config)
    else:
        bounds = args.bounds if args.bounds is not None else doc.get("bounds")
        rates = args.rates if args.rates is not None else doc.get("rates")
        p = args.p if args.p is not None else doc.get("p")
        if bounds is None or rates is None or p is None:
            raise EngineError("horizon simulation needs bounds, rates and p")
        prior = (
            args.prior_mean_health
            if args.prior_mean_health is not None
            else doc.get("prior_mean_health", 0.5)
        )
        model = hz.ArrivalModel(
            intensity=hz.Intensity(bounds=tuple(bounds), rates=tuple(rates)),
            prior_mean_health=prior,
        )
        health: float | tuple[float, float] | None = None
        if args.health is not None:
            health = args.health[0] if len(args.health) == 1 else tuple(args.health)
        report = simulate_horizon(model, p, config, health=health)
    if args.csv:
        report.write_csv(args.csv)
    if args.json:
        print(report.to_json(), file=out)
        return 0
    print(f"scenario           {report.scenario}", file=out)
    print(f"replications       {report.replications}", file=out)
    print(f"win rate           {report.win_rate!r}", file=out)
    print(f"99% CI half-width  {report.ci99_halfwidth!r}", file=out)
    print(f"mean futile        {report.mean_futile!r}", file=out)
    print(f"prophet rate       {report.prophet_rate!r}", file=out)
    print(f"half-prophet rate  {report.half_prophet_rate!r}", file=out)
    print(f"no-success rate    {report.no_success_rate!r}", file=out)
    print(f"benchmark          {report.benchmark!r}", file=out)
    return 0


def _cmd_serve(args: argparse.Namespace, out) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(args.data_dir, token=args.token)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_replay(args: argparse.Namespace, out) -> int:
    from .sessions import SessionStore, state_json

    store = SessionStore(args.data_dir)
    if args.session_id:
        states = [store.get(args.session_id)]
    else:
        states = store.list_states()
    for state in states:
        print(json.dumps(state_json(state), sort_keys=True, separators=(",", ":")),
              file=out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lastsuccess",
        description="optimal stopping on the last success of a treatment sequence",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="compute a stopping plan or score tableau")
    plan.add_argument("--instance", help="JSON instance file")
    plan.add_argument("--probs", type=_float_list, help="success probabilities")
    plan.add_argument("--h", type=_float_list, help="health scores")
    plan.add_argument("--outcomes", help="recorded +/- word for score instances")
    plan.add_argument("--alpha", type=float, help="lower threshold probability")
    plan.add_argument("--best-order", action="store_true")
    plan.add_argument("--json", action="store_true")
    plan.set_defaults(func=_cmd_plan)

    sim = sub.add_parser("simulate", help="run Monte Carlo replications")
    sim.add_argument("--scenario", required=True,
                     choices=["known-odds", "adaptive", "horizon"])
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--reps", type=int, default=100_000)
    sim.add_argument("--batch-size", type=int, default=8192)
    sim.add_argument("--instance", help="JSON instance file")
    sim.add_argument("--probs", type=_float_list)
    sim.add_argument("--h", type=_float_list)
    sim.add_argument("--p", type=float, help="internal success probability")
    sim.add_argument("--bounds", type=_float_list)
    sim.add_argument("--rates", type=_float_list)
    sim.add_argument("--prior-mean-health", type=float)
    sim.add_argument("--health", type=_float_list,
                     help="lo,hi uniform range for arrival scores")
    sim.add_argument("--csv", help="write per-replication rows to this path")
    sim.add_argument("--json", action="store_true")
    sim.set_defaults(func=_cmd_simulate)

    serve = sub.add_parser("serve", help="host the session API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--data-dir", default="./sessions")
    serve.add_argument("--token", default=None)
    serve.set_defaults(func=_cmd_serve)

    rep = sub.add_parser("replay", help="fold stored event logs and print state")
    rep.add_argument("--data-dir", required=True)
    rep.add_argument("--session-id", default=None)
    rep.set_defaults(func=_cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
