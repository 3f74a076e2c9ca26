"""Monte Carlo checks for all three protocols.

Replications are drawn in fixed-size batches, each from its own
counter-based substream (Philox keyed by the seed, jumped per batch), and
aggregated with integer counters, so results are bitwise identical for a
given (seed, config) regardless of execution order or parallel schedule.

Win accounting is uniform across scenarios: a replication wins when the
realized stopping index equals the index of the last success of the full
outcome word.  Words with no success at all form their own class (reported
as no_success_rate) and count as losses.  Futile treatments are the ones
administered after the last success.  Two baselines bound every strategy:
the prophet (knows the outcomes, treats only successes) wins by
construction, and the half-prophet (knows only the realized success count
m) stops on the m-th success, so it wins exactly when m >= 1.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import adaptive as adp
from . import horizon as hz
from .errors import DomainError
from .odds import OddsProfile, StopPlan, odds_of, stop_index
from .recommend import Action

__all__ = ["SimConfig", "SimReport", "simulate_known", "simulate_adaptive", "simulate_horizon"]

# two-sided 99% normal quantile for the binomial CI half-width
_Z99 = 2.5758293035489004

_SCENARIOS = ("known-odds", "adaptive", "horizon")


@dataclass(frozen=True)
class SimConfig:
    replications: int
    seed: int
    scenario: str = "known-odds"
    batch_size: int = 8192

    def __post_init__(self) -> None:
        if not isinstance(self.replications, int) or self.replications < 1:
            raise DomainError(f"replications = {self.replications!r} must be >= 1")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise DomainError("seed must be an integer in [0, 2^64)")
        if self.scenario not in _SCENARIOS:
            raise DomainError(f"scenario {self.scenario!r} not one of {_SCENARIOS}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise DomainError(f"batch_size = {self.batch_size!r} must be >= 1")


@dataclass
class SimReport:
    """Aggregated simulation figures plus optional per-replication arrays."""

    scenario: str
    replications: int
    seed: int
    win_rate: float
    ci99_halfwidth: float
    mean_futile: float
    prophet_rate: float
    half_prophet_rate: float
    no_success_rate: float
    benchmark: float | None = None
    extras: dict[str, Any] = field(default_factory=dict)
    per_replication: dict[str, np.ndarray] | None = field(default=None, repr=False)

    def to_json_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "scenario": self.scenario,
            "replications": self.replications,
            "seed": self.seed,
            "win_rate": self.win_rate,
            "ci99_halfwidth": self.ci99_halfwidth,
            "mean_futile": self.mean_futile,
            "prophet_rate": self.prophet_rate,
            "half_prophet_rate": self.half_prophet_rate,
            "no_success_rate": self.no_success_rate,
            "benchmark": self.benchmark,
        }
        out.update(self.extras)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def write_csv(self, path: str) -> None:
        """One row per replication: win, futile count, stopping index, successes."""
        if self.per_replication is None:
            raise DomainError("per-replication arrays were not retained")
        cols = self.per_replication
        names = list(cols)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["replication", *names])
            for i in range(self.replications):
                writer.writerow([i, *(int(cols[c][i]) for c in names)])


def _substream(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(batch))


def _batches(config: SimConfig) -> list[int]:
    full, rest = divmod(config.replications, config.batch_size)
    return [config.batch_size] * full + ([rest] if rest else [])


def _ci_halfwidth(rate: float, reps: int) -> float:
    return _Z99 * math.sqrt(rate * (1.0 - rate) / reps)


def _finish(
    scenario: str,
    config: SimConfig,
    wins: int,
    futile_total: int,
    half_prophet_wins: int,
    no_success: int,
    benchmark: float | None,
    extras: dict[str, Any],
    arrays: dict[str, np.ndarray],
) -> SimReport:
    reps = config.replications
    win_rate = wins / reps
    return SimReport(
        scenario=scenario,
        replications=reps,
        seed=config.seed,
        win_rate=win_rate,
        ci99_halfwidth=_ci_halfwidth(win_rate, reps),
        mean_futile=futile_total / reps,
        prophet_rate=1.0,
        half_prophet_rate=half_prophet_wins / reps,
        no_success_rate=no_success / reps,
        benchmark=benchmark,
        extras=extras,
        per_replication=arrays,
    )


def simulate_known(profile: OddsProfile, plan: StopPlan, config: SimConfig) -> SimReport:
    """Run the fixed-threshold rule on words drawn from the known probabilities."""
    n = profile.n
    if not (1 <= plan.s <= n):
        raise DomainError(f"plan index s = {plan.s} outside 1..{n}")
    p = np.asarray(profile.probs)
    s0 = plan.s - 1
    wins = futile_total = hp_wins = no_succ = 0
    win_col, futile_col, stop_col, succ_col = [], [], [], []
    for batch, size in enumerate(_batches(config)):
        rng = _substream(config.seed, batch)
        outcomes = rng.random((size, n)) < p
        any_succ = outcomes.any(axis=1)
        last = np.where(
            any_succ, n - np.argmax(outcomes[:, ::-1], axis=1), 0
        )  # 1-based, 0 when none
        tail = outcomes[:, s0:]
        armed_hit = tail.any(axis=1)
        first_from_s = s0 + 1 + np.argmax(tail, axis=1)  # 1-based, valid when armed_hit
        tau = np.where(armed_hit, first_from_s, n)
        win = armed_hit & (first_from_s == last)
        futile = np.maximum(0, tau - last)
        wins += int(win.sum())
        futile_total += int(futile.sum())
        hp_wins += int(any_succ.sum())
        no_succ += int(size - any_succ.sum())
        win_col.append(win)
        futile_col.append(futile.astype(np.int32))
        stop_col.append(tau.astype(np.int32))
        succ_col.append(outcomes.sum(axis=1).astype(np.int32))
    arrays = {
        "win": np.concatenate(win_col),
        "futile": np.concatenate(futile_col),
        "stop_index": np.concatenate(stop_col),
        "successes": np.concatenate(succ_col),
    }
    return _finish(
        "known-odds", config, wins, futile_total, hp_wins, no_succ,
        benchmark=plan.V, extras={"threshold_index": plan.s}, arrays=arrays,
    )


def _stop_table(scores: adp.HealthScores) -> np.ndarray:
    """fire[k, S] = does the online rule stop after k outcomes with S successes.

    The rule depends on the history only through (k, S), so tabulating the
    production should_stop over every reachable pair is an exact memoization.
    """
    n = scores.n
    fire = np.zeros((n + 1, n + 1), dtype=bool)
    for k in range(1, n + 1):
        for S in range(0, k + 1):
            state = adp.AdaptiveState(
                scores=scores, outcomes=(True,) * S + (False,) * (k - S)
            )
            fire[k, S] = adp.should_stop(state).action is Action.STOP
    return fire


def simulate_adaptive(true_p: float, scores: adp.HealthScores, config: SimConfig) -> SimReport:
    """Run the estimated odds rule online against draws with p_k = h_k * true_p.

    As with the known-odds policy, a stop executes on a success: the sequence
    ends at the first success whose post-update rule verdict is Stop.  Verdicts
    reached on failure outcomes arm the rule without executing it.  Consent
    pauses are assumed granted (the rule keeps treating while S = 0);
    replications with no success at all are reported in their own class.  The
    benchmark is the win probability of the known-p rule on the same
    probabilities, the target the estimator approaches as n grows.
    """
    if not (0.0 < true_p < 1.0):
        raise DomainError(f"true_p = {true_p!r} outside the open interval (0, 1)")
    n = scores.n
    h = np.asarray(scores.h)
    p = h * true_p
    bench_plan = stop_index(odds_of(p))
    fire = _stop_table(scores)
    k_index = np.arange(1, n + 1)
    wins = futile_total = hp_wins = no_succ = 0
    win_col, futile_col, stop_col, succ_col = [], [], [], []
    for batch, size in enumerate(_batches(config)):
        rng = _substream(config.seed, batch)
        outcomes = rng.random((size, n)) < p
        S = np.cumsum(outcomes, axis=1)
        fired = fire[k_index[None, :], S] & outcomes
        any_fire = fired.any(axis=1)
        tau = np.where(any_fire, 1 + np.argmax(fired, axis=1), n)
        any_succ = outcomes.any(axis=1)
        last = np.where(any_succ, n - np.argmax(outcomes[:, ::-1], axis=1), 0)
        win = any_succ & (tau == last)
        futile = np.maximum(0, tau - last)
        wins += int(win.sum())
        futile_total += int(futile.sum())
        hp_wins += int(any_succ.sum())
        no_succ += int(size - any_succ.sum())
        win_col.append(win)
        futile_col.append(futile.astype(np.int32))
        stop_col.append(tau.astype(np.int32))
        succ_col.append(S[:, -1].astype(np.int32))
    arrays = {
        "win": np.concatenate(win_col),
        "futile": np.concatenate(futile_col),
        "stop_index": np.concatenate(stop_col),
        "successes": np.concatenate(succ_col),
    }
    return _finish(
        "adaptive", config, wins, futile_total, hp_wins, no_succ,
        benchmark=bench_plan.V,
        extras={"benchmark_threshold_index": bench_plan.s, "true_p": true_p, "n": n},
        arrays=arrays,
    )


def _draw_arrivals(rng: np.random.Generator, intensity: hz.Intensity) -> list[float]:
    """Inhomogeneous Poisson times on [0, t] by thinning a max-rate stream."""
    cap = intensity.max_rate
    t = intensity.horizon
    times: list[float] = []
    if cap <= 0.0:
        return times
    u = 0.0
    while True:
        u += rng.exponential(1.0 / cap)
        if u > t:
            return times
        if rng.random() * cap < intensity.rate_at(u):
            times.append(u)


def simulate_horizon(
    model: hz.ArrivalModel,
    true_p: float,
    config: SimConfig,
    health: float | tuple[float, float] | None = None,
) -> SimReport:
    """Run the refusal rule online on thinned Poisson arrival streams.

    Arrival health scores are drawn per the `health` argument: a constant,
    a (lo, hi) uniform range, or the model's prior mean when omitted.  New
    requests are refused from the first treated success whose post-update
    remaining success mass is <= 1; while the predictor is 0 the consent
    path keeps treating, mirroring the discrete protocol.  The benchmark is
    the offline known-p rule applied to each realized arrival sequence (it
    knows the probabilities and the sequence length, not the outcomes).
    """
    if not (0.0 < true_p < 1.0):
        raise DomainError(f"true_p = {true_p!r} outside the open interval (0, 1)")
    if model.n_arrivals:
        raise DomainError("simulation expects a model with no recorded arrivals")
    if health is None:
        health_draw = lambda rng: model.prior_mean_health
    elif isinstance(health, tuple):
        lo, hi = health
        if not (0.0 < lo <= hi < 1.0):
            raise DomainError(f"health range ({lo!r}, {hi!r}) outside (0, 1)")
        health_draw = lambda rng: rng.uniform(lo, hi)
    else:
        if not (0.0 < health < 1.0):
            raise DomainError(f"health = {health!r} outside the open interval (0, 1)")
        health_draw = lambda rng: float(health)

    wins = futile_total = hp_wins = no_succ = oracle_wins = 0
    arrivals_total = 0
    win_col, futile_col, stop_col, succ_col = [], [], [], []
    for batch, size in enumerate(_batches(config)):
        rng = _substream(config.seed, batch)
        for _ in range(size):
            times = _draw_arrivals(rng, model.intensity)
            arrivals_total += len(times)
            state = model
            word: list[bool] = []
            healths: list[float] = []
            treated = 0
            refusing = False
            for u in times:
                h = health_draw(rng)
                success = bool(rng.random() < h * true_p)
                healths.append(h)
                word.append(success)
                if refusing:
                    continue
                state = hz.update_on_arrival(state, u, h, success)
                treated += 1
                if success and hz.refusal_integral(state, u).refuse_from_now:
                    refusing = True
            m = len(word)
            last = max((i + 1 for i in range(m) if word[i]), default=0)
            win = last >= 1 and treated == last
            futile = max(0, treated - last)
            wins += int(win)
            futile_total += futile
            hp_wins += int(last >= 1)
            no_succ += int(last == 0)
            if m >= 1:
                oracle_plan = stop_index(odds_of([h * true_p for h in healths]))
                first_from_s = next(
                    (i + 1 for i in range(oracle_plan.s - 1, m) if word[i]), 0
                )
                oracle_wins += int(first_from_s >= 1 and first_from_s == last)
            win_col.append(win)
            futile_col.append(futile)
            stop_col.append(treated)
            succ_col.append(sum(word))
    reps = config.replications
    arrays = {
        "win": np.array(win_col, dtype=bool),
        "futile": np.array(futile_col, dtype=np.int32),
        "stop_index": np.array(stop_col, dtype=np.int32),
        "successes": np.array(succ_col, dtype=np.int32),
    }
    return _finish(
        "horizon", config, wins, futile_total, hp_wins, no_succ,
        benchmark=oracle_wins / reps,
        extras={"true_p": true_p, "mean_arrivals": arrivals_total / reps},
        arrays=arrays,
    )
