"""Acceptance gate: one test (or tight test group) per shipped guarantee.

Each test prints a single PASS line on success, so a verbose run reads as a
checklist.  The two-decimal rounded targets 0.418 / 0.428 for the seven
patient instance are mid-computation rounding artifacts: the exact win
probabilities are 0.4215 and 0.432375, which differ from the rounded
figures by more than the 1e-3 tolerance.  Those two checks are therefore
expected failures (strict), and the exact values are pinned instead.
"""

import json
import math

import numpy as np
import pytest

from lastsuccess import adaptive as adp
from lastsuccess import horizon as hz
from lastsuccess import odds
from lastsuccess.errors import ConflictError
from lastsuccess.sessions import SessionStore, replay, state_json
from lastsuccess.simulate import SimConfig, simulate_adaptive, simulate_known

SEVEN = [0.35, 0.1, 0.05, 0.3, 0.1, 0.15, 0.25]
SEVEN_SWAPPED = [0.3, 0.1, 0.05, 0.35, 0.1, 0.15, 0.25]


def _passed(line: str) -> None:
    print(f"[acceptance] PASS  {line}")


def _random_profile(rng: np.random.Generator, n: int) -> odds.OddsProfile:
    return odds.odds_of(rng.uniform(0.01, 0.99, size=n).tolist())


# 1. seven-patient example regression


def test_example_regression_threshold_index():
    plan = odds.stop_index(odds.odds_of(SEVEN))
    assert plan.s == 4
    _passed("example regression: s = 4 exactly")


@pytest.mark.xfail(
    strict=True,
    reason="0.418 is a two-decimal mid-computation rounding; exact V = 0.4215",
)
def test_example_regression_rounded_value_within_1e3():
    plan = odds.stop_index(odds.odds_of(SEVEN))
    assert abs(plan.V - 0.418) <= 1e-3


@pytest.mark.xfail(
    strict=True,
    reason="0.428 is a two-decimal mid-computation rounding; exact V = 0.432375",
)
def test_example_regression_swapped_rounded_value_within_1e3():
    plan = odds.stop_index(odds.odds_of(SEVEN_SWAPPED))
    assert abs(plan.V - 0.428) <= 1e-3


def test_example_regression_exact_values():
    plan = odds.stop_index(odds.odds_of(SEVEN))
    swapped = odds.stop_index(odds.odds_of(SEVEN_SWAPPED))
    assert plan.V == pytest.approx(0.4215, abs=1e-12)
    assert swapped.V == pytest.approx(0.432375, abs=1e-12)
    _passed("example regression: exact V = 0.4215 and 0.432375 (1e-12)")


# 2. oracle equivalence


def test_value_curve_matches_enumeration_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(1, 13))
        profile = _random_profile(rng, n)
        curve = odds.value_curve(profile)
        for s in range(1, n + 1):
            assert curve.values[s - 1] == pytest.approx(
                odds.win_probability_oracle(profile, s), abs=1e-10
            )
    _passed("oracle equivalence: 200 profiles (n <= 12), every s, 1e-10")


def test_threshold_and_dual_threshold_agree():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        n = int(rng.integers(1, 31))
        profile = _random_profile(rng, n)
        assert odds.stop_index(profile).s == odds.stop_index_dual(profile)
    _passed("oracle equivalence: stop_index == stop_index_dual on 10^4 profiles")


# 3. unimodality, argmax optimality, 1/e lower bound


def test_unimodality_argmax_and_lower_bound():
    rng = np.random.default_rng(99)
    bound_checked = 0
    for _ in range(1000):
        n = int(rng.integers(1, 41))
        profile = _random_profile(rng, n)
        plan = odds.stop_index(profile)
        curve = odds.value_curve(profile)
        assert curve.is_unimodal()
        assert curve.argmax() == plan.s
        assert max(curve.values) == pytest.approx(plan.V, abs=1e-12)
        assert odds.lower_bound_check(plan, profile)
        if math.fsum(profile.odds) >= 1.0:
            bound_checked += 1
            assert plan.V >= 1.0 / math.e - 1e-12
    assert bound_checked > 0
    _passed(
        "unimodality + argmax at s on 1000 instances; "
        f"1/e bound on the {bound_checked} with odds sum >= 1"
    )


# 4. Monte Carlo consistency


def test_monte_carlo_win_rate_and_bitwise_determinism():
    profile = odds.odds_of(SEVEN)
    plan = odds.stop_index(profile)
    config = SimConfig(replications=1_000_000, seed=20240817, scenario="known-odds")
    report = simulate_known(profile, plan, config)
    sigma = math.sqrt(plan.V * (1.0 - plan.V) / config.replications)
    assert abs(report.win_rate - plan.V) <= 4.0 * sigma
    again = simulate_known(profile, plan, config)
    assert report.to_json() == again.to_json()
    for key, arr in report.per_replication.items():
        assert np.array_equal(arr, again.per_replication[key])
    _passed(
        f"Monte Carlo: win rate {report.win_rate:.6f} within 4 sigma of "
        f"{plan.V} on 10^6 replications; reruns bitwise identical"
    )


# 5. estimator unbiasedness


@pytest.mark.parametrize(
    "true_p, scores, k",
    [
        (0.1, adp.health_scores([0.8] * 20), 20),
        (0.3, adp.spread_scores(0.4, 0.9, list(range(1, 11))), 10),
        (0.5, adp.health_scores([0.5] * 5), 5),
    ],
    ids=["p0.1-equal0.8-k20", "p0.3-spread-k10", "p0.5-equal0.5-k5"],
)
def test_success_rate_estimator_is_unbiased(true_p, scores, k):
    reps = 100_000
    rng = np.random.default_rng(4242)
    h = np.asarray(scores.h[:k])
    outcomes = rng.random((reps, k)) < h * true_p
    H_k = scores.H[k - 1]
    estimates = outcomes.sum(axis=1) / H_k
    mean = estimates.mean()
    se = estimates.std(ddof=1) / math.sqrt(reps)
    assert abs(mean - true_p) <= 4.0 * se
    _passed(
        f"estimator unbiased: mean {mean:.5f} within 4 SE of p = {true_p} "
        f"(k = {k})"
    )


# 6. adaptive asymptotics


def test_adaptive_gap_shrinks_with_sequence_length():
    true_p = 0.1
    reps = 60_000
    gaps, halfwidths = [], []
    for i, n in enumerate([10, 25, 50, 100, 200]):
        scores = adp.health_scores([0.9] * n)
        config = SimConfig(replications=reps, seed=600 + i, scenario="adaptive")
        report = simulate_adaptive(true_p, scores, config)
        gaps.append(report.benchmark - report.win_rate)
        halfwidths.append(report.ci99_halfwidth)
    for i in range(len(gaps) - 1):
        # monotone up to the CI noise of the two estimates involved
        assert gaps[i + 1] <= gaps[i] + halfwidths[i] + halfwidths[i + 1]
    assert gaps[-1] < gaps[0] - (halfwidths[0] + halfwidths[-1])
    _passed(
        "adaptive asymptotics: benchmark gap "
        + " -> ".join(f"{g:.4f}" for g in gaps)
        + " shrinks over n = 10..200, n=200 significantly below n=10"
    )


# 7. horizon closed form


def test_constant_rate_refusal_time_matches_closed_form():
    t = 10.0
    for rate, h_pair in [(2.0, (0.8, 0.6)), (0.5, (0.9, 0.7)), (5.0, (0.3, 0.5))]:
        model = hz.ArrivalModel(intensity=hz.Intensity.constant(rate, t))
        model = hz.update_on_arrival(model, 0.5, h_pair[0], True)
        model = hz.update_on_arrival(model, 0.9, h_pair[1], False)
        predictor = 1.0 / (h_pair[0] + h_pair[1])
        mean_h = (h_pair[0] + h_pair[1]) / 2.0
        closed = t - 1.0 / (rate * predictor * mean_h)
        clamped = min(t, max(0.9, closed))
        assert hz.first_refusal_time(model, now=0.9) == pytest.approx(
            clamped, abs=1e-9 * t
        )
    _passed("horizon closed form: constant-rate refusal time within 1e-9 * t")


def test_piecewise_refusal_time_matches_grid_scan():
    intensity = hz.Intensity(bounds=(0.0, 2.0, 5.0, 12.0), rates=(4.0, 0.5, 1.5))
    model = hz.ArrivalModel(intensity=intensity)
    model = hz.update_on_arrival(model, 0.2, 0.7, True)
    model = hz.update_on_arrival(model, 0.4, 0.5, False)
    model = hz.update_on_arrival(model, 1.1, 0.6, True)
    t = intensity.horizon
    grid = np.linspace(0.0, t, 1_000_001)
    # vectorized remaining-rate integral over the grid, piece by piece
    remaining = np.zeros_like(grid)
    for i, r in enumerate(intensity.rates):
        lo, hi = intensity.bounds[i], intensity.bounds[i + 1]
        remaining += r * np.clip(hi - np.maximum(grid, lo), 0.0, hi - lo)
    values = remaining * model.predictor * model.mean_health
    first_at_or_below = grid[np.argmax(values <= 1.0)]
    step = t / 1_000_000
    assert hz.first_refusal_time(model) == pytest.approx(
        first_at_or_below, abs=step + 1e-9 * t
    )
    _passed("horizon closed form: piecewise case matches a 10^6-point grid scan")


# 8. session determinism


def test_session_logs_replay_byte_for_byte(tmp_path):
    store = SessionStore(tmp_path)
    p1 = store.create("P1", {"probs": SEVEN})
    for outcome in ["-", "-", "-", "+"]:
        store.record(p1.id, outcome)
    p2 = store.create("P2", {"h": [0.5] * 6})
    store.record(p2.id, "-")
    store.consent(p2.id)
    store.record(p2.id, "+")
    p4 = store.create(
        "P4", {"bounds": [0.0, 10.0], "rates": [1.0], "prior_mean_health": 0.5}
    )
    store.record(p4.id, "+", arrival_time=1.0, h_observed=0.8)

    for sid in [p1.id, p2.id, p4.id]:
        live = store.get(sid)
        replayed = replay(sid, list(live.events))
        live_bytes = json.dumps(
            state_json(live), sort_keys=True, separators=(",", ":")
        )
        replay_bytes = json.dumps(
            state_json(replayed), sort_keys=True, separators=(",", ":")
        )
        assert live_bytes == replay_bytes
        reopened = SessionStore(tmp_path).get(sid)
        assert (
            json.dumps(state_json(reopened), sort_keys=True, separators=(",", ":"))
            == live_bytes
        )
    _passed("session determinism: logs replay byte-for-byte, live and reopened")


def test_stop_is_terminal_and_outcome_posts_are_idempotent(tmp_path):
    store = SessionStore(tmp_path)
    state = store.create("P1", {"probs": SEVEN})
    for outcome in ["-", "-", "-", "+"]:
        state = store.record(state.id, outcome)
    assert state.status == "Stopped"
    with pytest.raises(ConflictError):
        store.record(state.id, "-")

    other = store.create("P1", {"probs": SEVEN})
    first = store.record(other.id, "-", idempotency_key="evt-1")
    second = store.record(other.id, "-", idempotency_key="evt-1")
    assert first.k == second.k == 1
    assert json.dumps(state_json(first), sort_keys=True) == json.dumps(
        state_json(second), sort_keys=True
    )
    third = store.record(other.id, "-", idempotency_key="evt-2")
    assert third.k == 2
    _passed("session determinism: Stop terminal; duplicate posts never double-count")
