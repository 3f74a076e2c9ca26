"""Monte Carlo engine checks: determinism, agreement with closed forms,
baseline dominance, and the thinning sampler's count statistics."""

import math

import numpy as np
import pytest

from lastsuccess.adaptive import health_scores
from lastsuccess.errors import DomainError
from lastsuccess.horizon import ArrivalModel, Intensity
from lastsuccess.odds import odds_of, stop_index
from lastsuccess.simulate import (
    SimConfig,
    _draw_arrivals,
    simulate_adaptive,
    simulate_horizon,
    simulate_known,
)

SEVEN = (0.35, 0.10, 0.05, 0.30, 0.10, 0.15, 0.25)
SEVEN_V = 0.4215


def _known_report(reps=200_000, seed=11, batch=8192):
    profile = odds_of(SEVEN)
    plan = stop_index(profile)
    config = SimConfig(replications=reps, seed=seed, batch_size=batch)
    return simulate_known(profile, plan, config)


def test_known_win_rate_within_monte_carlo_error():
    report = _known_report()
    se = math.sqrt(SEVEN_V * (1.0 - SEVEN_V) / report.replications)
    assert abs(report.win_rate - SEVEN_V) <= 4.0 * se
    assert report.benchmark == pytest.approx(SEVEN_V, abs=1e-12)


def test_known_runs_are_bitwise_identical():
    a = _known_report(reps=50_000)
    b = _known_report(reps=50_000)
    assert a.to_json() == b.to_json()
    assert a.per_replication is not None and b.per_replication is not None
    for name in a.per_replication:
        assert np.array_equal(a.per_replication[name], b.per_replication[name])


def test_known_totals_are_reduction_order_independent():
    report = _known_report(reps=50_000)
    win = report.per_replication["win"]
    futile = report.per_replication["futile"]
    # integer counters commute, so any summation order reproduces the report
    assert int(win[::-1].sum()) == round(report.win_rate * report.replications)
    assert int(futile[::-1].sum()) == round(report.mean_futile * report.replications)


def test_baseline_dominance_per_replication():
    report = _known_report(reps=50_000)
    win = report.per_replication["win"]
    successes = report.per_replication["successes"]
    assert np.all(successes[win] >= 1)
    assert report.win_rate <= report.half_prophet_rate <= report.prophet_rate == 1.0
    assert report.no_success_rate + report.half_prophet_rate == pytest.approx(1.0)


def test_futile_counts_zero_exactly_on_wins():
    report = _known_report(reps=50_000)
    win = report.per_replication["win"]
    futile = report.per_replication["futile"]
    assert np.all(futile[win] == 0)
    assert np.all(futile >= 0)


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(replications=0, seed=1)
    with pytest.raises(DomainError):
        SimConfig(replications=10, seed=-1)
    with pytest.raises(DomainError):
        SimConfig(replications=10, seed=1, scenario="unknown")
    with pytest.raises(DomainError):
        SimConfig(replications=10, seed=1, batch_size=0)


def test_adaptive_never_beats_known_probabilities():
    # the estimated rule is one admissible online strategy, so its win rate
    # cannot exceed the known-p optimum by more than Monte Carlo noise
    scores = health_scores([0.8] * 10)
    config = SimConfig(replications=100_000, seed=3, scenario="adaptive")
    report = simulate_adaptive(0.3, scores, config)
    se = math.sqrt(0.25 / report.replications)
    assert report.win_rate <= report.benchmark + 4.0 * se
    assert 0.0 < report.win_rate < 1.0


def test_adaptive_determinism_and_classes():
    scores = health_scores([0.6, 0.7, 0.8, 0.9])
    config = SimConfig(replications=20_000, seed=5, scenario="adaptive")
    a = simulate_adaptive(0.4, scores, config)
    b = simulate_adaptive(0.4, scores, config)
    assert a.to_json() == b.to_json()
    # all-failure words never stop early: the rule waits for consent instead
    succ = a.per_replication["successes"]
    tau = a.per_replication["stop_index"]
    assert np.all(tau[succ == 0] == scores.n)
    assert a.no_success_rate == pytest.approx(float(np.mean(succ == 0)))


def test_adaptive_win_rate_approaches_benchmark_for_long_sequences():
    scores = health_scores([0.9] * 120)
    config = SimConfig(replications=40_000, seed=9, scenario="adaptive")
    report = simulate_adaptive(0.1, scores, config)
    se = math.sqrt(0.25 / report.replications)
    assert report.win_rate >= report.benchmark - 0.05
    assert report.win_rate <= report.benchmark + 4.0 * se


def test_adaptive_reference_gap_at_fifty_patients():
    # equal h = 0.9, p = 0.1, n = 50: the online rule lands within 0.05 of
    # the known-p rule on the same probabilities
    scores = health_scores([0.9] * 50)
    config = SimConfig(replications=60_000, seed=17, scenario="adaptive")
    report = simulate_adaptive(0.1, scores, config)
    assert abs(report.win_rate - report.benchmark) < 0.05


def test_thinning_counts_match_intensity_integral():
    rng = np.random.Generator(np.random.Philox(key=77))
    intensity = Intensity(bounds=(0.0, 2.0, 10.0), rates=(5.0, 1.0))
    reps = 4000
    counts_early, counts_late = [], []
    for _ in range(reps):
        times = _draw_arrivals(rng, intensity)
        counts_early.append(sum(1 for u in times if u <= 2.0))
        counts_late.append(sum(1 for u in times if u > 2.0))
    early = np.array(counts_early, dtype=float)
    late = np.array(counts_late, dtype=float)
    assert abs(early.mean() - 10.0) <= 4.0 * math.sqrt(10.0 / reps)
    assert abs(late.mean() - 8.0) <= 4.0 * math.sqrt(8.0 / reps)
    # disjoint intervals of a Poisson stream carry independent counts
    corr = np.corrcoef(early, late)[0, 1]
    assert abs(corr) <= 4.0 / math.sqrt(reps)


def test_thinning_zero_rate_gives_no_arrivals():
    rng = np.random.Generator(np.random.Philox(key=1))
    assert _draw_arrivals(rng, Intensity(bounds=(0.0, 5.0), rates=(0.0,))) == []


def test_horizon_simulation_determinism_and_accounting():
    model = ArrivalModel(intensity=Intensity.constant(2.0, 8.0), prior_mean_health=0.6)
    config = SimConfig(replications=1500, seed=21, scenario="horizon")
    a = simulate_horizon(model, 0.25, config)
    b = simulate_horizon(model, 0.25, config)
    assert a.to_json() == b.to_json()
    win = a.per_replication["win"]
    succ = a.per_replication["successes"]
    futile = a.per_replication["futile"]
    assert np.all(succ[win] >= 1)
    assert np.all(futile >= 0)
    assert abs(a.extras["mean_arrivals"] - 16.0) <= 4.0 * math.sqrt(16.0 / 1500)


def test_horizon_online_rule_tracks_offline_oracle():
    # the oracle knows each realized sequence's probabilities and length;
    # the online rule estimates both, so it should land nearby but below
    model = ArrivalModel(intensity=Intensity.constant(3.0, 10.0), prior_mean_health=0.5)
    config = SimConfig(replications=2500, seed=33, scenario="horizon")
    report = simulate_horizon(model, 0.3, config, health=(0.4, 0.9))
    se = math.sqrt(0.25 / report.replications)
    assert report.benchmark >= report.win_rate - 4.0 * se
    assert report.win_rate > 0.2


def test_horizon_rejects_models_with_history():
    base = ArrivalModel(intensity=Intensity.constant(2.0, 8.0))
    seeded = ArrivalModel(
        intensity=Intensity.constant(2.0, 8.0),
        times=(1.0,), healths=(0.5,), outcomes=(True,),
    )
    config = SimConfig(replications=10, seed=1, scenario="horizon")
    simulate_horizon(base, 0.5, config)
    with pytest.raises(DomainError):
        simulate_horizon(seeded, 0.5, config)


def test_csv_emission(tmp_path):
    report = _known_report(reps=500)
    path = tmp_path / "runs.csv"
    report.write_csv(str(path))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "replication,win,futile,stop_index,successes"
    assert len(lines) == 501
