"""Sequential estimation when the success probability is unknown.

Each patient k carries a health score ``h_k`` in (0, 1), fixed before the
sequence starts, and the model is ``p_k = h_k * p`` with one unknown base
rate ``p``.  After ``k`` outcomes with ``S_k`` successes the unbiased
estimator is ``p_hat = S_k / H_k`` with ``H_k = h_1 + ... + h_k``, and the
future odds of patient ``j > k`` are estimated as

    h_j * S_k / max(0, H_k - h_j * S_k)

where a truncated (non-positive) denominator makes the term +inf, so a wild
estimate can never argue for stopping.  The stop rule mirrors the known-odds
rule: stop with treatment k once at least one success has been seen and the
estimated future odds sum falls below 1.  With no success yet the estimator
pins p_hat to 0 and the engine asks for explicit consent instead of claiming
statistical support.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, NoDataError
from .recommend import Action, Recommendation, Source

__all__ = [
    "HealthScores",
    "AdaptiveState",
    "InferenceReport",
    "SequencePolicy",
    "health_scores",
    "spread_scores",
    "start",
    "record",
    "from_outcomes",
    "estimate_p",
    "estimated_future_odds",
    "should_stop",
    "inference_report",
    "threshold_stop",
]


@dataclass(frozen=True)
class HealthScores:
    """Per-patient health scores h_k in (0, 1) with their prefix sums H_k."""

    h: tuple[float, ...]
    H: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.h)


def health_scores(h: Sequence[float]) -> HealthScores:
    values = tuple(float(x) for x in h)
    if not values:
        raise DomainError("need at least one health score")
    for i, x in enumerate(values):
        if not (0.0 < x < 1.0) or math.isnan(x):
            raise DomainError(f"h[{i}] = {x!r} outside the open interval (0, 1)")
    prefix = tuple(itertools.accumulate(values))
    return HealthScores(h=values, H=prefix)


def spread_scores(h_min: float, h_max: float, ranks: Sequence[float]) -> HealthScores:
    """Turn a relative rank order into scores spread evenly over [h_min, h_max].

    Higher rank means better perceived health.  Patients are placed at evenly
    spaced slots by rank; tied ranks share the midpoint of the slots they
    jointly occupy.  A single patient gets the midpoint of the interval.
    """
    if not (0.0 < h_min < 1.0 and 0.0 < h_max < 1.0):
        raise DomainError("h_min and h_max must lie inside the open interval (0, 1)")
    if h_min > h_max:
        raise DomainError(f"h_min = {h_min} exceeds h_max = {h_max}")
    if not ranks:
        raise DomainError("need at least one rank")
    n = len(ranks)
    if n == 1:
        return health_scores([(h_min + h_max) / 2.0])
    order = sorted(range(n), key=lambda i: ranks[i])
    position = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and ranks[order[j + 1]] == ranks[order[i]]:
            j += 1
        mid = (i + j) / 2.0
        for t in range(i, j + 1):
            position[order[t]] = mid
        i = j + 1
    step = (h_max - h_min) / (n - 1)
    return health_scores([h_min + pos * step for pos in position])


@dataclass(frozen=True)
class AdaptiveState:
    """Observed prefix of a sequence: scores plus the outcome word so far."""

    scores: HealthScores
    outcomes: tuple[bool, ...]

    @property
    def k(self) -> int:
        return len(self.outcomes)

    @property
    def S(self) -> int:
        return sum(self.outcomes)

    @property
    def n(self) -> int:
        return self.scores.n

    def __post_init__(self) -> None:
        if len(self.outcomes) > self.scores.n:
            raise DomainError("more outcomes than patients")


def start(scores: HealthScores) -> AdaptiveState:
    return AdaptiveState(scores=scores, outcomes=())


def record(state: AdaptiveState, success: bool) -> AdaptiveState:
    """Append one outcome; the sequence cannot grow past its n patients."""
    if state.k >= state.n:
        raise DomainError(f"all {state.n} outcomes already recorded")
    return AdaptiveState(scores=state.scores, outcomes=state.outcomes + (bool(success),))


def from_outcomes(scores: HealthScores, word: Iterable[bool | str]) -> AdaptiveState:
    """Build a state from an outcome word; '+'/'-' or booleans both work."""
    state = start(scores)
    for w in word:
        if isinstance(w, str):
            if w not in "+-":
                raise DomainError(f"outcome {w!r} is neither '+' nor '-'")
            w = w == "+"
        state = record(state, w)
    return state


def estimate_p(state: AdaptiveState) -> float:
    """Unbiased base-rate estimate S_k / H_k; needs at least one outcome."""
    if state.k == 0:
        raise NoDataError("no outcomes recorded yet")
    return state.S / state.scores.H[state.k - 1]


def estimated_future_odds(state: AdaptiveState) -> tuple[float, ...]:
    """Estimated odds term for every untreated patient j > k.

    Term j is h_j * S_k / max(0, H_k - h_j * S_k); the truncation turns a
    non-positive denominator into +inf so the sum can never fall below 1
    on the strength of an estimate at the edge of its domain.
    """
    if state.k == 0:
        raise NoDataError("no outcomes recorded yet")
    S = state.S
    H_k = state.scores.H[state.k - 1]
    terms = []
    for j in range(state.k, state.n):
        h_j = state.scores.h[j]
        den = max(0.0, H_k - h_j * S)
        if den <= 0.0:
            terms.append(math.inf)
        else:
            terms.append(h_j * S / den)
    return tuple(terms)


@dataclass(frozen=True)
class InferenceReport:
    """Consent-grade figures after k outcomes.

    future_odds_sum is the left side of the stop inequality (may be +inf);
    expected_further and prob_no_further use the per-patient estimates
    p_hat_j = h_j * p_hat, clamped to 1 when the model overshoots
    (p_future_clamped records that truncation).
    """

    k: int
    S: int
    p_hat: float
    future_odds_sum: float
    expected_further: float
    prob_no_further: float
    p_future_clamped: bool


def inference_report(state: AdaptiveState) -> InferenceReport:
    p_hat = estimate_p(state)
    odds_sum = math.fsum(estimated_future_odds(state))
    clamped = False
    p_future = []
    for j in range(state.k, state.n):
        pj = state.scores.h[j] * p_hat
        if pj > 1.0:
            pj = 1.0
            clamped = True
        p_future.append(pj)
    expected_further = math.fsum(p_future)
    prob_no_further = 1.0
    for pj in p_future:
        prob_no_further *= 1.0 - pj
    return InferenceReport(
        k=state.k,
        S=state.S,
        p_hat=p_hat,
        future_odds_sum=odds_sum,
        expected_further=expected_further,
        prob_no_further=prob_no_further,
        p_future_clamped=clamped,
    )


def should_stop(state: AdaptiveState) -> Recommendation:
    """The estimated odds rule after the kth outcome.

    Stop once S_k >= 1 and the estimated future odds sum is below 1.  With
    S_k = 0 the estimator carries no information, so the verdict is
    ConsentRequired, never a statistical stop.
    """
    report = inference_report(state)
    if state.S == 0:
        return Recommendation(
            action=Action.CONSENT_REQUIRED, source=Source.CONSENT_POLICY, figures=report
        )
    if report.future_odds_sum < 1.0:
        return Recommendation(
            action=Action.STOP, source=Source.ESTIMATED_ODDS_RULE, figures=report
        )
    return Recommendation(
        action=Action.CONTINUE, source=Source.ESTIMATED_ODDS_RULE, figures=report
    )


@dataclass(frozen=True)
class SequencePolicy:
    """Shared-agreement configuration for a sequence.

    alpha is the lower threshold on the estimated probability of any further
    success: when 1 - prob_no_further drops below alpha the threshold rule
    advises stopping.  alpha = 0 disables it.  max_initial_failures, when
    set, is the pre-agreed cap L on the opening failure run.
    """

    alpha: float = 0.0
    max_initial_failures: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < 1.0) or math.isnan(self.alpha):
            raise DomainError(f"alpha = {self.alpha!r} outside [0, 1)")
        L = self.max_initial_failures
        if L is not None and (not isinstance(L, int) or isinstance(L, bool) or L < 1):
            raise DomainError(f"max_initial_failures = {L!r} must be an integer >= 1")


def threshold_stop(report: InferenceReport, policy: SequencePolicy) -> bool:
    """True when the estimated chance of any further success falls below alpha."""
    return (1.0 - report.prob_no_further) < policy.alpha
