"""Optimal stopping on the last success of a Bernoulli treatment sequence.

The package computes the threshold rule that maximizes the probability of
stopping exactly on the final success, runs it online when the success
probabilities must be estimated from observed outcomes, extends it to
Poisson arrival streams over a finite horizon, and serves the whole thing
as an event-sourced session API.
"""

from .adaptive import (
    AdaptiveState,
    HealthScores,
    InferenceReport,
    SequencePolicy,
    estimate_p,
    estimated_future_odds,
    from_outcomes,
    health_scores,
    inference_report,
    record,
    should_stop,
    spread_scores,
    start,
    threshold_stop,
)
from .errors import (
    ConflictError,
    CostError,
    DomainError,
    EngineError,
    NoDataError,
    NotFoundError,
)
from .horizon import (
    ArrivalModel,
    Intensity,
    RefusalDecision,
    first_refusal_time,
    refusal_integral,
    update_on_arrival,
)
from .odds import (
    OddsProfile,
    StopPlan,
    ValueCurve,
    best_order,
    lower_bound_check,
    odds_of,
    stop_index,
    stop_index_dual,
    value_curve,
    win_probability,
    win_probability_oracle,
)
from .recommend import Action, Recommendation, Source
from .simulate import (
    SimConfig,
    SimReport,
    simulate_adaptive,
    simulate_horizon,
    simulate_known,
)

__all__ = [
    "Action",
    "AdaptiveState",
    "ArrivalModel",
    "ConflictError",
    "CostError",
    "DomainError",
    "EngineError",
    "HealthScores",
    "InferenceReport",
    "Intensity",
    "NoDataError",
    "NotFoundError",
    "OddsProfile",
    "Recommendation",
    "RefusalDecision",
    "SequencePolicy",
    "SimConfig",
    "SimReport",
    "Source",
    "StopPlan",
    "ValueCurve",
    "best_order",
    "estimate_p",
    "estimated_future_odds",
    "first_refusal_time",
    "from_outcomes",
    "health_scores",
    "inference_report",
    "lower_bound_check",
    "odds_of",
    "record",
    "refusal_integral",
    "should_stop",
    "simulate_adaptive",
    "simulate_horizon",
    "simulate_known",
    "spread_scores",
    "start",
    "stop_index",
    "stop_index_dual",
    "threshold_stop",
    "update_on_arrival",
    "value_curve",
    "win_probability",
    "win_probability_oracle",
]
