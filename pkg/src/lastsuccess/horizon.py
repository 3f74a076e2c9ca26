"""Refusal timing when patients arrive over a fixed period.

Treatment requests arrive as an inhomogeneous Poisson stream with intensity
``lambda(u)`` on ``[0, t]``.  The expected odds of future successes after
time ``s`` is approximated by ``integral_s^t lambda(u) du * P * m_h`` where
``P`` is the running success predictor (successes over accumulated health)
and ``m_h`` the running mean of observed health scores, both frozen at the
moment of evaluation.  New requests are refused from the first time ``s``
at which that product drops to 1 or below, the continuous analogue of the
backward odds sum reaching 1.

With no success observed yet the predictor is 0 and the rule would fire
vacuously; callers treat that case as consent-required, mirroring the
discrete protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "Intensity",
    "ArrivalModel",
    "RefusalDecision",
    "refusal_integral",
    "first_refusal_time",
    "update_on_arrival",
]

# bisection stops when the bracket shrinks below this fraction of the horizon
_TIME_TOL = 1e-9


@dataclass(frozen=True)
class Intensity:
    """Piecewise-constant arrival rate on [0, t].

    bounds = (0, u_1, ..., t) and rates[i] applies on [bounds[i], bounds[i+1]).
    A constant rate is the one-piece special case.
    """

    bounds: tuple[float, ...]
    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.bounds) < 2 or len(self.rates) != len(self.bounds) - 1:
            raise DomainError("need bounds (0, ..., t) with one rate per piece")
        if self.bounds[0] != 0.0:
            raise DomainError("intensity must start at time 0")
        for a, b in zip(self.bounds, self.bounds[1:]):
            if not (b > a):
                raise DomainError("intensity bounds must increase strictly")
        for i, r in enumerate(self.rates):
            if not (r >= 0.0) or math.isinf(r):
                raise DomainError(f"rates[{i}] = {r!r} must be finite and >= 0")

    @property
    def horizon(self) -> float:
        return self.bounds[-1]

    @property
    def max_rate(self) -> float:
        return max(self.rates)

    @classmethod
    def constant(cls, rate: float, horizon: float) -> "Intensity":
        if not (horizon > 0.0):
            raise DomainError(f"horizon = {horizon!r} must be positive")
        return cls(bounds=(0.0, float(horizon)), rates=(float(rate),))

    @classmethod
    def from_expected_count(cls, count: float, horizon: float) -> "Intensity":
        """Constant rate lambda = count / horizon, the natural default."""
        if not (count >= 0.0):
            raise DomainError(f"expected count = {count!r} must be >= 0")
        if not (horizon > 0.0):
            raise DomainError(f"horizon = {horizon!r} must be positive")
        return cls.constant(count / horizon, horizon)

    def rate_at(self, u: float) -> float:
        if not (0.0 <= u <= self.horizon):
            raise DomainError(f"time {u!r} outside [0, {self.horizon}]")
        for i in range(len(self.rates)):
            if u < self.bounds[i + 1]:
                return self.rates[i]
        return self.rates[-1]

    def integral(self, a: float, b: float) -> float:
        """Exact integral of the rate over [a, b] (piecewise constant)."""
        if not (0.0 <= a <= b <= self.horizon):
            raise DomainError(f"interval [{a!r}, {b!r}] outside [0, {self.horizon}]")
        total = 0.0
        for i, r in enumerate(self.rates):
            lo = max(a, self.bounds[i])
            hi = min(b, self.bounds[i + 1])
            if hi > lo:
                total += r * (hi - lo)
        return total


@dataclass(frozen=True)
class ArrivalModel:
    """Horizon, intensity, and the arrivals observed so far.

    prior_mean_health seeds the mean health estimate before any arrival;
    once arrivals exist the running mean of their observed h takes over.
    """

    intensity: Intensity
    prior_mean_health: float = 0.5
    times: tuple[float, ...] = ()
    healths: tuple[float, ...] = ()
    outcomes: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        if not (0.0 < self.prior_mean_health < 1.0):
            raise DomainError(
                f"prior_mean_health = {self.prior_mean_health!r} outside (0, 1)"
            )
        if not (len(self.times) == len(self.healths) == len(self.outcomes)):
            raise DomainError("times, healths and outcomes must align")

    @property
    def horizon(self) -> float:
        return self.intensity.horizon

    @property
    def n_arrivals(self) -> int:
        return len(self.times)

    @property
    def successes(self) -> int:
        return sum(self.outcomes)

    @property
    def health_total(self) -> float:
        return math.fsum(self.healths)

    @property
    def predictor(self) -> float:
        """Running success predictor S/H; 0 until the first success."""
        if self.n_arrivals == 0:
            return 0.0
        return self.successes / self.health_total

    @property
    def prior_based(self) -> bool:
        return self.n_arrivals == 0

    @property
    def mean_health(self) -> float:
        if self.n_arrivals == 0:
            return self.prior_mean_health
        return self.health_total / self.n_arrivals


@dataclass(frozen=True)
class RefusalDecision:
    """Value of the remaining-odds integral at time s and the refuse verdict."""

    at_time: float
    integral_value: float
    refuse_from_now: bool
    predictor: float
    mean_health: float
    prior_based: bool


def refusal_integral(model: ArrivalModel, s: float) -> RefusalDecision:
    """Remaining expected success odds from time s, with estimates frozen at s.

    Refuse new requests from s onward once the value is 1 or below.
    """
    if math.isnan(s) or not (0.0 <= s <= model.horizon):
        raise DomainError(f"time s = {s!r} outside [0, {model.horizon}]")
    predictor = model.predictor
    mean_health = model.mean_health
    value = model.intensity.integral(s, model.horizon) * predictor * mean_health
    return RefusalDecision(
        at_time=s,
        integral_value=value,
        refuse_from_now=value <= 1.0,
        predictor=predictor,
        mean_health=mean_health,
        prior_based=model.prior_based,
    )


def first_refusal_time(model: ArrivalModel, now: float = 0.0) -> float:
    """Smallest s in [now, t] whose remaining-odds value is 1 or below.

    The value is continuous and non-increasing in s, so monotone bisection
    applies; the bracket is shrunk to 1e-9 of the horizon.  Returns now
    itself when the rule already fires there, and never exceeds t (the
    value at t is 0).
    """
    t = model.horizon
    if math.isnan(now) or not (0.0 <= now <= t):
        raise DomainError(f"now = {now!r} outside [0, {t}]")
    if refusal_integral(model, now).integral_value <= 1.0:
        return now
    lo, hi = now, t
    tol = _TIME_TOL * t
    while hi - lo > 0.5 * tol:
        mid = 0.5 * (lo + hi)
        if refusal_integral(model, mid).integral_value <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def update_on_arrival(
    model: ArrivalModel, arrival_time: float, h: float, success: bool
) -> ArrivalModel:
    """Record a treated arrival; arrivals are ordered events within the horizon."""
    if math.isnan(arrival_time) or not (0.0 <= arrival_time <= model.horizon):
        raise DomainError(
            f"arrival_time = {arrival_time!r} outside [0, {model.horizon}]"
        )
    if model.times and arrival_time < model.times[-1]:
        raise DomainError(
            f"arrival_time = {arrival_time!r} precedes last arrival {model.times[-1]!r}"
        )
    if math.isnan(h) or not (0.0 < h < 1.0):
        raise DomainError(f"h = {h!r} outside the open interval (0, 1)")
    return ArrivalModel(
        intensity=model.intensity,
        prior_mean_health=model.prior_mean_health,
        times=model.times + (float(arrival_time),),
        healths=model.healths + (float(h),),
        outcomes=model.outcomes + (bool(success),),
    )
