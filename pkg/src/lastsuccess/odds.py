"""Known-probability planning: sum the odds backward and stop on the next success.

A treatment sequence is a vector of independent success probabilities
``p_1..p_n``, each strictly inside (0, 1), listed in treatment order.  With
``q_k = 1 - p_k`` and odds ``r_k = p_k / q_k``, the optimal rule for stopping
exactly on the last success is: treat patients ``1..s-1`` unconditionally,
then stop at the first success at index ``s`` or later, where ``s`` is the
largest index whose suffix odds sum ``r_s + ... + r_n`` still reaches 1
(``s = 1`` when even the full sum stays below 1).  The win probability of
that rule is ``V(n, s) = Q(n, s) * R(n, s)`` with ``Q`` the suffix product of
the ``q``'s and ``R`` the suffix sum of the odds.

Indices are 1-based throughout the public surface (patient numbering);
error messages use 0-based list positions when pointing at a bad input.

Numerics: reaching the threshold means an exact float comparison ``>= 1``
with no epsilon, so suffix odds sums are kept exactly rounded (Shewchuk
partials, the same representation ``math.fsum`` uses internally).  The two
stop-index definitions then agree for every valid input, not just away from
the boundary, while their search logic stays independent.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CostError, DomainError

__all__ = [
    "OddsProfile",
    "StopPlan",
    "ValueCurve",
    "odds_of",
    "stop_index",
    "stop_index_dual",
    "value_curve",
    "win_probability",
    "win_probability_oracle",
    "best_order",
    "lower_bound_check",
    "ORACLE_MAX_N",
]

# Enumerating 2^n outcome words is refused above this length.
ORACLE_MAX_N = 20

# Win-probability lower bound whenever the odds sum reaches 1.
_ONE_OVER_E = 1.0 / math.e


class _ExactSum:
    """Running sum held as exact Shewchuk partials; value() is correctly rounded.

    Signed adds are exact, so withdrawing terms from a total cancels without
    the usual floating subtraction error.
    """

    __slots__ = ("_partials",)

    def __init__(self, values: Iterable[float] = ()) -> None:
        self._partials: list[float] = []
        for v in values:
            self.add(v)

    def add(self, x: float) -> None:
        partials = self._partials
        i = 0
        for y in partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                partials[i] = lo
                i += 1
            x = hi
        partials[i:] = [x]

    def value(self) -> float:
        return math.fsum(self._partials)


@dataclass(frozen=True)
class OddsProfile:
    """Validated success probabilities with their failure and odds vectors."""

    probs: tuple[float, ...]
    fails: tuple[float, ...]
    odds: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.probs)

    def __post_init__(self) -> None:
        if len(self.fails) != len(self.probs) or len(self.odds) != len(self.probs):
            raise DomainError("probs, fails and odds must have equal length")


def odds_of(probs: Sequence[float]) -> OddsProfile:
    """Build an :class:`OddsProfile`, rejecting any p outside the open interval (0, 1).

    Degenerate probabilities (exactly 0 or 1) are refused: the error names the
    offending 0-based position.
    """
    values = tuple(float(p) for p in probs)
    if not values:
        raise DomainError("need at least one treatment probability")
    for i, p in enumerate(values):
        if not (0.0 < p < 1.0) or math.isnan(p):
            raise DomainError(f"probs[{i}] = {p!r} outside the open interval (0, 1)")
    fails = tuple(1.0 - p for p in values)
    odds = tuple(p / q for p, q in zip(values, fails))
    return OddsProfile(probs=values, fails=fails, odds=odds)


@dataclass(frozen=True)
class StopPlan:
    """Threshold index and the value figures of the stop-at-next-success rule.

    s is 1-based; R and Q are the suffix odds sum and failure product from s;
    V = Q * R is the probability of stopping exactly on the last success.
    """

    s: int
    R: float
    Q: float
    V: float


@dataclass(frozen=True)
class ValueCurve:
    """Win probability of arming at every candidate index, values[i] = V(n, i+1)."""

    values: tuple[float, ...]

    def argmax(self) -> int:
        """1-based index of the maximum, ties broken toward the largest index."""
        best = 0
        for i, v in enumerate(self.values):
            if v >= self.values[best]:
                best = i
        return best + 1

    def is_unimodal(self) -> bool:
        """True when values never increase again after their first decrease."""
        peak = self.argmax() - 1
        rising = all(
            self.values[i] <= self.values[i + 1] for i in range(peak)
        )
        falling = all(
            self.values[i] >= self.values[i + 1]
            for i in range(peak, len(self.values) - 1)
        )
        return rising and falling


def stop_index(profile: OddsProfile) -> StopPlan:
    """Sum the odds from the back until the running sum reaches 1.

    Reaching exactly 1 counts as reached (no epsilon).  When the full sum
    stays below 1 the threshold is 1: stop at the very first success.
    """
    odds = profile.odds
    n = profile.n
    s = 1
    acc = _ExactSum()
    for k in range(n, 0, -1):
        acc.add(odds[k - 1])
        if acc.value() >= 1.0:
            s = k
            break
    # the accumulator now holds the suffix from s (the full sum when s stayed 1)
    R = acc.value()
    Q = 1.0
    for q in profile.fails[s - 1 :]:
        Q *= q
    return StopPlan(s=s, R=R, Q=Q, V=Q * R)


def stop_index_dual(profile: OddsProfile) -> int:
    """Independent cross-check: smallest k whose strict-tail odds sum drops below 1.

    Computed the other way around, by withdrawing r_1, r_2, ... from the total,
    so the search path differs from :func:`stop_index`.  Clamped to 1 when
    the full sum is already below 1, matching the s = 1 convention.
    """
    acc = _ExactSum(profile.odds)
    k = 0
    while acc.value() >= 1.0 and k < profile.n:
        acc.add(-profile.odds[k])
        k += 1
    return max(1, k)


def win_probability(profile: OddsProfile, s: int) -> float:
    """V(n, s) for an arbitrary arming index s (1-based)."""
    _check_index(profile, s)
    R = math.fsum(profile.odds[s - 1 :])
    Q = 1.0
    for q in profile.fails[s - 1 :]:
        Q *= q
    return Q * R


def value_curve(profile: OddsProfile) -> ValueCurve:
    """V(n, s) for every s in 1..n, via suffix sums and products."""
    n = profile.n
    values = [0.0] * n
    acc = _ExactSum()
    prod = 1.0
    for k in range(n, 0, -1):
        acc.add(profile.odds[k - 1])
        prod *= profile.fails[k - 1]
        values[k - 1] = prod * acc.value()
    return ValueCurve(values=tuple(values))


def win_probability_oracle(profile: OddsProfile, s: int) -> float:
    """Brute-force win probability: enumerate every outcome word.

    Sums the probability of all words in {+,-}^n whose first "+" at index >= s
    is the last "+" of the whole word.  Exponential in n, so refused above
    ``ORACLE_MAX_N``.  Exists as an independent check on the closed form.
    """
    _check_index(profile, s)
    n = profile.n
    if n > ORACLE_MAX_N:
        raise CostError(f"oracle enumerates 2^n words; n = {n} exceeds {ORACLE_MAX_N}")
    p = np.asarray(profile.probs)
    q = np.asarray(profile.fails)
    words = np.arange(1 << n, dtype=np.uint32)
    # bit k of each word = outcome of patient k+1 (1 means success)
    bits = (words[:, None] >> np.arange(n, dtype=np.uint32)) & 1
    weight = np.where(bits == 1, p, q).prod(axis=1)
    tail = bits[:, s - 1 :]
    has_tail_success = tail.any(axis=1)
    first_from_s = (s - 1) + np.argmax(tail, axis=1)
    last_overall = (n - 1) - np.argmax(bits[:, ::-1], axis=1)
    win = has_tail_success & (first_from_s == last_overall)
    return float(weight[win].sum())


def best_order(
    profile: OddsProfile,
    max_n_exhaustive: int = 10,
    candidates: Iterable[Sequence[int]] | None = None,
) -> tuple[tuple[int, ...], StopPlan]:
    """Search treatment orders for the largest win probability.

    Exhausts all n! permutations when n <= max_n_exhaustive; beyond the guard
    only caller-supplied candidate permutations (0-based index tuples) are
    evaluated, and calling with none is refused as a cost error.  Ties keep
    the lexicographically smallest permutation, so output is deterministic.
    """
    n = profile.n
    if candidates is None:
        if n > max_n_exhaustive:
            raise CostError(
                f"exhaustive order search over {n}! permutations exceeds the"
                f" guard (max_n_exhaustive = {max_n_exhaustive});"
                " pass explicit candidates instead"
            )
        pool: Iterable[tuple[int, ...]] = itertools.permutations(range(n))
    else:
        pool = (tuple(c) for c in candidates)

    best_perm: tuple[int, ...] | None = None
    best_plan: StopPlan | None = None
    for perm in pool:
        if sorted(perm) != list(range(n)):
            raise DomainError(f"candidate {perm!r} is not a permutation of 0..{n - 1}")
        plan = stop_index(odds_of([profile.probs[i] for i in perm]))
        # strict improvement only: permutations arrive in lexicographic order,
        # so the first maximum seen is the lexicographically smallest
        if best_plan is None or plan.V > best_plan.V:
            best_perm, best_plan = perm, plan
    if best_perm is None or best_plan is None:
        raise DomainError("no candidate permutations supplied")
    return best_perm, best_plan


def lower_bound_check(plan: StopPlan, profile: OddsProfile) -> bool:
    """True when the 1/e guarantee applies and holds (or does not apply).

    Whenever the full odds sum reaches 1 the optimal win probability is at
    least 1/e; below 1 the bound is not claimed and the check passes.
    """
    total = math.fsum(profile.odds)
    if total < 1.0:
        return True
    return plan.V >= _ONE_OVER_E - 1e-12


def _check_index(profile: OddsProfile, s: int) -> None:
    if not isinstance(s, int) or isinstance(s, bool):
        raise DomainError(f"arming index must be an integer, got {s!r}")
    if not (1 <= s <= profile.n):
        raise DomainError(f"arming index s = {s} outside 1..{profile.n}")
