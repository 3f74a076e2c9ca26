"""Engine verdict shared by the adaptive rules and the session service."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from .errors import DomainError

__all__ = ["Action", "Source", "Recommendation"]


class Action(str, Enum):
    CONTINUE = "Continue"
    ARMED = "Armed"
    STOP = "Stop"
    CONSENT_REQUIRED = "ConsentRequired"


class Source(str, Enum):
    ODDS_RULE = "odds-rule"
    ESTIMATED_ODDS_RULE = "estimated-odds-rule"
    THRESHOLD = "threshold"
    CONSENT_POLICY = "consent-policy"


@dataclass(frozen=True)
class Recommendation:
    """What the engine advises next, which rule produced it, and its figures."""

    action: Action
    source: Source
    figures: Any = None

    def __post_init__(self) -> None:
        if self.action is Action.STOP and self.source is None:
            raise DomainError("a Stop recommendation must carry its source")
