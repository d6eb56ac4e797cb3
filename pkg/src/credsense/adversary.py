"""Cheat policies and report fabrication.

A cheating user still applies and reports like everyone else; only the
reported value changes, replaced by a uniform draw from a plausible range
(default [2, 24] degrees C for outdoor temperature).  Three policy kinds:

* honest            -- nobody cheats, ever (the baseline scenario);
* general intensity -- every user cheats independently on each task with
                       probability p;
* targeted          -- only selected users cheat (with probability p); the
                       targets are picked from a completed baseline run as
                       the users with the highest final reputation (``topr``),
                       the most accumulated payback (``topp``), or the most
                       accomplished tasks (``topc``).

Cheat decisions and cheat values are drawn from the per-(user, task)
substream handed in by the engine, so decisions are reproducible and
independent of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .core import InvalidInputError, InvalidValueError
from .truth import Observation

if TYPE_CHECKING:
    from .engine import SimResult

HONEST = "honest"
GENERAL = "general"
TARGETED = "targeted"

SELECTORS = ("topr", "topp", "topc")

DEFAULT_CHEAT_LOW = 2.0
DEFAULT_CHEAT_HIGH = 24.0


@dataclass(frozen=True)
class CheatPolicy:
    """Who cheats, how often, and what a cheat report looks like."""

    kind: str = HONEST
    probability: float = 0.0
    cheat_low: float = DEFAULT_CHEAT_LOW
    cheat_high: float = DEFAULT_CHEAT_HIGH
    selector: str | None = None
    target_count: int = 1
    targets: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in (HONEST, GENERAL, TARGETED):
            raise InvalidValueError(f"unknown policy kind {self.kind!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidValueError(
                f"probability must be in [0, 1], got {self.probability}"
            )
        if not self.cheat_low < self.cheat_high:
            raise InvalidValueError(
                f"need cheat_low < cheat_high, got [{self.cheat_low}, {self.cheat_high}]"
            )
        if self.selector is not None and self.selector not in SELECTORS:
            raise InvalidValueError(f"unknown target selector {self.selector!r}")
        if self.target_count < 1:
            raise InvalidValueError(f"target_count must be >= 1, got {self.target_count}")
        if self.kind == TARGETED and self.selector is None and not self.targets:
            raise InvalidValueError("targeted policy needs a selector or explicit targets")

    @classmethod
    def honest(cls) -> "CheatPolicy":
        return cls(kind=HONEST)

    @classmethod
    def general(
        cls,
        probability: float,
        cheat_low: float = DEFAULT_CHEAT_LOW,
        cheat_high: float = DEFAULT_CHEAT_HIGH,
    ) -> "CheatPolicy":
        return cls(
            kind=GENERAL,
            probability=probability,
            cheat_low=cheat_low,
            cheat_high=cheat_high,
        )

    @classmethod
    def targeted(
        cls,
        probability: float,
        selector: str | None = None,
        target_count: int = 1,
        targets: tuple[int, ...] = (),
        cheat_low: float = DEFAULT_CHEAT_LOW,
        cheat_high: float = DEFAULT_CHEAT_HIGH,
    ) -> "CheatPolicy":
        return cls(
            kind=TARGETED,
            probability=probability,
            selector=selector,
            target_count=target_count,
            targets=tuple(targets),
            cheat_low=cheat_low,
            cheat_high=cheat_high,
        )

    def governs(self, user: int) -> bool:
        """Whether this policy can make ``user`` cheat at all."""
        if self.kind == GENERAL:
            return True
        if self.kind == TARGETED:
            return user in self.targets
        return False


def decide_cheat(policy: CheatPolicy, user: int, rng: np.random.Generator) -> bool:
    """Per-task cheat decision for one user.

    Consumes one draw from ``rng`` iff the policy governs the user, so the
    draw sequence of every other user is untouched by policy changes.
    """
    if not policy.governs(user):
        return False
    return bool(rng.random() < policy.probability)


def make_report(
    user: int,
    honest_value: float,
    cheat: bool,
    policy: CheatPolicy,
    rng: np.random.Generator,
) -> Observation:
    """The observation a user actually uploads: its possessed value, or a
    uniform fake from the cheat range."""
    if not np.isfinite(honest_value):
        raise InvalidValueError(f"honest value of user {user} is not finite")
    if cheat:
        return Observation(user=user, value=float(rng.uniform(policy.cheat_low, policy.cheat_high)))
    return Observation(user=user, value=float(honest_value))


def select_targets(selector: str, baseline: "SimResult", count: int = 1) -> tuple[int, ...]:
    """Pick the top ``count`` users of a completed baseline run under the
    selector's metric; ties break toward the lower user id."""
    if selector not in SELECTORS:
        raise InvalidValueError(f"unknown target selector {selector!r}")
    if selector == "topr":
        metric = baseline.final_reputations
    elif selector == "topp":
        metric = baseline.payback_totals
    else:
        metric = baseline.task_counts
    if not metric:
        raise InvalidInputError("baseline run has no users")
    ranked = sorted(metric, key=lambda u: (-metric[u], u))
    return tuple(ranked[:count])


def resolve_targets(policy: CheatPolicy, baseline: "SimResult") -> CheatPolicy:
    """Fill a targeted policy's concrete target ids from a baseline run."""
    if policy.kind != TARGETED:
        return policy
    if policy.targets:
        return policy
    assert policy.selector is not None
    targets = select_targets(policy.selector, baseline, policy.target_count)
    return replace(policy, targets=targets)
