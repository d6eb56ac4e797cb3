"""Shared domain types and the two primitive formulas used across the simulator.

Reputation is a credibility score in (0, 1) attached to every registered
user.  Two formulas live here because every other module needs them:

* ``quality_risk(r) = (1 - r) / r`` -- the penalty coefficient an employer
  attaches to a user of reputation ``r``; strictly decreasing in ``r``.
* ``update_reputation`` -- exponential-smoothing update
  ``alpha * r_prev + (1 - alpha) * min(c / c_expected, 1)``; a contributor
  meeting or beating expectation earns the full ``1 - alpha`` bump, an
  under-contributor earns a pro-rated fraction of it.

Reputations are clamped to ``[R_MIN, R_MAX]``: the risk factor and the task
reward both divide by ``r``, and a reputation of exactly 0 or 1 would create
singularities (zero reward, infinite risk).  Clamping preserves ordering
while keeping all downstream arithmetic finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

UserId = int
Reputation = float
Contribution = float

R_MIN = 0.01
R_MAX = 0.99


class InvalidValueError(ValueError):
    """A scalar argument is outside its mathematical domain."""


class InvalidInputError(ValueError):
    """A composite input (map, list, file) violates a module contract."""


@dataclass(frozen=True)
class PaybackAmount:
    """Payback of one employee for one task, in raw reward units and
    normalized by the task's total reward (so values are comparable
    across tasks)."""

    raw: float
    normalized: float


@dataclass(frozen=True)
class IncentiveParams:
    """Scheme-wide parameters.

    alpha   -- sensitivity of the reputation update, in [0, 1]
    r0      -- reputation issued to a freshly registered user
    epsilon -- truth-discovery convergence threshold (observation units)
    r_min, r_max -- reputation clamp bounds
    """

    alpha: float = 0.5
    r0: float = 0.5
    epsilon: float = 0.1
    r_min: float = R_MIN
    r_max: float = R_MAX

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 < self.r_min < self.r0 < self.r_max < 1.0:
            raise InvalidValueError(
                f"need 0 < r_min < r0 < r_max < 1, got "
                f"({self.r_min}, {self.r0}, {self.r_max})"
            )
        if not self.epsilon > 0.0:
            raise InvalidValueError(f"epsilon must be > 0, got {self.epsilon}")


def clamp_reputation(r: float, r_min: float = R_MIN, r_max: float = R_MAX) -> float:
    """Clamp a reputation into ``[r_min, r_max]``.

    Raises InvalidValueError on non-finite input.
    """
    if not math.isfinite(r):
        raise InvalidValueError(f"reputation must be finite, got {r}")
    return min(max(r, r_min), r_max)


def quality_risk(r: float) -> float:
    """Risk factor ``(1 - r) / r`` of recruiting a user of reputation ``r``.

    Strictly decreasing and positive on the clamped range.
    """
    if not 0.0 < r < 1.0:
        raise InvalidValueError(f"reputation must lie in (0, 1), got {r}")
    return (1.0 - r) / r


def update_reputation(
    r_prev: float,
    c: float,
    c_expected: float,
    alpha: float,
    r_min: float = R_MIN,
    r_max: float = R_MAX,
) -> float:
    """Post-task reputation update.

    The contribution ratio is capped at 1: over-contribution earns the same
    bump as exactly meeting expectation, so for fixed ``r_prev`` the update
    is non-decreasing in ``c`` and flat on ``c >= c_expected``.
    """
    if c_expected <= 0.0:
        raise InvalidValueError(
            f"expected contribution must be > 0, got {c_expected}"
        )
    if c < 0.0 or not math.isfinite(c):
        raise InvalidValueError(f"contribution must be finite and >= 0, got {c}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidValueError(f"alpha must be in [0, 1], got {alpha}")
    ratio = min(c / c_expected, 1.0)
    return clamp_reputation(alpha * r_prev + (1.0 - alpha) * ratio, r_min, r_max)
