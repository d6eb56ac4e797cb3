"""Per-task settlement: total reward, final paybacks, reputation updates.

The total reward is pinned to

    R = sum_{j in E} (1 - r_j) / r_j  /  (|E| - 1)

which normalizes expected contributions so they sum to 1 (and each lies in
[0, 1]).  Final paybacks compare actual against expected contribution:

    g_i = (cbar_i / sum cbar) * R - risk_i * cbar_i   if c_i >= cbar_i
    g_i = (c_i    / sum cbar) * R - risk_i * c_i      if c_i <  cbar_i

Over-contribution is paid exactly the expected payback, never a bonus, so
the payback as a function of own contribution rises linearly up to the
expectation and is flat beyond it -- contributing as expected is always a
maximizer.  Note the under-contribution branch keeps the sum of *expected*
contributions in the denominator; ``dishonest_uses_actual_sum`` switches it
to the sum of actual contributions for sensitivity experiments only.

Reported paybacks carry a normalized twin ``g_i / R`` in [0, 1] so tasks
with different reward pools stay comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    IncentiveParams,
    InvalidInputError,
    PaybackAmount,
    quality_risk,
    update_reputation,
)


@dataclass(frozen=True)
class Settlement:
    """Outcome of settling one task: per-employee paybacks and the
    reputations to write back."""

    paybacks: dict[int, PaybackAmount]
    new_reputations: dict[int, float]
    total_reward: float


def total_reward(reputations_of_employees: Sequence[float]) -> float:
    """Task reward pool for the recruited employee set."""
    n = len(reputations_of_employees)
    if n < 2:
        raise InvalidInputError(f"need at least 2 employees, got {n}")
    risk_sum = sum(quality_risk(r) for r in reputations_of_employees)
    return risk_sum / (n - 1)


def payback_amount(
    actual: float,
    expected: float,
    expected_sum: float,
    reward: float,
    reputation: float,
    dishonest_uses_actual_sum: bool = False,
    actual_sum: float = 1.0,
) -> float:
    """Raw payback of one employee given its actual and expected contribution."""
    risk = quality_risk(reputation)
    if actual >= expected:
        return (expected / expected_sum) * reward - risk * expected
    denom = actual_sum if dishonest_uses_actual_sum else expected_sum
    return (actual / denom) * reward - risk * actual


def settle(
    actual: Mapping[int, float],
    expected: Mapping[int, float],
    reputations: Mapping[int, float],
    reward: float,
    params: IncentiveParams,
    dishonest_uses_actual_sum: bool = False,
) -> Settlement:
    """Settle one task: paybacks per the two-branch rule, reputations per
    the capped update.

    All three maps must share one key set (the employees of the task).
    """
    keys = set(actual)
    if keys != set(expected) or keys != set(reputations):
        raise InvalidInputError("actual, expected and reputations must share one key set")
    if not keys:
        raise InvalidInputError("cannot settle a task with no employees")

    expected_sum = sum(expected.values())
    actual_sum = sum(actual.values())
    paybacks: dict[int, PaybackAmount] = {}
    new_reputations: dict[int, float] = {}
    for user in keys:
        raw = payback_amount(
            actual[user],
            expected[user],
            expected_sum,
            reward,
            reputations[user],
            dishonest_uses_actual_sum=dishonest_uses_actual_sum,
            actual_sum=actual_sum,
        )
        paybacks[user] = PaybackAmount(raw=raw, normalized=raw / reward)
        new_reputations[user] = update_reputation(
            reputations[user],
            actual[user],
            expected[user],
            params.alpha,
            params.r_min,
            params.r_max,
        )
    return Settlement(
        paybacks=paybacks, new_reputations=new_reputations, total_reward=reward
    )
