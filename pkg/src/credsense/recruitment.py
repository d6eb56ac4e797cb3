"""Reputation-driven employee recruitment.

Applicants are ranked by reputation; the two most reputable are always
hired, and each further candidate is admitted while its reputation clears a
threshold computed from the risk factors of the already-admitted set:

    r_candidate > (|E| - 1) / (risk_sum(E) + |E| - 1)

Equivalently (in risk space): the candidate's risk must be below
``risk_sum(E) / (|E| - 1)``, i.e. below the running per-capita risk of the
better-ranked members, slightly inflated.  Since applicants are scanned in
descending reputation order the scan stops at the first failure.

Each employee's expected contribution is the closed-form maximizer of its
payback

    g_i(c) = c / (c + others) * R - risk_i * c

with every other employee also at its own maximizer:

    cbar_i = ((n - 1) R / K) * (1 - (n - 1) * risk_i / K),   K = risk_sum(E)

Under the default reward policy R = K / (n - 1), expected contributions sum
to exactly 1.  The threshold rule guarantees cbar_i > 0 and gbar_i > 0 for
every admitted employee; anyone rejected would have a non-positive
stationary contribution if force-added, so staying out is their best move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import InvalidInputError, quality_risk
from .settlement import total_reward as default_reward_policy

RewardPolicy = Callable[[Sequence[float]], float]


class TaskAbortedError(RuntimeError):
    """Recruitment cannot proceed (fewer than two applications)."""


@dataclass(frozen=True)
class Application:
    """One user's application to one task: its id and current reputation."""

    user: int
    reputation: float


@dataclass(frozen=True)
class RecruitmentResult:
    """Employee set in admission order, per-employee expected contribution
    and expected payback, and the task's total reward."""

    employees: tuple[int, ...]
    expected_contribution: dict[int, float]
    expected_payback: dict[int, float]
    total_reward: float


def recruitment_threshold(risk_sum: float, e_size: int) -> float:
    """Admission bound for the next candidate given the current employee set."""
    if e_size < 2:
        raise InvalidInputError(f"employee set must have >= 2 members, got {e_size}")
    if risk_sum <= 0.0:
        raise InvalidInputError(f"risk sum must be > 0, got {risk_sum}")
    return (e_size - 1) / (risk_sum + e_size - 1)


def payoff(contribution: float, others_total: float, reward: float, reputation: float) -> float:
    """Single-employee payback ``c / (c + others) * R - risk * c``.

    ``others_total`` is the summed contribution of everyone else; the
    function is strictly concave in ``contribution`` for others_total > 0.
    """
    return (
        contribution / (contribution + others_total) * reward
        - quality_risk(reputation) * contribution
    )


def stationary_contribution(reputation: float, reward: float, others_total: float) -> float:
    """Contribution at which the payoff derivative vanishes, others fixed.

    May be <= 0, in which case no profitable participation level exists.
    """
    if others_total <= 0.0:
        raise InvalidInputError(f"others_total must be > 0, got {others_total}")
    r = reputation
    return math.sqrt(r * reward * others_total / (1.0 - r)) - others_total


def expected_payback(
    c_exp_i: float, c_exp_sum: float, reward: float, r_i: float
) -> float:
    """Payback an employee earns when everyone contributes as expected."""
    if c_exp_sum <= 0.0:
        raise InvalidInputError(f"c_exp_sum must be > 0, got {c_exp_sum}")
    return (c_exp_i / c_exp_sum) * reward - quality_risk(r_i) * c_exp_i


def recruit(
    applications: Sequence[Application],
    reward_policy: RewardPolicy | None = None,
) -> RecruitmentResult:
    """Select the employee set and its expected contributions and paybacks.

    Applications are ranked by reputation descending, ties broken by user id
    ascending so results are deterministic for any input order.  Raises
    TaskAbortedError on fewer than two applications.
    """
    if len(applications) < 2:
        raise TaskAbortedError(
            f"need at least 2 applications, got {len(applications)}"
        )
    users = [a.user for a in applications]
    if len(set(users)) != len(users):
        raise InvalidInputError("duplicate user id among applications")
    for a in applications:
        if not 0.0 < a.reputation < 1.0:
            raise InvalidInputError(
                f"reputation of user {a.user} must lie in (0, 1), got {a.reputation}"
            )

    ranked = sorted(applications, key=lambda a: (-a.reputation, a.user))

    employees = [ranked[0], ranked[1]]
    risk_sum = quality_risk(ranked[0].reputation) + quality_risk(ranked[1].reputation)
    for candidate in ranked[2:]:
        if candidate.reputation <= recruitment_threshold(risk_sum, len(employees)):
            break
        employees.append(candidate)
        risk_sum += quality_risk(candidate.reputation)

    n = len(employees)
    if reward_policy is None:
        reward_policy = default_reward_policy
    reward = reward_policy([a.reputation for a in employees])

    scale = (n - 1) * reward / risk_sum
    expected_contribution = {
        a.user: scale * (1.0 - (n - 1) * quality_risk(a.reputation) / risk_sum)
        for a in employees
    }
    c_exp_sum = sum(expected_contribution.values())
    expected_paybacks = {
        a.user: expected_payback(
            expected_contribution[a.user], c_exp_sum, reward, a.reputation
        )
        for a in employees
    }
    return RecruitmentResult(
        employees=tuple(a.user for a in employees),
        expected_contribution=expected_contribution,
        expected_payback=expected_paybacks,
        total_reward=reward,
    )
