"""Weighted truth discovery over conflicting observations.

Given one observation per employee and the employees' reputations, iterate
between per-employee credibility scores and a weighted truth estimate:

    score_i = log( sum_j term_j / term_i ),
    term_i  = max((o_i - truth)^2, floor) / (std * r_i)

    truth   = sum_i score_i * o_i / sum_i score_i

until the truth estimate moves by less than ``epsilon``.  A score is large
when the observation is close to the current truth estimate or comes from a
high-reputation employee; because ``term_i`` is one summand of the positive
numerator sum, every score is non-negative, so the truth stays inside the
convex hull of the observations.  The normalized scores are returned as the
employees' actual contributions (they sum to 1).

Numerical guards:

* all-equal observations short-circuit (std = 0 would zero every term);
* squared distances are floored at ``1e-9 * std^2`` so an observation that
  hits the truth estimate exactly gets a large finite score instead of an
  infinite one, preserving the score ordering;
* the log base is configurable but irrelevant: switching base rescales all
  scores uniformly, leaving the weighted mean and the normalized
  contributions unchanged.

The inner loop runs in a compiled extension when available and falls back
to a pure-Python twin otherwise; see ``kernel_backend()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import InvalidInputError, InvalidValueError

try:
    from . import _truth_kernel as _kernel

    _BACKEND = "compiled"
except ImportError:  # extension not built; use the pure-Python twin
    from . import _truth_loop as _kernel

    _BACKEND = "python"

DISTANCE_FLOOR_FACTOR = 1e-9
DEFAULT_MAX_ITERATIONS = 100


def kernel_backend() -> str:
    """Which fixed-point implementation is active: 'compiled' or 'python'."""
    return _BACKEND


@dataclass(frozen=True)
class Observation:
    """One employee's reported value for one task."""

    user: int
    value: float


@dataclass(frozen=True)
class TruthResult:
    """Discovered truth plus the normalized per-employee contributions."""

    truth: float
    contributions: dict[int, float]
    iterations: int
    converged: bool


class TruthNotConverged(RuntimeError):
    """Iteration cap reached before the stop rule; carries the last iterate."""

    def __init__(self, message: str, result: TruthResult):
        super().__init__(message)
        self.result = result


def population_std(values: Sequence[float]) -> float:
    """Standard deviation with the 1/N convention."""
    if len(values) < 2:
        raise InvalidInputError(f"need at least 2 values, got {len(values)}")
    mean = sum(values) / len(values)
    return math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))


def discover(
    observations: Sequence[Observation],
    reputations: Mapping[int, float],
    epsilon: float = 0.1,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    init: str = "mean",
    init_seed: int | tuple[int, ...] | None = None,
    log_base: float | None = None,
) -> TruthResult:
    """Discover the sensing truth and the actual contributions.

    init: 'mean' starts from the unweighted mean of the observations
    (deterministic, inside the convex hull); 'uniform' draws the start
    uniformly from [min, max] using ``init_seed``, for robustness checks.
    log_base: None means natural log.

    Raises TruthNotConverged when ``max_iterations`` passes do not satisfy
    the stop rule, with the last iterate attached.
    """
    n = len(observations)
    if n < 2:
        raise InvalidInputError(f"need at least 2 observations, got {n}")
    if epsilon <= 0.0:
        raise InvalidValueError(f"epsilon must be > 0, got {epsilon}")
    if max_iterations < 1:
        raise InvalidValueError(f"max_iterations must be >= 1, got {max_iterations}")
    users = [o.user for o in observations]
    if len(set(users)) != n:
        raise InvalidInputError("duplicate user id among observations")
    for o in observations:
        if not math.isfinite(o.value):
            raise InvalidValueError(f"observation of user {o.user} is not finite")
        r = reputations.get(o.user)
        if r is None:
            raise InvalidInputError(f"no reputation for user {o.user}")
        if not 0.0 < r < 1.0:
            raise InvalidInputError(
                f"reputation of user {o.user} must lie in (0, 1), got {r}"
            )

    values = np.array([o.value for o in observations], dtype=np.float64)
    reps = np.array([reputations[o.user] for o in observations], dtype=np.float64)

    std = population_std(values.tolist())
    if std == 0.0:
        # All observations agree; that common value is the truth and nobody
        # contributed more than anybody else.
        return TruthResult(
            truth=float(values[0]),
            contributions={u: 1.0 / n for u in users},
            iterations=0,
            converged=True,
        )

    if init == "mean":
        truth0 = float(values.sum() / n)
    elif init == "uniform":
        if init_seed is None:
            raise InvalidInputError("init='uniform' requires init_seed")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(init_seed)))
        truth0 = float(rng.uniform(values.min(), values.max()))
    else:
        raise InvalidInputError(f"unknown init policy {init!r}")

    inv_log_base = 1.0 if log_base is None else 1.0 / math.log(log_base)
    floor = DISTANCE_FLOOR_FACTOR * std * std

    truth, weights, iterations, converged = _kernel.run_fixed_point(
        values, reps, truth0, std, epsilon, max_iterations, floor, inv_log_base
    )

    weight_sum = float(weights.sum())
    contributions = {
        u: float(w) / weight_sum for u, w in zip(users, weights)
    }
    result = TruthResult(
        truth=float(truth),
        contributions=contributions,
        iterations=int(iterations),
        converged=bool(converged),
    )
    if not converged:
        raise TruthNotConverged(
            f"no convergence within {max_iterations} iterations "
            f"(last |step| target {epsilon})",
            result,
        )
    return result
