"""Pure-Python twin of the compiled fixed-point kernel.

Used when the Cython extension is unavailable.  Operation order matches the
compiled kernel exactly (same accumulation order, same libm calls) so both
paths produce identical doubles on IEEE-754 hardware.
"""

from __future__ import annotations

from math import log

import numpy as np


def run_fixed_point(
    obs: np.ndarray,
    reps: np.ndarray,
    truth0: float,
    std: float,
    epsilon: float,
    max_iterations: int,
    floor: float,
    inv_log_base: float,
) -> tuple[float, np.ndarray, int, bool]:
    """Iterate reputation-weighted scores against the weighted truth estimate.

    Returns (truth, raw weights, iterations, converged).  Weights are the
    un-normalized scores from the final pass.
    """
    o = obs.tolist()
    r = reps.tolist()
    n = len(o)
    terms = [0.0] * n
    weights = [0.0] * n
    truth = truth0
    iterations = 0
    converged = False

    while iterations < max_iterations:
        iterations += 1
        total = 0.0
        for i in range(n):
            d = o[i] - truth
            sq = d * d
            if sq < floor:
                sq = floor
            terms[i] = sq / (std * r[i])
            total += terms[i]
        for i in range(n):
            w = log(total / terms[i]) * inv_log_base
            if w < 0.0:
                raise RuntimeError(f"negative weight {w} at index {i}")
            weights[i] = w

        prev = truth
        num = 0.0
        den = 0.0
        for i in range(n):
            num += weights[i] * o[i]
            den += weights[i]
        truth = num / den
        if abs(truth - prev) < epsilon:
            converged = True
            break

    return truth, np.asarray(weights), iterations, converged
