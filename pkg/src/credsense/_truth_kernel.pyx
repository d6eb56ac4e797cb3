# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-point kernel for weighted truth discovery.

Mirrors credsense._truth_loop.run_fixed_point operation for operation; keep
the two in lockstep when changing either.
"""

from libc.math cimport fabs, log

import numpy as np


def run_fixed_point(
    double[::1] obs,
    double[::1] reps,
    double truth0,
    double std,
    double epsilon,
    int max_iterations,
    double floor,
    double inv_log_base,
):
    """Iterate reputation-weighted scores against the weighted truth estimate.

    Returns (truth, raw weights, iterations, converged).
    """
    cdef Py_ssize_t n = obs.shape[0]
    cdef double[::1] terms = np.empty(n, dtype=np.float64)
    weights_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] weights = weights_arr
    cdef double truth = truth0
    cdef double total, d, sq, w, prev, num, den
    cdef Py_ssize_t i
    cdef int iterations = 0
    cdef bint converged = False

    while iterations < max_iterations:
        iterations += 1
        total = 0.0
        for i in range(n):
            d = obs[i] - truth
            sq = d * d
            if sq < floor:
                sq = floor
            terms[i] = sq / (std * reps[i])
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
            num += weights[i] * obs[i]
            den += weights[i]
        truth = num / den
        if fabs(truth - prev) < epsilon:
            converged = True
            break

    return truth, weights_arr, iterations, bool(converged)
