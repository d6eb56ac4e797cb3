"""Deterministic random-stream derivation.

One master seed per scenario; every stochastic consumer derives its own
substream from a structured key, so runs are reproducible and adding one
consumer (e.g. turning a user into a cheater) never perturbs the draws of
any other.  Report streams are keyed by (seed, user, task): two scenarios
sharing a seed see identical underlying uniforms per user and task, which
makes baseline-vs-variant comparisons causally clean and nests the cheat
events of lower intensities inside higher ones.
"""

from __future__ import annotations

import numpy as np

# Stream namespaces; keep values stable, they are part of reproducibility.
STREAM_TRACE = 1
STREAM_SCHEDULE = 2
STREAM_REPORT = 3
STREAM_TRUTH_INIT = 4


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream identified by ``(seed, *key)``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, *key))))
