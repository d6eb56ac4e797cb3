"""Per-user time-stamped sensing samples: file loading and synthesis.

Trace files are plain CSV, one sample per row, ``user_id,timestamp_s,temp_c``,
header optional.  The synthetic generator stands in for a real 24-hour
outdoor-temperature collection: every user samples at seeded exponential
intervals, and values follow a shared diurnal sinusoid

    T(t) = base + amplitude * sin(2*pi*(t - t_peak)/86400) + noise

clipped to the plausible range (default [2, 24] degrees C, which the default
sinusoid spans exactly).
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path

from .core import InvalidInputError
from .rng import STREAM_TRACE, substream

DAY_S = 86_400


class TraceParseError(ValueError):
    """A trace file row could not be parsed."""


@dataclass(frozen=True)
class TraceSample:
    user: int
    timestamp: int
    value: float


class TraceSet:
    """Immutable per-user sample series, sorted by timestamp on construction."""

    def __init__(self, samples: list[TraceSample], horizon: int | None = None):
        if not samples:
            raise InvalidInputError("trace has no samples")
        by_user: dict[int, list[TraceSample]] = {}
        for s in samples:
            if not math.isfinite(s.value):
                raise InvalidInputError(f"non-finite value for user {s.user}")
            by_user.setdefault(s.user, []).append(s)
        if len(by_user) < 2:
            raise InvalidInputError(f"trace needs >= 2 users, got {len(by_user)}")
        self._times: dict[int, list[int]] = {}
        self._values: dict[int, list[float]] = {}
        max_ts = 0
        for user, rows in by_user.items():
            rows.sort(key=lambda s: s.timestamp)
            self._times[user] = [s.timestamp for s in rows]
            self._values[user] = [s.value for s in rows]
            max_ts = max(max_ts, rows[-1].timestamp)
        self.horizon = horizon if horizon is not None else max(DAY_S, max_ts + 1)

    @property
    def users(self) -> list[int]:
        return sorted(self._times)

    def samples_of(self, user: int) -> list[TraceSample]:
        if user not in self._times:
            raise InvalidInputError(f"unknown user {user}")
        return [
            TraceSample(user, t, v)
            for t, v in zip(self._times[user], self._values[user])
        ]

    def sample_count(self) -> int:
        return sum(len(ts) for ts in self._times.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TraceSet):
            return NotImplemented
        return (
            self.horizon == other.horizon
            and self._times == other._times
            and self._values == other._values
        )


def load_trace(path: str | Path, horizon: int | None = None) -> TraceSet:
    """Parse a CSV trace file.  Rows are sorted per user; a malformed row
    raises TraceParseError naming its line number."""
    samples: list[TraceSample] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1 and _is_header(row):
                continue
            if len(row) != 3:
                raise TraceParseError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                user = int(row[0])
                ts = int(row[1])
                value = float(row[2])
            except ValueError as exc:
                raise TraceParseError(f"line {lineno}: {exc}") from exc
            if user < 0:
                raise TraceParseError(f"line {lineno}: negative user id {user}")
            samples.append(TraceSample(user=user, timestamp=ts, value=value))
    if not samples:
        raise InvalidInputError(f"trace file {path} contains no samples")
    return TraceSet(samples, horizon=horizon)


def _is_header(row: list[str]) -> bool:
    try:
        int(row[0])
        return False
    except ValueError:
        return True


def write_trace(trace: TraceSet, path: str | Path, header: bool = True) -> None:
    """Write a TraceSet in the CSV trace format (round-trips via load_trace)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(["user_id", "timestamp_s", "temp_c"])
        for user in trace.users:
            for s in trace.samples_of(user):
                writer.writerow([s.user, s.timestamp, repr(s.value)])


def synth_trace(
    users: int,
    horizon: int = DAY_S,
    mean_interval: int = 300,
    seed: int = 0,
    base: float = 13.0,
    amplitude: float = 11.0,
    t_peak: int = 28_800,
    noise_sigma: float = 0.5,
    value_low: float = 2.0,
    value_high: float = 24.0,
    resolution: float | None = None,
) -> TraceSet:
    """Deterministically generate a trace for ``users`` users.

    Sample times come from a per-user seeded renewal process with
    exponential gaps of the given mean; all values are clipped to
    [value_low, value_high].  ``resolution`` rounds values to the sensor's
    reporting step (real temperature loggers quantize; e.g. 1.0 gives
    whole-degree readings), None keeps them continuous.
    """
    if users < 2:
        raise InvalidInputError(f"need >= 2 users, got {users}")
    if horizon <= 0:
        raise InvalidInputError(f"horizon must be > 0, got {horizon}")
    if mean_interval <= 0:
        raise InvalidInputError(f"mean_interval must be > 0, got {mean_interval}")
    if resolution is not None and resolution <= 0:
        raise InvalidInputError(f"resolution must be > 0, got {resolution}")
    samples: list[TraceSample] = []
    omega = 2.0 * math.pi / DAY_S
    for user in range(users):
        rng = substream(seed, STREAM_TRACE, user)
        t = rng.exponential(mean_interval)
        while t < horizon:
            ts = int(t)
            diurnal = base + amplitude * math.sin(omega * (ts - t_peak))
            value = diurnal + rng.normal(0.0, noise_sigma)
            if resolution is not None:
                value = round(value / resolution) * resolution
            value = min(max(value, value_low), value_high)
            samples.append(TraceSample(user=user, timestamp=ts, value=value))
            t += rng.exponential(mean_interval)
    return TraceSet(samples, horizon=horizon)


def query_window(
    trace: TraceSet, user: int, t: int, half_window: int
) -> float | None:
    """Value of the user's sample nearest to ``t`` within ``t +- half_window``,
    or None when the user has no sample in the window (it does not apply).
    Equidistant neighbours resolve to the earlier sample."""
    if half_window < 0:
        raise InvalidInputError(f"half_window must be >= 0, got {half_window}")
    times = trace._times.get(user)
    if times is None:
        raise InvalidInputError(f"unknown user {user}")
    lo = bisect_left(times, t - half_window)
    hi = bisect_right(times, t + half_window)
    if lo >= hi:
        return None
    best = lo
    for i in range(lo + 1, hi):
        if abs(times[i] - t) < abs(times[best] - t):
            best = i
    return trace._values[user][best]
