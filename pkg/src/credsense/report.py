"""Metric extraction and cross-scenario comparison.

Four metrics per run:

  DT  -- discovered truth per settled task (sensing accuracy)
  REP -- user reputation (final, or a user's trajectory over time)
  PB  -- normalized payback a user accumulated
  TC  -- number of tasks a user accomplished

Each is presentable as an empirical distribution (``cdf``) or a per-user
time series sampled at task announce times (``tvf``; PB and TC are
cumulative, REP is the running state, DT is the per-task value).

``dt_disturbance`` quantifies how much a variant run (with cheating)
disturbed sensing accuracy relative to a same-seed baseline, as the mean
absolute truth difference over tasks settled in both runs, both in percent
of the baseline's mean absolute truth and in observation units.  It also
reports population-mean and per-target REP/PB/TC percentage deltas.

Point series are emitted as CSV (metric, scenario, kind, x, y) and
round-trip exactly; the disturbance summary is a key: value text file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import InvalidInputError
from .engine import SimResult

METRICS = ("DT", "REP", "PB", "TC")


@dataclass(frozen=True)
class MetricSeries:
    metric: str
    scenario: str
    kind: str  # "cdf" or "tvf"
    points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class DisturbanceSummary:
    baseline_label: str
    variant_label: str
    common_tasks: int
    mean_dt_disturbance_pct: float
    mean_dt_disturbance_abs: float
    mean_rep_delta_pct: float
    mean_pb_delta_pct: float
    mean_tc_delta_pct: float
    per_target: dict[int, dict[str, float]]


def cdf(values: Sequence[float], metric: str = "", scenario: str = "") -> MetricSeries:
    """Empirical CDF: one point per distinct value, y = fraction <= x."""
    if len(values) == 0:
        raise InvalidInputError("cannot build a CDF from no values")
    ordered = sorted(values)
    n = len(ordered)
    points: list[tuple[float, float]] = []
    for i, v in enumerate(ordered, start=1):
        if i < n and ordered[i] == v:
            continue  # keep only the terminal point of a tie plateau
        points.append((float(v), i / n))
    return MetricSeries(metric=metric, scenario=scenario, kind="cdf", points=tuple(points))


def tvf(result: SimResult, metric: str, user: int | None = None) -> MetricSeries:
    """Time series of a metric over the run's settled tasks.

    DT takes no user; REP/PB/TC follow one user (running reputation,
    cumulative normalized payback, cumulative task count).
    """
    if metric not in METRICS:
        raise InvalidInputError(f"unknown metric {metric!r}")
    if metric == "DT":
        if user is not None:
            raise InvalidInputError("DT is not a per-user metric")
        points = [
            (float(o.announce_time), o.discovered_truth)
            for o in result.outcomes
            if not o.skipped
        ]
        return MetricSeries("DT", result.label, "tvf", tuple(points))

    if user is None or user not in result.final_reputations:
        raise InvalidInputError(f"unknown user {user}")
    rep = _initial_reputation(result)
    pb = 0.0
    tc = 0
    points = []
    for o in result.outcomes:
        if o.skipped:
            continue
        if user in o.employees:
            rep = o.reputations_after[user]
            pb += o.paybacks[user].normalized
            tc += 1
        y = {"REP": rep, "PB": pb, "TC": float(tc)}[metric]
        points.append((float(o.announce_time), y))
    return MetricSeries(metric, result.label, "tvf", tuple(points))


def _initial_reputation(result: SimResult) -> float:
    params = result.config.get("params", {})
    return params.get("r0", 0.5)


def result_cdfs(result: SimResult) -> list[MetricSeries]:
    """The four per-run distributions: task truths, final reputations,
    payback totals, task counts."""
    truths = [o.discovered_truth for o in result.outcomes if not o.skipped]
    series = []
    if truths:
        series.append(cdf(truths, "DT", result.label))
    users = sorted(result.final_reputations)
    if users:
        series.append(cdf([result.final_reputations[u] for u in users], "REP", result.label))
        series.append(cdf([result.payback_totals[u] for u in users], "PB", result.label))
        series.append(cdf([float(result.task_counts[u]) for u in users], "TC", result.label))
    return series


def _pct_delta(variant: float, baseline: float) -> float:
    if baseline == 0.0:
        return 0.0 if variant == 0.0 else float("inf") if variant > 0 else float("-inf")
    return 100.0 * (variant - baseline) / abs(baseline)


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def dt_disturbance(baseline: SimResult, variant: SimResult) -> DisturbanceSummary:
    """Compare a variant run against its same-seed baseline.

    Only tasks settled in both runs enter the truth comparison.  Per-target
    deltas cover the users listed in the variant's cheat policy (empty for
    general-intensity runs, whose cheaters are the whole population).
    """
    base_truths = {
        o.task_id: o.discovered_truth for o in baseline.outcomes if not o.skipped
    }
    var_truths = {
        o.task_id: o.discovered_truth for o in variant.outcomes if not o.skipped
    }
    common = sorted(set(base_truths) & set(var_truths))
    if not common:
        raise InvalidInputError("runs share no settled tasks")

    abs_diff = _mean([abs(var_truths[t] - base_truths[t]) for t in common])
    base_mean_abs = _mean([abs(base_truths[t]) for t in common])
    pct = 100.0 * abs_diff / base_mean_abs if base_mean_abs > 0 else 0.0

    users = sorted(set(baseline.final_reputations) & set(variant.final_reputations))
    if users:
        rep_delta = _pct_delta(
            _mean([variant.final_reputations[u] for u in users]),
            _mean([baseline.final_reputations[u] for u in users]),
        )
        pb_delta = _pct_delta(
            _mean([variant.payback_totals[u] for u in users]),
            _mean([baseline.payback_totals[u] for u in users]),
        )
        tc_delta = _pct_delta(
            _mean([float(variant.task_counts[u]) for u in users]),
            _mean([float(baseline.task_counts[u]) for u in users]),
        )
    else:
        rep_delta = pb_delta = tc_delta = 0.0

    per_target: dict[int, dict[str, float]] = {}
    for target in variant.config.get("cheat", {}).get("targets", []):
        if target not in baseline.final_reputations:
            continue
        per_target[target] = {
            "rep_delta_pct": _pct_delta(
                variant.final_reputations[target], baseline.final_reputations[target]
            ),
            "pb_delta_pct": _pct_delta(
                variant.payback_totals[target], baseline.payback_totals[target]
            ),
            "tc_delta_pct": _pct_delta(
                float(variant.task_counts[target]), float(baseline.task_counts[target])
            ),
        }

    return DisturbanceSummary(
        baseline_label=baseline.label,
        variant_label=variant.label,
        common_tasks=len(common),
        mean_dt_disturbance_pct=pct,
        mean_dt_disturbance_abs=abs_diff,
        mean_rep_delta_pct=rep_delta,
        mean_pb_delta_pct=pb_delta,
        mean_tc_delta_pct=tc_delta,
        per_target=per_target,
    )


# -- file emission ----------------------------------------------------------

_CSV_HEADER = ["metric", "scenario", "kind", "x", "y"]


def write_series_csv(path: str | Path, series: Iterable[MetricSeries]) -> None:
    """Point series as CSV; floats are written with repr so parsing the file
    back reproduces the series exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for s in series:
            for x, y in s.points:
                writer.writerow([s.metric, s.scenario, s.kind, repr(x), repr(y)])


def read_series_csv(path: str | Path) -> list[MetricSeries]:
    groups: dict[tuple[str, str, str], list[tuple[float, float]]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != _CSV_HEADER:
            raise InvalidInputError(f"not a metric series file: {path}")
        for row in reader:
            metric, scenario, kind, x, y = row
            groups.setdefault((metric, scenario, kind), []).append((float(x), float(y)))
    return [
        MetricSeries(metric=m, scenario=s, kind=k, points=tuple(pts))
        for (m, s, k), pts in groups.items()
    ]


def format_disturbance(summary: DisturbanceSummary) -> str:
    lines = [
        f"baseline: {summary.baseline_label}",
        f"variant: {summary.variant_label}",
        f"common_tasks: {summary.common_tasks}",
        f"mean_dt_disturbance_pct: {summary.mean_dt_disturbance_pct!r}",
        f"mean_dt_disturbance_abs: {summary.mean_dt_disturbance_abs!r}",
        f"mean_rep_delta_pct: {summary.mean_rep_delta_pct!r}",
        f"mean_pb_delta_pct: {summary.mean_pb_delta_pct!r}",
        f"mean_tc_delta_pct: {summary.mean_tc_delta_pct!r}",
    ]
    for user in sorted(summary.per_target):
        d = summary.per_target[user]
        lines.append(
            f"target {user}: rep {d['rep_delta_pct']:+.2f}% "
            f"pb {d['pb_delta_pct']:+.2f}% tc {d['tc_delta_pct']:+.2f}%"
        )
    return "\n".join(lines) + "\n"


def write_disturbance(path: str | Path, summary: DisturbanceSummary) -> None:
    Path(path).write_text(format_disturbance(summary))
