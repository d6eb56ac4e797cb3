"""Task lifecycle driver.

One scenario runs a fixed horizon of announced sensing tasks against a
shared reputation state:

    announce -> collect applications (users with an in-window trace sample)
             -> recruit by reputation
             -> collect reports (honest value or cheat draw per policy)
             -> discover truth and actual contributions
             -> settle paybacks, write back employee reputations

Reputation is the only cross-task mutable state, and it changes only for
recruited employees of tasks that settle.  Tasks with fewer than two
applicants, or whose truth discovery hits the iteration cap, are recorded
as skipped and leave the state untouched.  Everything stochastic derives
from the scenario seed, so a (config, seed) pair reproduces the serialized
result byte for byte.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .adversary import CheatPolicy, decide_cheat, make_report
from .core import IncentiveParams, InvalidInputError, PaybackAmount
from .recruitment import Application, recruit
from .rng import STREAM_REPORT, STREAM_SCHEDULE, STREAM_TRUTH_INIT, substream
from .settlement import settle
from .trace import TraceSet, load_trace, query_window, synth_trace
from .truth import TruthNotConverged, discover

SKIP_INSUFFICIENT_APPLICANTS = "insufficient applicants"
SKIP_NO_CONVERGENCE = "no convergence"

DEFAULT_HALF_WINDOW_S = 60
DEFAULT_TASK_INTERVAL_S = 300


@dataclass(frozen=True)
class TaskSpec:
    task_id: int
    announce_time: int
    half_window: int = DEFAULT_HALF_WINDOW_S


@dataclass(frozen=True)
class ScheduleSpec:
    """How tasks are announced over the horizon: at a fixed interval, or as
    seeded Poisson arrivals with the given rate."""

    kind: str = "fixed"
    interval_s: int = DEFAULT_TASK_INTERVAL_S
    rate_per_s: float | None = None
    half_window_s: int = DEFAULT_HALF_WINDOW_S


@dataclass(frozen=True)
class TraceSpec:
    """Where the per-user samples come from: a CSV file, or the synthetic
    generator (parameters mirror trace.synth_trace)."""

    kind: str = "synth"
    path: str | None = None
    users: int = 366
    mean_interval_s: int = 300
    base: float = 13.0
    amplitude: float = 11.0
    t_peak: int = 28_800
    noise_sigma: float = 0.5
    value_low: float = 2.0
    value_high: float = 24.0
    resolution: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    label: str = "scenario"
    seed: int = 0
    horizon_s: int = 86_400
    params: IncentiveParams = field(default_factory=IncentiveParams)
    trace: TraceSpec = field(default_factory=TraceSpec)
    schedule: ScheduleSpec = field(default_factory=ScheduleSpec)
    cheat: CheatPolicy = field(default_factory=CheatPolicy)
    td_max_iterations: int = 100
    td_init: str = "mean"

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise InvalidInputError(f"seed must be non-negative, got {self.seed}")
        if self.horizon_s < 0:
            raise InvalidInputError(f"horizon must be >= 0, got {self.horizon_s}")

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["cheat"]["targets"] = list(self.cheat.targets)
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ScenarioConfig":
        d = dict(d)
        _reject_unknown(d, {
            "label", "seed", "horizon_s", "params", "trace", "schedule",
            "cheat", "td_max_iterations", "td_init",
        }, "config")
        kwargs: dict[str, Any] = {}
        for key in ("label", "seed", "horizon_s", "td_max_iterations", "td_init"):
            if key in d:
                kwargs[key] = d[key]
        if "params" in d:
            kwargs["params"] = IncentiveParams(**d["params"])
        if "trace" in d:
            kwargs["trace"] = TraceSpec(**d["trace"])
        if "schedule" in d:
            kwargs["schedule"] = ScheduleSpec(**d["schedule"])
        if "cheat" in d:
            c = dict(d["cheat"])
            c["targets"] = tuple(c.get("targets", ()))
            kwargs["cheat"] = CheatPolicy(**c)
        return cls(**kwargs)


def _reject_unknown(d: dict[str, Any], allowed: set[str], what: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise InvalidInputError(f"unknown {what} keys: {sorted(unknown)}")


@dataclass(frozen=True)
class TaskOutcome:
    task_id: int
    announce_time: int
    skipped: bool = False
    skip_reason: str | None = None
    discovered_truth: float | None = None
    employees: tuple[int, ...] = ()
    contributions: dict[int, float] = field(default_factory=dict)
    expected_contributions: dict[int, float] = field(default_factory=dict)
    paybacks: dict[int, PaybackAmount] = field(default_factory=dict)
    reputations_after: dict[int, float] = field(default_factory=dict)


@dataclass
class SimResult:
    label: str
    seed: int
    config: dict[str, Any]
    outcomes: list[TaskOutcome]
    final_reputations: dict[int, float]
    payback_totals: dict[int, float]
    task_counts: dict[int, int]

    @property
    def skipped_count(self) -> int:
        return sum(1 for o in self.outcomes if o.skipped)


def build_schedule(spec: ScheduleSpec, horizon: int, seed: int) -> list[TaskSpec]:
    """Announce times over [0, horizon); a zero horizon yields no tasks."""
    if horizon < 0:
        raise InvalidInputError(f"horizon must be >= 0, got {horizon}")
    if spec.kind == "fixed":
        interval = spec.interval_s
        if interval <= 0 or int(interval) != interval:
            raise InvalidInputError(f"interval_s must be a positive integer, got {interval}")
        times = list(range(0, horizon, int(interval)))
    elif spec.kind == "poisson":
        if spec.rate_per_s is None or spec.rate_per_s <= 0:
            raise InvalidInputError(f"rate_per_s must be > 0, got {spec.rate_per_s}")
        rng = substream(seed, STREAM_SCHEDULE)
        times = []
        t = rng.exponential(1.0 / spec.rate_per_s)
        prev = -1
        while t < horizon:
            ts = max(int(t), prev + 1)
            if ts >= horizon:
                break
            times.append(ts)
            prev = ts
            t += rng.exponential(1.0 / spec.rate_per_s)
    else:
        raise InvalidInputError(f"unknown schedule kind {spec.kind!r}")
    return [
        TaskSpec(task_id=i, announce_time=t, half_window=spec.half_window_s)
        for i, t in enumerate(times)
    ]


def run_task(
    task: TaskSpec,
    reputations: dict[int, float],
    trace: TraceSet,
    policy: CheatPolicy,
    params: IncentiveParams,
    seed: int,
    td_max_iterations: int = 100,
    td_init: str = "mean",
) -> TaskOutcome:
    """Run one task against the current reputation state.

    Mutates ``reputations`` for the recruited employees of a settled task;
    skipped tasks leave it untouched.
    """
    honest_values: dict[int, float] = {}
    for user in trace.users:
        value = query_window(trace, user, task.announce_time, task.half_window)
        if value is not None:
            honest_values[user] = value

    if len(honest_values) < 2:
        return TaskOutcome(
            task_id=task.task_id,
            announce_time=task.announce_time,
            skipped=True,
            skip_reason=SKIP_INSUFFICIENT_APPLICANTS,
        )

    applications = [Application(user=u, reputation=reputations[u]) for u in sorted(honest_values)]
    recruited = recruit(applications)

    observations = []
    for user in recruited.employees:
        rng = substream(seed, STREAM_REPORT, user, task.task_id)
        cheat = decide_cheat(policy, user, rng)
        observations.append(
            make_report(user, honest_values[user], cheat, policy, rng)
        )

    employee_reps = {u: reputations[u] for u in recruited.employees}
    try:
        truth = discover(
            observations,
            employee_reps,
            epsilon=params.epsilon,
            max_iterations=td_max_iterations,
            init=td_init,
            init_seed=(seed, STREAM_TRUTH_INIT, task.task_id) if td_init == "uniform" else None,
        )
    except TruthNotConverged:
        return TaskOutcome(
            task_id=task.task_id,
            announce_time=task.announce_time,
            skipped=True,
            skip_reason=SKIP_NO_CONVERGENCE,
        )

    settlement = settle(
        actual=truth.contributions,
        expected=recruited.expected_contribution,
        reputations=employee_reps,
        reward=recruited.total_reward,
        params=params,
    )
    for user, rep in settlement.new_reputations.items():
        reputations[user] = rep

    return TaskOutcome(
        task_id=task.task_id,
        announce_time=task.announce_time,
        discovered_truth=truth.truth,
        employees=recruited.employees,
        contributions=truth.contributions,
        expected_contributions=recruited.expected_contribution,
        paybacks=settlement.paybacks,
        reputations_after=dict(settlement.new_reputations),
    )


def _build_trace(config: ScenarioConfig) -> TraceSet:
    t = config.trace
    if t.kind == "file":
        if t.path is None:
            raise InvalidInputError("trace kind 'file' needs a path")
        return load_trace(t.path, horizon=config.horizon_s)
    if t.kind == "synth":
        return synth_trace(
            users=t.users,
            horizon=config.horizon_s,
            mean_interval=t.mean_interval_s,
            seed=config.seed,
            base=t.base,
            amplitude=t.amplitude,
            t_peak=t.t_peak,
            noise_sigma=t.noise_sigma,
            value_low=t.value_low,
            value_high=t.value_high,
            resolution=t.resolution,
        )
    raise InvalidInputError(f"unknown trace kind {t.kind!r}")


def run_scenario(config: ScenarioConfig) -> SimResult:
    """Run one full scenario; fully determined by (config, seed)."""
    if config.cheat.kind == "targeted" and not config.cheat.targets:
        raise InvalidInputError(
            "targeted policy has unresolved targets; resolve against a baseline first"
        )
    schedule = build_schedule(config.schedule, config.horizon_s, config.seed)

    outcomes: list[TaskOutcome] = []
    if not schedule:
        return SimResult(
            label=config.label,
            seed=config.seed,
            config=config.to_dict(),
            outcomes=outcomes,
            final_reputations={},
            payback_totals={},
            task_counts={},
        )

    trace = _build_trace(config)
    reputations = {u: config.params.r0 for u in trace.users}
    payback_totals = {u: 0.0 for u in trace.users}
    task_counts = {u: 0 for u in trace.users}

    for task in schedule:
        outcome = run_task(
            task,
            reputations,
            trace,
            config.cheat,
            config.params,
            config.seed,
            td_max_iterations=config.td_max_iterations,
            td_init=config.td_init,
        )
        outcomes.append(outcome)
        if not outcome.skipped:
            for user in outcome.employees:
                payback_totals[user] += outcome.paybacks[user].normalized
                task_counts[user] += 1

    return SimResult(
        label=config.label,
        seed=config.seed,
        config=config.to_dict(),
        outcomes=outcomes,
        final_reputations=dict(reputations),
        payback_totals=payback_totals,
        task_counts=task_counts,
    )


# -- serialization ----------------------------------------------------------

RESULT_FORMAT = "credsense-result-v1"


def _outcome_to_dict(o: TaskOutcome) -> dict[str, Any]:
    return {
        "task_id": o.task_id,
        "announce_time": o.announce_time,
        "skipped": o.skipped,
        "skip_reason": o.skip_reason,
        "discovered_truth": o.discovered_truth,
        "employees": list(o.employees),
        "contributions": {str(u): v for u, v in o.contributions.items()},
        "expected_contributions": {
            str(u): v for u, v in o.expected_contributions.items()
        },
        "paybacks_raw": {str(u): p.raw for u, p in o.paybacks.items()},
        "paybacks_normalized": {str(u): p.normalized for u, p in o.paybacks.items()},
        "reputations_after": {str(u): v for u, v in o.reputations_after.items()},
    }


def _outcome_from_dict(d: dict[str, Any]) -> TaskOutcome:
    paybacks = {
        int(u): PaybackAmount(raw=d["paybacks_raw"][u], normalized=d["paybacks_normalized"][u])
        for u in d["paybacks_raw"]
    }
    return TaskOutcome(
        task_id=d["task_id"],
        announce_time=d["announce_time"],
        skipped=d["skipped"],
        skip_reason=d["skip_reason"],
        discovered_truth=d["discovered_truth"],
        employees=tuple(d["employees"]),
        contributions={int(u): v for u, v in d["contributions"].items()},
        expected_contributions={
            int(u): v for u, v in d["expected_contributions"].items()
        },
        paybacks=paybacks,
        reputations_after={int(u): v for u, v in d["reputations_after"].items()},
    )


def result_to_dict(result: SimResult) -> dict[str, Any]:
    return {
        "format": RESULT_FORMAT,
        "label": result.label,
        "seed": result.seed,
        "config": result.config,
        "outcomes": [_outcome_to_dict(o) for o in result.outcomes],
        "final_reputations": {str(u): v for u, v in result.final_reputations.items()},
        "payback_totals": {str(u): v for u, v in result.payback_totals.items()},
        "task_counts": {str(u): v for u, v in result.task_counts.items()},
    }


def result_from_dict(d: dict[str, Any]) -> SimResult:
    if d.get("format") != RESULT_FORMAT:
        raise InvalidInputError(f"not a {RESULT_FORMAT} document")
    return SimResult(
        label=d["label"],
        seed=d["seed"],
        config=d["config"],
        outcomes=[_outcome_from_dict(o) for o in d["outcomes"]],
        final_reputations={int(u): v for u, v in d["final_reputations"].items()},
        payback_totals={int(u): v for u, v in d["payback_totals"].items()},
        task_counts={int(u): v for u, v in d["task_counts"].items()},
    )


def result_json(result: SimResult) -> str:
    """Canonical JSON text: identical runs serialize to identical bytes."""
    return json.dumps(result_to_dict(result), sort_keys=True, indent=2, allow_nan=False)


def save_result(result: SimResult, path: str | Path) -> None:
    Path(path).write_text(result_json(result) + "\n")


def load_result(path: str | Path) -> SimResult:
    return result_from_dict(json.loads(Path(path).read_text()))
