"""credsense: a credibility-driven mobile crowdsensing simulator.

Recruits sensing employees by reputation, discovers the sensing truth from
conflicting reports, settles paybacks against expected contributions, and
measures how cheating reporters affect accuracy and their own welfare.
"""

from .adversary import CheatPolicy, decide_cheat, make_report, select_targets
from .core import (
    IncentiveParams,
    InvalidInputError,
    InvalidValueError,
    PaybackAmount,
    clamp_reputation,
    quality_risk,
    update_reputation,
)
from .engine import (
    ScenarioConfig,
    ScheduleSpec,
    SimResult,
    TaskOutcome,
    TaskSpec,
    TraceSpec,
    build_schedule,
    load_result,
    run_scenario,
    run_task,
    save_result,
)
from .recruitment import Application, RecruitmentResult, TaskAbortedError, recruit
from .report import DisturbanceSummary, MetricSeries, cdf, dt_disturbance, tvf
from .settlement import Settlement, settle, total_reward
from .trace import TraceSet, load_trace, query_window, synth_trace, write_trace
from .truth import (
    Observation,
    TruthNotConverged,
    TruthResult,
    discover,
    kernel_backend,
    population_std,
)

__version__ = "0.1.0"

__all__ = [
    "Application",
    "CheatPolicy",
    "DisturbanceSummary",
    "IncentiveParams",
    "InvalidInputError",
    "InvalidValueError",
    "MetricSeries",
    "Observation",
    "PaybackAmount",
    "RecruitmentResult",
    "ScenarioConfig",
    "ScheduleSpec",
    "Settlement",
    "SimResult",
    "TaskAbortedError",
    "TaskOutcome",
    "TaskSpec",
    "TraceSet",
    "TraceSpec",
    "TruthNotConverged",
    "TruthResult",
    "build_schedule",
    "cdf",
    "clamp_reputation",
    "decide_cheat",
    "discover",
    "dt_disturbance",
    "kernel_backend",
    "load_result",
    "load_trace",
    "make_report",
    "population_std",
    "quality_risk",
    "query_window",
    "recruit",
    "run_scenario",
    "run_task",
    "save_result",
    "select_targets",
    "settle",
    "synth_trace",
    "total_reward",
    "tvf",
    "update_reputation",
    "write_trace",
]
