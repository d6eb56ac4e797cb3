"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Scenario-level criteria (5-7) run the full pipeline on a fixed synthetic
trace: 366 users over a 24-hour horizon with 288 fixed-interval tasks,
sparse possession (mean sampling gap 6000 s), whole-degree sensor readings,
and a truth-discovery convergence cap of 4 passes; seed 3 throughout.
"""

import math
import statistics as st
import time

import numpy as np
import pytest

from credsense import engine as eng
from credsense.adversary import CheatPolicy, select_targets
from credsense.core import IncentiveParams, quality_risk
from credsense.recruitment import Application, payoff, recruit, stationary_contribution
from credsense.report import dt_disturbance
from credsense.settlement import payback_amount, settle, total_reward
from credsense.trace import TraceSample, TraceSet
from credsense.truth import Observation, discover
from td_oracle import reference_discover

SEED = 3
N_INSTANCES = 1000

ACCEPTANCE_TRACE = eng.TraceSpec(
    users=366, mean_interval_s=6000, noise_sigma=0.0, resolution=1.0
)
ACCEPTANCE_SCHEDULE = eng.ScheduleSpec(interval_s=300)


def scenario(label, cheat, seed=SEED):
    return eng.ScenarioConfig(
        label=label,
        seed=seed,
        horizon_s=86_400,
        params=IncentiveParams(),
        trace=ACCEPTANCE_TRACE,
        schedule=ACCEPTANCE_SCHEDULE,
        cheat=cheat,
        td_max_iterations=4,
    )


def report_line(name, ok):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")
    assert ok


def random_instances(rng, count):
    for _ in range(count):
        m = int(rng.integers(2, 51))
        reps = rng.uniform(0.05, 0.95, m)
        yield [Application(i, float(r)) for i, r in enumerate(reps)]


@pytest.fixture(scope="module")
def scenario_runs():
    runs = {}
    durations = {}
    labels = [("baseline", CheatPolicy.honest())] + [
        (f"intensity-{p}", CheatPolicy.general(p)) for p in (0.10, 0.15, 0.20)
    ]
    for label, cheat in labels:
        t0 = time.perf_counter()
        runs[label] = eng.run_scenario(scenario(label, cheat))
        durations[label] = time.perf_counter() - t0
    runs["durations"] = durations
    return runs


def population_means(result):
    users = sorted(result.final_reputations)
    return (
        st.mean(result.final_reputations[u] for u in users),
        st.mean(result.payback_totals[u] for u in users),
        st.mean(result.task_counts[u] for u in users),
    )


def test_criterion_1_recruitment_correctness():
    rng = np.random.default_rng(101)
    grid = np.arange(0.0, 1.0 + 5e-4, 1e-3)
    started = time.perf_counter()
    ok = True
    for apps in random_instances(rng, N_INSTANCES):
        result = recruit(apps)
        cbar = result.expected_contribution
        total = sum(cbar.values())
        ok &= abs(total - 1.0) <= 1e-9
        reps = {a.user: a.reputation for a in apps}
        c = np.array([cbar[u] for u in result.employees])
        k = np.array([quality_risk(reps[u]) for u in result.employees])
        ok &= bool((c > 0.0).all())
        gbar = np.array([result.expected_payback[u] for u in result.employees])
        ok &= bool((gbar > 0.0).all())
        # grid-search the payoff maximizer per employee, others fixed
        others = total - c
        values = grid[None, :] / (grid[None, :] + others[:, None]) * result.total_reward
        values -= k[:, None] * grid[None, :]
        best = grid[np.argmax(values, axis=1)]
        ok &= bool((np.abs(c - best) <= 1e-3 + 1e-12).all())
        if not ok:
            break
    elapsed = time.perf_counter() - started
    ok &= elapsed < 10.0
    report_line(f"criterion-1 recruitment correctness ({elapsed:.1f}s)", ok)


def test_criterion_2_propositions():
    rng = np.random.default_rng(202)
    grid = np.arange(0.0, 1.0 + 5e-4, 1e-3)
    violations = 0
    for apps in random_instances(rng, N_INSTANCES):
        result = recruit(apps)
        cbar = result.expected_contribution
        total = sum(cbar.values())
        reps = {a.user: a.reputation for a in apps}
        # (a) rejected applicants cannot profit from joining
        for a in apps:
            if a.user in cbar:
                continue
            c_star = stationary_contribution(a.reputation, result.total_reward, total)
            if c_star > 0.0:
                g = payoff(c_star, total, result.total_reward, a.reputation)
                if g > 1e-12:
                    violations += 1
        # (b) contributing as expected maximizes the settled payback
        c = np.array([cbar[u] for u in result.employees])
        k = np.array([quality_risk(reps[u]) for u in result.employees])
        at_exp = (c / total) * result.total_reward - k * c
        dishonest = (grid[None, :] / total) * result.total_reward - k[:, None] * grid[None, :]
        g_grid = np.where(grid[None, :] >= c[:, None], at_exp[:, None], dishonest)
        if (g_grid > at_exp[:, None] + 1e-12).any():
            violations += 1
    # the vectorized grid matches settle's own payback arithmetic
    spot_rng = np.random.default_rng(303)
    for _ in range(200):
        r = float(spot_rng.uniform(0.05, 0.95))
        c_exp = float(spot_rng.uniform(0.01, 1.0))
        c_act = float(spot_rng.uniform(0.0, 1.0))
        reward = float(spot_rng.uniform(0.1, 5.0))
        expect = (
            (c_exp / 1.0) * reward - quality_risk(r) * c_exp
            if c_act >= c_exp
            else (c_act / 1.0) * reward - quality_risk(r) * c_act
        )
        got = payback_amount(c_act, c_exp, 1.0, reward, r)
        if abs(got - expect) > 1e-12:
            violations += 1
    report_line(f"criterion-2 propositions 1-2 ({violations} violations)", violations == 0)


def test_criterion_3_truth_discovery():
    rng = np.random.default_rng(404)
    ok = True
    compared = 0
    for _ in range(N_INSTANCES):
        n = int(rng.integers(2, 7))
        values = [float(v) for v in rng.uniform(0.0, 30.0, n)]
        reps = {u: float(r) for u, r in enumerate(rng.uniform(0.05, 0.95, n))}
        obs = [Observation(u, v) for u, v in enumerate(values)]
        result = discover(obs, reps, epsilon=1e-9, max_iterations=2000)
        truth, contribs, _, conv = reference_discover(
            values, [reps[u] for u in range(n)], 1e-9, 2000
        )
        ok &= conv
        ok &= abs(result.truth - truth) <= 1e-6
        ok &= all(
            abs(result.contributions[u] - contribs[u]) <= 1e-6 for u in range(n)
        )
        ok &= min(values) <= result.truth <= max(values)
        ok &= all(c >= 0.0 for c in result.contributions.values())
        # log-base invariance
        base10 = discover(obs, reps, epsilon=1e-9, max_iterations=2000, log_base=10.0)
        ok &= abs(base10.truth - result.truth) <= 1e-9
        ok &= all(
            abs(base10.contributions[u] - result.contributions[u]) <= 1e-9
            for u in range(n)
        )
        compared += 1
        if not ok:
            break
    report_line(f"criterion-3 truth discovery oracle ({compared} instances)", ok)


def test_criterion_4_concavity():
    rng = np.random.default_rng(505)
    h = 1e-4
    violations = 0
    for _ in range(10_000):
        reward = float(rng.uniform(0.1, 5.0))
        others = float(rng.uniform(0.05, 5.0))
        rep = float(rng.uniform(0.05, 0.95))
        c = float(rng.uniform(h, 2.0))
        second = (
            payoff(c + h, others, reward, rep)
            - 2.0 * payoff(c, others, reward, rep)
            + payoff(c - h, others, reward, rep)
        )
        if not second < 0.0:
            violations += 1
    report_line(f"criterion-4 concavity ({violations} sign violations)", violations == 0)


def test_criterion_5_general_intensity(scenario_runs):
    base = scenario_runs["baseline"]
    means = [population_means(base)]
    disturbances = []
    for p in (0.10, 0.15, 0.20):
        variant = scenario_runs[f"intensity-{p}"]
        means.append(population_means(variant))
        disturbances.append(dt_disturbance(base, variant).mean_dt_disturbance_pct)
    slowest = max(scenario_runs["durations"].values())
    dt_ok = all(d < 5.0 for d in disturbances)
    below_ok = all(means[i][j] < means[0][j] for i in (1, 2, 3) for j in range(3))
    mono_violations = [
        sum(1 for i in (1, 2) if not means[i + 1][j] < means[i][j]) for j in range(3)
    ]
    mono_ok = all(v <= 1 for v in mono_violations)
    ok = dt_ok and below_ok and mono_ok and slowest < 60.0
    report_line(
        "criterion-5 general intensity "
        f"(dt {', '.join(f'{d:.2f}%' for d in disturbances)}; "
        f"monotone violations {mono_violations}; slowest scenario {slowest:.1f}s)",
        ok,
    )


def test_criterion_6_targeted_cheaters(scenario_runs):
    base = scenario_runs["baseline"]
    ok = True
    details = []
    for selector in ("topr", "topp", "topc"):
        target = select_targets(selector, base)[0]
        for p in (1.0, 0.5):
            variant = eng.run_scenario(
                scenario(f"{selector}-p{p}", CheatPolicy.targeted(p, targets=(target,)))
            )
            summary = dt_disturbance(base, variant)
            rep_delta = (
                variant.final_reputations[target] - base.final_reputations[target]
            ) / base.final_reputations[target]
            pb_base = base.payback_totals[target]
            pb_delta = (
                (variant.payback_totals[target] - pb_base) / pb_base if pb_base else 0.0
            )
            if p == 1.0:
                this_ok = (
                    rep_delta <= -0.40
                    and pb_delta <= -0.40
                    and variant.task_counts[target] < base.task_counts[target]
                    and summary.mean_dt_disturbance_pct < 2.0
                )
            else:
                this_ok = rep_delta < 0.0 and pb_delta < 0.0
            ok &= this_ok
            details.append(f"{selector}@{p}:{'ok' if this_ok else 'BAD'}")
    report_line(f"criterion-6 targeted cheaters ({' '.join(details)})", ok)


def test_criterion_7_determinism(scenario_runs):
    config = scenario("intensity-0.15", CheatPolicy.general(0.15))
    replay = eng.run_scenario(config)
    original = scenario_runs["intensity-0.15"]
    bytes_equal = eng.result_json(replay) == eng.result_json(original)
    base_replay = eng.run_scenario(scenario("baseline", CheatPolicy.honest()))
    bytes_equal &= eng.result_json(base_replay) == eng.result_json(
        scenario_runs["baseline"]
    )
    report_line("criterion-7 determinism (byte-for-byte)", bytes_equal)


def test_criterion_8_degenerate_inputs():
    ok = True

    # all-equal observations short-circuit uniformly
    result = discover([Observation(u, 17.0) for u in range(4)], {u: 0.5 for u in range(4)})
    ok &= result.truth == 17.0 and result.iterations == 0 and result.converged
    ok &= all(c == pytest.approx(0.25) for c in result.contributions.values())

    # two-applicant task settles end to end
    trace = TraceSet(
        [TraceSample(0, 100, 14.0), TraceSample(1, 120, 14.0), TraceSample(2, 5000, 9.0)],
        horizon=7200,
    )
    reps = {0: 0.5, 1: 0.5, 2: 0.5}
    outcome = eng.run_task(
        eng.TaskSpec(0, 100), reps, trace, CheatPolicy.honest(), IncentiveParams(), seed=1
    )
    ok &= not outcome.skipped and set(outcome.employees) == {0, 1}
    ok &= outcome.discovered_truth == 14.0

    # zero-applicant task skips cleanly
    skipped = eng.run_task(
        eng.TaskSpec(1, 3000), reps, trace, CheatPolicy.honest(), IncentiveParams(), seed=1
    )
    ok &= skipped.skipped and skipped.employees == ()

    # reputations at the clamp bounds stay finite through the whole pipeline
    result = recruit([Application(0, 0.99), Application(1, 0.01)])
    ok &= all(v > 0.0 and math.isfinite(v) for v in result.expected_contribution.values())
    ok &= all(math.isfinite(v) for v in result.expected_payback.values())
    settled = settle(
        dict(result.expected_contribution),
        result.expected_contribution,
        {0: 0.99, 1: 0.01},
        result.total_reward,
        IncentiveParams(),
    )
    ok &= all(
        math.isfinite(p.raw) and math.isfinite(p.normalized)
        for p in settled.paybacks.values()
    )
    ok &= all(0.01 <= r <= 0.99 for r in settled.new_reputations.values())

    # zero actual contribution pays nothing and halves reputation (alpha=0.5)
    zero = settle(
        {0: 0.0, 1: 1.0},
        {0: 0.5, 1: 0.5},
        {0: 0.8, 1: 0.8},
        total_reward([0.8, 0.8]),
        IncentiveParams(),
    )
    ok &= zero.paybacks[0].raw == 0.0
    ok &= zero.new_reputations[0] == pytest.approx(0.4)

    report_line("criterion-8 degenerate inputs", ok)
