"""Command-line front end.

Subcommands:

  run         run one scenario from a YAML config, write the result JSON
  synth-trace generate a synthetic trace CSV
  report      compare a variant result against a baseline result
  sweep       run a baseline plus general-intensity variants of one config

Every command exits 0 on success; any failure prints a one-line diagnostic
to stderr and exits 1.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from . import engine, report
from .adversary import CheatPolicy, resolve_targets
from .trace import synth_trace, write_trace


def _load_config(path: Path, seed_override: int | None = None) -> engine.ScenarioConfig:
    raw = yaml.safe_load(path.read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"config {path} is not a mapping")
    baseline_path = None
    cheat = raw.get("cheat")
    if isinstance(cheat, dict) and "baseline_result" in cheat:
        cheat = dict(cheat)
        baseline_path = cheat.pop("baseline_result")
        raw = dict(raw)
        raw["cheat"] = cheat
    if seed_override is not None:
        raw = dict(raw)
        raw["seed"] = seed_override
    config = engine.ScenarioConfig.from_dict(raw)
    if config.cheat.kind == "targeted" and not config.cheat.targets:
        if baseline_path is None:
            raise ValueError(
                "targeted cheat policy needs explicit targets or a baseline_result path"
            )
        baseline = engine.load_result(_resolve(path, baseline_path))
        resolved = resolve_targets(config.cheat, baseline)
        raw = dict(raw)
        raw["cheat"] = _policy_dict(resolved)
        config = engine.ScenarioConfig.from_dict(raw)
    return config


def _policy_dict(policy: CheatPolicy) -> dict:
    return {
        "kind": policy.kind,
        "probability": policy.probability,
        "cheat_low": policy.cheat_low,
        "cheat_high": policy.cheat_high,
        "selector": policy.selector,
        "target_count": policy.target_count,
        "targets": list(policy.targets),
    }


def _resolve(config_path: Path, ref: str) -> Path:
    p = Path(ref)
    return p if p.is_absolute() else config_path.parent / p


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(Path(args.config), args.seed)
    result = engine.run_scenario(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{config.label}.result.json"
    engine.save_result(result, out_path)
    print(
        f"{config.label}: {len(result.outcomes)} tasks announced, "
        f"{result.skipped_count} skipped -> {out_path}"
    )
    return 0


def _cmd_synth_trace(args: argparse.Namespace) -> int:
    trace = synth_trace(
        users=args.users,
        horizon=args.horizon,
        mean_interval=args.mean_interval,
        seed=args.seed,
    )
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_trace(trace, out)
    print(f"{trace.sample_count()} samples for {len(trace.users)} users -> {out}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    baseline = engine.load_result(args.baseline)
    variant = engine.load_result(args.variant)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    series = report.result_cdfs(baseline) + report.result_cdfs(variant)
    for target in variant.config.get("cheat", {}).get("targets", []):
        for metric in ("REP", "PB", "TC"):
            for run in (baseline, variant):
                if target in run.final_reputations:
                    series.append(report.tvf(run, metric, target))
    report.write_series_csv(out_dir / "metrics.csv", series)

    summary = report.dt_disturbance(baseline, variant)
    report.write_disturbance(out_dir / "disturbance.txt", summary)
    print(report.format_disturbance(summary), end="")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    intensities = [float(x) for x in args.intensities.split(",") if x.strip()]
    if not intensities:
        raise ValueError("no intensities given")
    for p in intensities:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"intensity {p} outside [0, 1]")

    config = _load_config(Path(args.config))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    base_config = engine.ScenarioConfig.from_dict(
        {**config.to_dict(), "label": "baseline", "cheat": _policy_dict(CheatPolicy.honest())}
    )
    baseline = engine.run_scenario(base_config)
    engine.save_result(baseline, out_dir / "baseline.result.json")
    print(f"baseline: {len(baseline.outcomes)} tasks, {baseline.skipped_count} skipped")

    lines = []
    for p in intensities:
        label = f"intensity-{p:g}"
        variant_config = engine.ScenarioConfig.from_dict(
            {
                **config.to_dict(),
                "label": label,
                "cheat": _policy_dict(CheatPolicy.general(p)),
            }
        )
        variant = engine.run_scenario(variant_config)
        engine.save_result(variant, out_dir / f"{label}.result.json")
        summary = report.dt_disturbance(baseline, variant)
        report.write_disturbance(out_dir / f"{label}.disturbance.txt", summary)
        line = (
            f"{label}: dt {summary.mean_dt_disturbance_pct:.3f}% "
            f"({summary.mean_dt_disturbance_abs:.4f}), "
            f"rep {summary.mean_rep_delta_pct:+.3f}%, "
            f"pb {summary.mean_pb_delta_pct:+.3f}%, "
            f"tc {summary.mean_tc_delta_pct:+.3f}%"
        )
        lines.append(line)
        print(line)
    (out_dir / "sweep-summary.txt").write_text("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="credsense",
        description="Credibility-driven crowdsensing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario from a YAML config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_synth = sub.add_parser("synth-trace", help="generate a synthetic trace CSV")
    p_synth.add_argument("--users", type=int, default=366)
    p_synth.add_argument("--horizon", type=int, default=86_400)
    p_synth.add_argument("--mean-interval", type=int, default=300)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="output CSV path")
    p_synth.set_defaults(func=_cmd_synth_trace)

    p_report = sub.add_parser("report", help="compare a variant run against a baseline")
    p_report.add_argument("--baseline", required=True)
    p_report.add_argument("--variant", required=True)
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.set_defaults(func=_cmd_report)

    p_sweep = sub.add_parser("sweep", help="baseline plus general-intensity variants")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--intensities", default="0.10,0.15,0.20")
    p_sweep.add_argument("--out", default="sweep-out", help="output directory")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"credsense: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
