"""Benchmark front-end: seeded experiment batches, CSV summaries, SVG plots.

Experiment specs are JSON and validated strictly; a typo in a field name is an
error, not a silently ignored option. All randomness flows from the seeds in
the spec, and summary.csv is byte-identical across repeated runs of the same
spec. Wall-clock planning times are volatile by nature, so they land in a
separate timings.csv next to the summary.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .planner import PlannerParams
from .sim import SimConfig, run_batch
from .strategies import STRATEGY_NAMES, StrategyConfig
from .svgplot import (partition_svg, save_svg, scalability_svg, timeline_svg,
                      trajectories_svg)
from .trajectory import KinoLimits
from .world import ProbabilityMap, ScenarioParams, SensorModel

SUMMARY_COLUMNS = (
    "seed", "strategy", "n_agents", "use_voronoi", "success", "found_count",
    "total_targets", "rounds", "working_time_s", "path_length_max_m",
    "path_length_total_m", "path_lengths_m", "error",
)
TIMING_COLUMNS = ("seed", "strategy", "n_agents", "mean_plan_time_s")
PLOT_KINDS = ("trajectories", "partition", "timeline", "scalability")


class SpecError(ValueError):
    """Malformed experiment spec; the message names the offending field."""


def _check_fields(data: dict, allowed: set, required: set, where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise SpecError(f"unknown field(s) in {where}: {sorted(unknown)}")
    missing = required - set(data)
    if missing:
        raise SpecError(f"missing required field(s) in {where}: {sorted(missing)}")


def parse_experiment_spec(data: dict, base_dir: Path) -> dict:
    """Validate a spec dict and build the scenario params and sim configs."""
    allowed = {"scenario", "strategies", "n_agents", "seeds", "use_voronoi",
               "sensor_half_side_m", "limits", "planner", "local_radius_m",
               "radius_growth", "max_rounds"}
    required = {"scenario", "strategies", "seeds"}
    _check_fields(data, allowed, required, "experiment spec")

    scenario_field = data["scenario"]
    if isinstance(scenario_field, str):
        scenario = ScenarioParams.load(base_dir / scenario_field)
    elif isinstance(scenario_field, dict):
        filled = dict(scenario_field)
        filled.setdefault("seed", 0)  # per-row seeds drive generation anyway
        try:
            scenario = ScenarioParams.from_dict(filled)
        except ValueError as exc:
            raise SpecError(str(exc)) from exc
    else:
        raise SpecError("field 'scenario' must be a file path or an object")

    strategies = data["strategies"]
    if not isinstance(strategies, list) or not strategies:
        raise SpecError("field 'strategies' must be a non-empty list")
    for name in strategies:
        if name not in STRATEGY_NAMES:
            raise SpecError(f"unknown strategy {name!r}; valid names: "
                            f"{', '.join(STRATEGY_NAMES)}")

    seeds = data["seeds"]
    if not isinstance(seeds, list) or not seeds:
        raise SpecError("field 'seeds' must be a non-empty list")
    seeds = [int(s) for s in seeds]

    n_agents_list = data.get("n_agents", [1])
    if not isinstance(n_agents_list, list) or not n_agents_list:
        raise SpecError("field 'n_agents' must be a non-empty list")
    n_agents_list = [int(n) for n in n_agents_list]

    limits_data = data.get("limits", {})
    _check_fields(limits_data, {"v_max", "a_max"}, set(), "limits")
    limits = KinoLimits(**{k: float(v) for k, v in limits_data.items()})

    planner_data = data.get("planner", {})
    _check_fields(planner_data,
                  {"n_steps", "step_time", "n_rays", "n_actions", "discount"},
                  set(), "planner")
    planner = PlannerParams(limits=limits, **{
        k: (float(v) if k in ("step_time", "discount") else int(v))
        for k, v in planner_data.items()})

    sensor = SensorModel(float(data.get("sensor_half_side_m", 2.5)))
    local_radius = float(data.get("local_radius_m", 10.0))
    radius_growth = float(data.get("radius_growth", 2.0))
    max_rounds = int(data.get("max_rounds", 5000))
    use_voronoi = bool(data.get("use_voronoi", True))

    configs = []
    for n in n_agents_list:
        for name in strategies:
            configs.append(SimConfig(
                strategy=StrategyConfig(name, local_radius, radius_growth),
                n_agents=n, planner=planner, sensor=sensor, limits=limits,
                max_rounds=max_rounds, use_voronoi=use_voronoi))
    return {"scenario": scenario, "seeds": seeds, "configs": configs}


def _summary_row(row: dict) -> dict:
    base = {
        "seed": row["seed"],
        "strategy": row["strategy"],
        "n_agents": row["n_agents"],
        "use_voronoi": row["use_voronoi"],
        "error": row["error"] or "",
    }
    metrics = row["metrics"]
    if metrics is None:
        base.update({k: "" for k in SUMMARY_COLUMNS if k not in base})
        return base
    base.update({
        "success": metrics.success,
        "found_count": metrics.found_count,
        "total_targets": metrics.total_targets,
        "rounds": metrics.rounds_executed,
        "working_time_s": repr(metrics.working_time),
        "path_length_max_m": repr(float(metrics.path_lengths.max())),
        "path_length_total_m": repr(float(metrics.path_lengths.sum())),
        "path_lengths_m": ";".join(repr(float(p)) for p in metrics.path_lengths),
    })
    return base


def write_summary_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(_summary_row(row))


def write_timings_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=TIMING_COLUMNS)
        writer.writeheader()
        for row in rows:
            metrics = row["metrics"]
            writer.writerow({
                "seed": row["seed"],
                "strategy": row["strategy"],
                "n_agents": row["n_agents"],
                "mean_plan_time_s": repr(metrics.mean_plan_time()) if metrics else "",
            })


def cmd_run(args) -> int:
    spec_path = Path(args.spec)
    try:
        with open(spec_path, encoding="utf-8") as fh:
            data = json.load(fh)
        parsed = parse_experiment_spec(data, spec_path.parent)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    traces_dir = out_dir / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    rows = run_batch(parsed["scenario"], parsed["seeds"], parsed["configs"],
                     jobs=args.jobs, with_traces=True)
    write_summary_csv(rows, out_dir / "summary.csv")
    write_timings_csv(rows, out_dir / "timings.csv")
    failures = 0
    for row in rows:
        if row["error"]:
            failures += 1
            print(f"warning: run seed={row['seed']} strategy={row['strategy']} "
                  f"n={row['n_agents']} failed: {row['error']}", file=sys.stderr)
            continue
        name = f"run_s{row['seed']}_{row['strategy']}_n{row['n_agents']}.json"
        with open(traces_dir / name, "w", encoding="utf-8") as fh:
            json.dump(row["trace"], fh)
    print(f"wrote {out_dir / 'summary.csv'} ({len(rows)} rows, "
          f"{failures} failed)")
    return 0


def _scalability_points(summary_path: Path) -> list[dict]:
    timings_path = summary_path.parent / "timings.csv"
    with open(summary_path, newline="", encoding="utf-8") as fh:
        summary = [r for r in csv.DictReader(fh) if not r["error"]]
    timing_by_key = {}
    if timings_path.exists():
        with open(timings_path, newline="", encoding="utf-8") as fh:
            for r in csv.DictReader(fh):
                if r["mean_plan_time_s"]:
                    timing_by_key[(r["seed"], r["strategy"], r["n_agents"])] = \
                        float(r["mean_plan_time_s"])
    by_n: dict[int, dict] = {}
    for r in summary:
        n = int(r["n_agents"])
        key = (r["seed"], r["strategy"], r["n_agents"])
        entry = by_n.setdefault(n, {"n_agents": n, "paths": [], "times": []})
        entry["paths"].append(float(r["path_length_max_m"]))
        if key in timing_by_key:
            entry["times"].append(timing_by_key[key])
    points = []
    for n, entry in sorted(by_n.items()):
        points.append({
            "n_agents": n,
            "max_path_m": sum(entry["paths"]) / len(entry["paths"]),
            "mean_plan_time_s": (sum(entry["times"]) / len(entry["times"])
                                 if entry["times"] else 0.0),
        })
    return points


def cmd_plot(args) -> int:
    trace_path = Path(args.trace)
    try:
        if args.kind == "scalability":
            # expects the summary.csv of a batch run over several team sizes
            points = _scalability_points(trace_path)
            element = scalability_svg(points)
        else:
            with open(trace_path, encoding="utf-8") as fh:
                trace = json.load(fh)
            if args.kind == "trajectories":
                element = trajectories_svg(trace)
            elif args.kind == "partition":
                element = partition_svg(trace, args.round)
            else:
                element = timeline_svg(trace)
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    save_svg(element, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_gen_scenario(args) -> int:
    from .world import RateParams

    params = ScenarioParams(
        seed=args.seed, width_cells=args.width, height_cells=args.height,
        cell_size_m=args.cell_size, n_targets=args.targets,
        rate_params=RateParams(args.rate_a, args.rate_b, args.e_star))
    try:
        prob_map, _targets, _scen = params.build()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    params.save(args.out)
    print(f"wrote {args.out}")
    if args.map_csv:
        prob_map.to_csv(args.map_csv)
        print(f"wrote {args.map_csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmsearch",
        description="multi-agent active search benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment spec")
    p_run.add_argument("--spec", required=True, help="experiment spec JSON file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel worker processes (default 1)")
    p_run.set_defaults(func=cmd_run)

    p_plot = sub.add_parser("plot", help="render a trace or summary to SVG")
    p_plot.add_argument("--trace", required=True,
                        help="trace JSON (or summary.csv for kind=scalability)")
    p_plot.add_argument("--kind", required=True, choices=PLOT_KINDS)
    p_plot.add_argument("--out", required=True, help="output SVG file")
    p_plot.add_argument("--round", type=int, default=-1,
                        help="round index for kind=partition (default last)")
    p_plot.set_defaults(func=cmd_plot)

    p_gen = sub.add_parser("gen-scenario", help="write a scenario JSON file")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--width", type=int, default=100, help="cells (default 100)")
    p_gen.add_argument("--height", type=int, default=100, help="cells (default 100)")
    p_gen.add_argument("--cell-size", type=float, default=1.0,
                       help="meters per cell (default 1.0)")
    p_gen.add_argument("--targets", type=int, default=20)
    p_gen.add_argument("--rate-a", type=float, default=0.0)
    p_gen.add_argument("--rate-b", type=float, default=3.0)
    p_gen.add_argument("--e-star", type=float, default=0.5)
    p_gen.add_argument("--map-csv", default=None,
                       help="also export the generated prior grid as CSV")
    p_gen.set_defaults(func=cmd_gen_scenario)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
