"""Synchronous multi-agent search rounds: partition, plan, fly, discover, deplete.

Every round all agents plan against the same start-of-round snapshot, execute
their trajectories, and only then are target discovery and map depletion
applied from the union of all sweeps, so results do not depend on agent order.
Simulated time advances by the longest trajectory of the round; agents that
finish earlier idle at their goal.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .partition import partition
from .strategies import StrategyConfig, next_goal
from .planner import PlannerParams
from .trajectory import (AgentState, InfeasibleTrajectoryError, KinoLimits,
                         generate_feasible)
from .world import (ProbabilityMap, ScenarioParams, SensorModel, TargetSet,
                    deplete, update_found)


@dataclass
class SimConfig:
    """One run's knobs: team size, strategy, planner, sensor and limits."""

    strategy: StrategyConfig
    n_agents: int = 1
    planner: PlannerParams = field(default_factory=PlannerParams)
    sensor: SensorModel = field(default_factory=lambda: SensorModel(2.5))
    limits: KinoLimits = field(default_factory=KinoLimits)
    max_rounds: int = 5000
    use_voronoi: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_agents < 1:
            raise ValueError("n_agents must be at least 1")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass
class RunMetrics:
    """Outcome of one run."""

    path_lengths: np.ndarray  # (n_agents,) meters
    flight_times: np.ndarray  # (n_agents,) seconds actually flown
    working_time: float  # max flight time over agents
    found_timeline: list  # (sim_time, cumulative found) per round, non-decreasing
    path_timeline: list  # (sim_time, max path, total path) per round
    plan_times: list  # wall seconds of every per-agent goal selection
    rounds_executed: int
    success: bool
    found_count: int
    total_targets: int

    def mean_plan_time(self) -> float:
        return float(np.mean(self.plan_times)) if self.plan_times else 0.0


def _sweep_positions(traj, v_max: float, interval: float) -> np.ndarray:
    """Sample the trajectory densely enough that consecutive samples are at
    most `interval` meters apart (speed is bounded by v_max)."""
    n = max(int(np.ceil(traj.duration * v_max / interval)), 1)
    ts = np.linspace(0.0, traj.duration, n + 1)
    return traj.sample(ts)[0]


def run_traced(prob_map: ProbabilityMap, targets: TargetSet, config: SimConfig,
               ) -> tuple[RunMetrics, dict]:
    """Run one scenario and also return a replayable trace of the rounds."""
    n = config.n_agents
    rng = np.random.default_rng(config.rng_seed)
    extent = prob_map.extent
    positions = rng.uniform(low=(0.0, 0.0), high=extent, size=(n, 2))
    states = [AgentState(p) for p in positions]

    prob = prob_map.copy()
    targets = TargetSet(targets.positions.copy(), targets.found.copy())
    sweep_interval = min(prob.cell_size, config.sensor.half_side) / 2.0

    path = np.zeros(n)
    flight = np.zeros(n)
    sim_time = 0.0
    found_timeline = [(0.0, targets.found_count)]
    path_timeline = [(0.0, 0.0, 0.0)]
    plan_times: list[float] = []
    rounds = 0
    trace_rounds: list[dict] = []

    for round_idx in range(config.max_rounds):
        if targets.all_found() or prob.total_mass() <= 0.0:
            break
        labeling = (partition([s.position for s in states], prob)
                    if config.use_voronoi and n > 1 else None)

        trajs = [None] * n
        goals = [None] * n
        for i in range(n):
            t0 = time.perf_counter()
            goal, _stuck = next_goal(config.strategy, states[i], prob, config.sensor,
                                     labeling, i, config.planner)
            plan_times.append(time.perf_counter() - t0)
            if goal is None:
                continue
            goals[i] = goal
            dist = float(np.linalg.norm(goal - states[i].position))
            min_duration = max(dist / config.limits.v_max, 0.1)
            try:
                trajs[i] = generate_feasible(states[i], goal, min_duration, config.limits)
            except InfeasibleTrajectoryError as exc:
                raise InfeasibleTrajectoryError(
                    f"round {round_idx}, agent {i}: {exc}") from exc

        if all(t is None for t in trajs):
            break  # nobody sees anything left to visit

        mass_before = prob.total_mass()
        found_before = targets.found_count
        sweeps = []
        moved = 0.0
        for i, traj in enumerate(trajs):
            if traj is None:
                continue
            sweeps.append(_sweep_positions(traj, config.limits.v_max, sweep_interval))
            length = traj.arc_length()
            path[i] += length
            flight[i] += traj.duration
            moved = max(moved, length)
            # evaluating the polynomial at its end can drift a few ulp past the border
            states[i] = AgentState(np.clip(traj.end_position(), 0.0, extent))
        swept = np.vstack(sweeps)
        targets = update_found(targets, swept, config.sensor)
        prob = deplete(prob, swept, config.sensor)

        sim_time += max(t.duration for t in trajs if t is not None)
        rounds += 1
        found_timeline.append((sim_time, targets.found_count))
        path_timeline.append((sim_time, float(path.max()), float(path.sum())))
        trace_rounds.append({
            "positions": [s.position.tolist() for s in states],
            "goals": [None if g is None else list(map(float, g)) for g in goals],
            "trajectories": [None if t is None else t.to_dict() for t in trajs],
            "found_cumulative": targets.found_count,
            "sim_time_s": sim_time,
        })

        stalled = (moved < 1e-9 and prob.total_mass() == mass_before
                   and targets.found_count == found_before)
        if stalled:
            break

    metrics = RunMetrics(
        path_lengths=path,
        flight_times=flight,
        working_time=float(flight.max()),
        found_timeline=found_timeline,
        path_timeline=path_timeline,
        plan_times=plan_times,
        rounds_executed=rounds,
        success=targets.all_found(),
        found_count=targets.found_count,
        total_targets=targets.total_count,
    )
    trace = {
        "n_agents": n,
        "strategy": config.strategy.name,
        "use_voronoi": config.use_voronoi,
        "rng_seed": config.rng_seed,
        "width_cells": prob_map.width_cells,
        "height_cells": prob_map.height_cells,
        "cell_size_m": prob_map.cell_size,
        "initial_values": prob_map.values.tolist(),
        "target_positions": targets.positions.tolist(),
        "targets_found": targets.found.tolist(),
        "rounds": trace_rounds,
        "found_timeline": [[t, c] for t, c in found_timeline],
    }
    return metrics, trace


def run(prob_map: ProbabilityMap, targets: TargetSet, config: SimConfig) -> RunMetrics:
    """Run one scenario to completion and collect its metrics."""
    return run_traced(prob_map, targets, config)[0]


def _run_row(args) -> dict:
    scenario, seed, config, with_trace = args
    if isinstance(scenario, ScenarioParams):
        prob_map, targets, _ = replace(scenario, seed=seed).build()
    else:
        prob_map, targets = scenario
    cfg = replace(config, rng_seed=seed)
    row = {
        "seed": seed,
        "strategy": cfg.strategy.name,
        "n_agents": cfg.n_agents,
        "use_voronoi": cfg.use_voronoi,
        "error": None,
        "metrics": None,
        "trace": None,
    }
    try:
        metrics, trace = run_traced(prob_map, targets, cfg)
        row["metrics"] = metrics
        if with_trace:
            row["trace"] = trace
    except Exception as exc:  # noqa: BLE001 - failed rows are reported, not fatal
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_batch(scenario, seeds, configs, jobs: int = 1,
              with_traces: bool = False) -> list[dict]:
    """Cartesian product of seeds x configs, one independent run per row.

    `scenario` is either ScenarioParams (rebuilt per seed with that seed) or a
    fixed (ProbabilityMap, TargetSet) pair reused across rows. Failures are
    recorded in the row's `error` field; the batch always completes.
    """
    seeds = list(seeds)
    configs = list(configs)
    if not seeds or not configs:
        raise ValueError("need at least one seed and one config")
    tasks = [(scenario, seed, config, with_traces)
             for seed in seeds for config in configs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_row, tasks))
    return [_run_row(task) for task in tasks]
