"""Multi-agent active target search on probabilistic grid maps.

Voronoi-partitioned responsibility regions, ray-fan information gain with
finite-horizon lookahead planning, kinodynamically feasible quintic
trajectories, the classic comparison strategies, and a seeded benchmark
harness with CSV and SVG outputs.
"""
from .world import (ProbabilityMap, TargetSet, SensorModel, RateParams,
                    ElevationScenario, ScenarioParams, generate_scenario,
                    sensed_cells, update_found, deplete)
from .rays import RayFan, supercover_line, cast_ray, compute_fan, top_directions
from .trajectory import (AgentState, KinoLimits, QuinticTrajectory,
                         InfeasibleTrajectoryError, solve_quintic, generate_feasible)
from .planner import (PlannerParams, LookaheadPlan, terminal_velocity,
                      step_simulate, action_reward, plan_lookahead)
from .partition import VoronoiLabeling, partition, global_maxima
from .strategies import STRATEGY_NAMES, StrategyConfig, next_goal, zigzag_waypoints
from .sim import SimConfig, RunMetrics, run, run_traced, run_batch

__version__ = "0.1.0"

__all__ = [
    "ProbabilityMap", "TargetSet", "SensorModel", "RateParams",
    "ElevationScenario", "ScenarioParams", "generate_scenario", "sensed_cells",
    "update_found", "deplete",
    "RayFan", "supercover_line", "cast_ray", "compute_fan", "top_directions",
    "AgentState", "KinoLimits", "QuinticTrajectory", "InfeasibleTrajectoryError",
    "solve_quintic", "generate_feasible",
    "PlannerParams", "LookaheadPlan", "terminal_velocity", "step_simulate",
    "action_reward", "plan_lookahead",
    "VoronoiLabeling", "partition", "global_maxima",
    "STRATEGY_NAMES", "StrategyConfig", "next_goal", "zigzag_waypoints",
    "SimConfig", "RunMetrics", "run", "run_traced", "run_batch",
    "__version__",
]
