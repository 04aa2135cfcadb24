"""Goal-selection strategies: serpentine coverage, map maxima and lookahead.

All strategies answer the same question each planning round: given the current
map and the agent's responsibility region, where should this agent fly next?
They return (goal, stuck) where goal is None once the region holds no more
reachable mass. Progress needs no hidden state; a depleted map records what
has already been swept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import planner as planner_mod
from .partition import global_maxima
from .trajectory import AgentState
from .world import ProbabilityMap, SensorModel

STRATEGY_NAMES = ("zigzag", "gm", "lm", "hlm", "proposed")


@dataclass
class StrategyConfig:
    """Strategy selector plus the local-search parameters used by lm/hlm."""

    name: str
    local_radius: float = 10.0
    radius_growth: float = 2.0

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise ValueError(
                f"unknown strategy {self.name!r}; valid names: {', '.join(STRATEGY_NAMES)}")
        if not self.local_radius > 0:
            raise ValueError("local_radius must be positive")
        if not self.radius_growth > 1:
            raise ValueError("radius_growth must exceed 1")


def _region_values(prob_map: ProbabilityMap, labeling, agent: int) -> np.ndarray:
    if labeling is None:
        return prob_map.values
    return np.where(labeling.region_mask(agent), prob_map.values, 0.0)


def _center_distances(position, prob_map: ProbabilityMap) -> np.ndarray:
    xs, ys = prob_map.cell_centers()
    return np.hypot(xs[None, :] - position[0], ys[:, None] - position[1])


def _best_cell_within(position, radius: float, region_values: np.ndarray,
                      prob_map: ProbabilityMap) -> np.ndarray | None:
    """Highest-value positive cell center within radius, row-major on ties."""
    dist = _center_distances(position, prob_map)
    candidate = np.where(dist <= radius, region_values, 0.0)
    flat = int(np.argmax(candidate))
    if candidate.ravel()[flat] <= 0.0:
        return None
    iy, ix = divmod(flat, prob_map.width_cells)
    return prob_map.cell_center(ix, iy)


def zigzag_waypoints(prob_map: ProbabilityMap, sensor: SensorModel,
                     labeling=None, agent: int = 0) -> np.ndarray:
    """Serpentine lane endpoints covering the agent's region.

    Lanes run parallel to the x axis, spaced one sensor side apart and clipped
    to the region's cell extents per lane band; traversal alternates direction
    so consecutive lanes connect at the same side. Waypoints that land in a
    foreign cell (jagged region borders) snap to the nearest owned cell center.
    """
    region = (labeling.region_mask(agent) if labeling is not None
              else np.ones_like(prob_map.values, dtype=bool))
    if not region.any():
        raise ValueError("region is empty")
    cs = prob_map.cell_size
    side = 2.0 * sensor.half_side
    iys, ixs = np.nonzero(region)
    xs_c = (ixs + 0.5) * cs
    ys_c = (iys + 0.5) * cs
    y_lo = iys.min() * cs
    y_hi = (iys.max() + 1) * cs
    span = y_hi - y_lo
    n_lanes = max(int(math.ceil(span / side)), 1)

    points: list[tuple[float, float]] = []
    emitted = 0
    for k in range(n_lanes):
        lane_y = y_lo + (k + 0.5) * side
        lane_y = min(lane_y, y_hi - side / 2.0)
        if span < side:
            lane_y = 0.5 * (y_lo + y_hi)
        in_band = np.abs(ys_c - lane_y) <= side / 2.0 + 1e-9
        if not in_band.any():
            continue
        x_min = xs_c[in_band].min()
        x_max = xs_c[in_band].max()
        if emitted % 2 == 0:
            points.extend([(x_min, lane_y), (x_max, lane_y)])
        else:
            points.extend([(x_max, lane_y), (x_min, lane_y)])
        emitted += 1

    waypoints = np.array(points).reshape(-1, 2)
    if labeling is not None:
        for i, wp in enumerate(waypoints):
            ix, iy = prob_map.cell_of(wp)
            if not region[iy, ix]:
                d2 = (xs_c - wp[0]) ** 2 + (ys_c - wp[1]) ** 2
                j = int(np.argmin(d2))
                waypoints[i] = ((ixs[j] + 0.5) * cs, (iys[j] + 0.5) * cs)
    return waypoints


def _zigzag_goal(state: AgentState, prob_map: ProbabilityMap, sensor: SensorModel,
                 labeling, agent: int) -> np.ndarray | None:
    """Endpoint of the first serpentine lane whose swath still holds region mass.

    An agent already standing at the lane's entry is sent to its exit (it then
    sweeps the lane); otherwise it is sent to the entry first. Depletion of the
    swept swath is what advances the sweep, so no per-agent state is needed.
    """
    region_vals = _region_values(prob_map, labeling, agent)
    if not (region_vals > 0.0).any():
        return None
    waypoints = zigzag_waypoints(prob_map, sensor, labeling, agent)
    cs = prob_map.cell_size
    height, width = prob_map.values.shape
    hs = sensor.half_side
    for k in range(0, len(waypoints) - 1, 2):
        entry, exit_ = waypoints[k], waypoints[k + 1]
        # swath rectangle swept by flying the (axis-aligned) lane
        x0 = max(int(math.ceil((min(entry[0], exit_[0]) - hs) / cs - 0.5 - 1e-12)), 0)
        x1 = min(int(math.floor((max(entry[0], exit_[0]) + hs) / cs - 0.5 + 1e-12)) + 1,
                 width)
        y0 = max(int(math.ceil((min(entry[1], exit_[1]) - hs) / cs - 0.5 - 1e-12)), 0)
        y1 = min(int(math.floor((max(entry[1], exit_[1]) + hs) / cs - 0.5 + 1e-12)) + 1,
                 height)
        if region_vals[y0:y1, x0:x1].sum() > 0.0:
            if np.linalg.norm(state.position - entry) <= hs:
                return np.asarray(exit_)
            return np.asarray(entry)
    return None


def _hlm_goal(state: AgentState, cfg: StrategyConfig, region_vals: np.ndarray,
              prob_map: ProbabilityMap) -> tuple[np.ndarray | None, bool]:
    goal = _best_cell_within(state.position, cfg.local_radius, region_vals, prob_map)
    if goal is not None:
        return goal, False
    if not (region_vals > 0.0).any():
        return None, True
    radius = cfg.local_radius
    while True:
        radius *= cfg.radius_growth
        goal = _best_cell_within(state.position, radius, region_vals, prob_map)
        if goal is not None:
            return goal, True


def _nearest_region_point(point, labeling, agent: int,
                          prob_map: ProbabilityMap) -> np.ndarray:
    ix, iy = prob_map.cell_of(point)
    if labeling.region_mask(agent)[iy, ix]:
        return np.asarray(point, dtype=np.float64)
    iys, ixs = np.nonzero(labeling.region_mask(agent))
    cs = prob_map.cell_size
    d2 = ((ixs + 0.5) * cs - point[0]) ** 2 + ((iys + 0.5) * cs - point[1]) ** 2
    j = int(np.argmin(d2))
    return np.array([(ixs[j] + 0.5) * cs, (iys[j] + 0.5) * cs])


def next_goal(strategy: StrategyConfig, state: AgentState, prob_map: ProbabilityMap,
              sensor: SensorModel, labeling=None, agent: int = 0,
              planner_params=None) -> tuple[np.ndarray | None, bool]:
    """Next flight goal for one agent under the chosen strategy.

    Returns (goal, stuck). goal is None when the strategy sees nothing left to
    visit in the agent's region. stuck reports that the base local radius held
    no mass (lm gives up there; hlm grows the radius and recovers).
    """
    region_vals = _region_values(prob_map, labeling, agent)

    if strategy.name == "zigzag":
        return _zigzag_goal(state, prob_map, sensor, labeling, agent), False

    if strategy.name == "gm":
        return global_maxima(labeling, agent, prob_map), False

    if strategy.name == "lm":
        goal = _best_cell_within(state.position, strategy.local_radius,
                                 region_vals, prob_map)
        return goal, goal is None

    if strategy.name == "hlm":
        return _hlm_goal(state, strategy, region_vals, prob_map)

    # proposed: lookahead terminal when informative, else the region's maximum
    if planner_params is None:
        raise ValueError("the proposed strategy needs planner parameters")
    plan = planner_mod.plan_lookahead(state, prob_map, planner_params, labeling, agent)
    if plan is None:
        return global_maxima(labeling, agent, prob_map), False
    goal = plan.terminal
    if labeling is not None:
        goal = _nearest_region_point(goal, labeling, agent, prob_map)
    return goal, False
