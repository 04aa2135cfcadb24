"""Finite-horizon lookahead planning over ray-fan actions.

The planner grows an action tree: at every node the candidate actions are the
highest-gain ray directions, motion is uniformly accelerated toward the
terminal velocity of the chosen direction, and the reward of a move is the
map mass newly traversed by it. The best discounted root-to-leaf sequence is
found by exhaustive depth-first search; cells already credited along a branch
earn nothing again, which kills degenerate back-and-forth sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rays
from .trajectory import AgentState, KinoLimits
from .world import ProbabilityMap


@dataclass
class PlannerParams:
    """Lookahead depth, step interval, fan resolution and branching factor."""

    n_steps: int = 5
    step_time: float = 1.0
    n_rays: int = 36
    n_actions: int = 3
    discount: float = 0.95
    limits: KinoLimits = field(default_factory=KinoLimits)

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if not self.step_time > 0:
            raise ValueError("step_time must be positive")
        if not 1 <= self.n_actions <= self.n_rays:
            raise ValueError("n_actions must lie in [1, n_rays]")
        if not 0 < self.discount <= 1:
            raise ValueError("discount must lie in (0, 1]")


@dataclass
class LookaheadPlan:
    """Chosen action sequence with the simulated states it induces."""

    waypoints: np.ndarray  # (k+1, 2), starting at the planning-time position
    velocities: np.ndarray  # (k+1, 2)
    actions: np.ndarray  # (k,) chosen angles
    total_reward: float

    @property
    def terminal(self) -> np.ndarray:
        return self.waypoints[-1]


def terminal_velocity(angle: float, v_max: float) -> np.ndarray:
    """Velocity of magnitude v_max pointing along angle."""
    return np.array([v_max * math.cos(angle), v_max * math.sin(angle)])


def step_simulate(position, velocity, angle: float, params: PlannerParams,
                  extent) -> tuple[np.ndarray, np.ndarray]:
    """One uniformly accelerated step toward the terminal velocity of angle.

    The new position is clamped into the workspace rectangle so border-crossing
    actions stay usable.
    """
    position = np.asarray(position, dtype=np.float64)
    velocity = np.asarray(velocity, dtype=np.float64)
    v_new = terminal_velocity(angle, params.limits.v_max)
    p_new = position + params.step_time * (velocity + v_new) / 2.0
    p_new = np.clip(p_new, 0.0, np.asarray(extent, dtype=np.float64))
    return p_new, v_new


def action_reward(position, position_new, prob_map: ProbabilityMap,
                  visited: set[int]) -> float:
    """Map mass over the cells newly traversed by the move.

    Cells already in `visited` earn nothing; traversed cells are added to it.
    """
    cells = rays.supercover_line(position, position_new, prob_map)
    width = prob_map.width_cells
    values = prob_map.values
    reward = 0.0
    for ix, iy in cells:
        key = int(iy) * width + int(ix)
        if key not in visited:
            visited.add(key)
            reward += values[iy, ix]
    return float(reward)


def plan_lookahead(state: AgentState, prob_map: ProbabilityMap, params: PlannerParams,
                   labeling=None, agent: int | None = None) -> LookaheadPlan | None:
    """Best discounted action sequence over the depth-n_steps tree, or None.

    None means "no local information": either every root ray sees zero mass or
    no sequence earns positive reward. Branches whose fan goes all-zero stop
    early with no further value. The candidate set is prefix closed and value
    ties resolve to the lexicographically smallest action-angle sequence (a
    prefix precedes its extensions), so a sequence never keeps trailing
    zero-reward actions: the plan ends at its last rewarding step. The search
    visits candidates in ascending angle order, considers each node before its
    children and only accepts strict improvements, which realizes exactly that
    ordering.
    """
    root_fan = rays.compute_fan(state.position, params.n_rays, prob_map, labeling, agent)
    if not np.any(root_fan.gains > 0.0):
        return None

    if labeling is not None:
        # rewards credit only the agent's own region
        mask = rays._labels_array(labeling) == int(agent)
        reward_map = ProbabilityMap(np.where(mask, prob_map.values, 0.0),
                                    prob_map.cell_size)
    else:
        reward_map = prob_map
    extent = prob_map.extent

    best_value = 0.0
    best: tuple[list, list, list] | None = None

    def descend(pos, vel, depth, visited, actions, waypoints, velocities, value):
        nonlocal best_value, best
        if value > best_value:
            best_value = value
            best = (list(actions), list(waypoints), list(velocities))
        if depth == params.n_steps:
            return
        fan = root_fan if depth == 0 else rays.compute_fan(
            pos, params.n_rays, prob_map, labeling, agent)
        candidates = rays.top_directions(fan, params.n_actions)
        for angle in np.sort(candidates):
            p_new, v_new = step_simulate(pos, vel, angle, params, extent)
            branch_visited = set(visited)
            reward = action_reward(pos, p_new, reward_map, branch_visited)
            descend(p_new, v_new, depth + 1, branch_visited,
                    actions + [float(angle)], waypoints + [p_new],
                    velocities + [v_new], value + params.discount ** depth * reward)

    descend(state.position, state.velocity, 0, set(), [], [state.position],
            [state.velocity], 0.0)

    if best is None:
        return None
    actions, waypoints, velocities = best
    return LookaheadPlan(np.asarray(waypoints), np.asarray(velocities),
                         np.asarray(actions), best_value)
