"""Quintic polynomial trajectories between agent states and stop goals.

Each axis is a fifth-order polynomial pinned by six boundary conditions:
start position / velocity / acceleration, and goal position with zero
terminal velocity and acceleration, so the agent stops at the goal. Energy
is the integral of squared acceleration, which is quadratic in the
coefficients and has a closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class InfeasibleTrajectoryError(RuntimeError):
    """No duration in the search ladder satisfied the kinodynamic limits."""


@dataclass
class KinoLimits:
    """Magnitude bounds on velocity and acceleration."""

    v_max: float = 2.0
    a_max: float = 2.0

    def __post_init__(self):
        if not (self.v_max > 0 and self.a_max > 0):
            raise ValueError("kinodynamic limits must be positive")


@dataclass
class AgentState:
    """Planar position, velocity and acceleration of one agent."""

    position: np.ndarray
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))
    acceleration: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64).reshape(2)
        self.velocity = np.asarray(self.velocity, dtype=np.float64).reshape(2)
        self.acceleration = np.asarray(self.acceleration, dtype=np.float64).reshape(2)


@dataclass
class QuinticTrajectory:
    """Per-axis quintic coefficients (constant term first) and duration."""

    coeffs_x: np.ndarray  # (6,)
    coeffs_y: np.ndarray  # (6,)
    duration: float

    def __post_init__(self):
        self.coeffs_x = np.asarray(self.coeffs_x, dtype=np.float64).reshape(6)
        self.coeffs_y = np.asarray(self.coeffs_y, dtype=np.float64).reshape(6)
        if not self.duration > 0:
            raise ValueError("duration must be positive")

    def sample(self, ts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Positions, velocities and accelerations at an array of times."""
        ts = np.asarray(ts, dtype=np.float64)
        out = []
        for c in (self.coeffs_x, self.coeffs_y):
            d1 = c[1:] * np.arange(1, 6)
            d2 = d1[1:] * np.arange(1, 5)
            out.append((np.polyval(c[::-1], ts), np.polyval(d1[::-1], ts),
                        np.polyval(d2[::-1], ts)))
        (px, vx, ax), (py, vy, ay) = out
        return (np.stack([px, py], axis=-1), np.stack([vx, vy], axis=-1),
                np.stack([ax, ay], axis=-1))

    def evaluate(self, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(position, velocity, acceleration) at one time in [0, duration]."""
        if not -1e-12 <= t <= self.duration + 1e-12:
            raise ValueError(f"t={t} outside [0, {self.duration}]")
        pos, vel, acc = self.sample(np.array([t]))
        return pos[0], vel[0], acc[0]

    def end_position(self) -> np.ndarray:
        return self.sample(np.array([self.duration]))[0][0]

    def energy(self) -> float:
        """Integral of squared acceleration magnitude, in closed form."""
        tau = self.duration
        k = np.arange(4)
        denom = k[:, None] + k[None, :] + 1
        tau_pow = tau ** denom
        total = 0.0
        for c in (self.coeffs_x, self.coeffs_y):
            a = np.array([2 * c[2], 6 * c[3], 12 * c[4], 20 * c[5]])
            total += float((np.outer(a, a) * tau_pow / denom).sum())
        return total

    def arc_length(self, n_samples: int = 1000) -> float:
        """Path length by trapezoid quadrature over n_samples intervals."""
        ts = np.linspace(0.0, self.duration, n_samples + 1)
        _, vel, _ = self.sample(ts)
        speed = np.hypot(vel[:, 0], vel[:, 1])
        dt = self.duration / n_samples
        return float((0.5 * (speed[:-1] + speed[1:])).sum() * dt)

    def to_dict(self) -> dict:
        return {"coeffs_x": self.coeffs_x.tolist(), "coeffs_y": self.coeffs_y.tolist(),
                "duration_s": self.duration}

    @classmethod
    def from_dict(cls, data: dict) -> "QuinticTrajectory":
        return cls(np.array(data["coeffs_x"]), np.array(data["coeffs_y"]),
                   float(data["duration_s"]))


def solve_quintic(start: AgentState, goal, duration: float) -> QuinticTrajectory:
    """Unique per-axis quintic matching the start state and stopping at goal.

    The first three coefficients come directly from the start boundary state;
    the remaining three solve a 3x3 linear system per axis.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    goal = np.asarray(goal, dtype=np.float64).reshape(2)
    inputs = np.concatenate([start.position, start.velocity, start.acceleration, goal])
    if not np.all(np.isfinite(inputs)) or not np.isfinite(duration):
        raise ValueError("boundary conditions must be finite")

    tau = duration
    a_mat = np.array([
        [tau ** 3, tau ** 4, tau ** 5],
        [3 * tau ** 2, 4 * tau ** 3, 5 * tau ** 4],
        [6 * tau, 12 * tau ** 2, 20 * tau ** 3],
    ])
    coeffs = []
    for axis in range(2):
        c0 = start.position[axis]
        c1 = start.velocity[axis]
        c2 = 0.5 * start.acceleration[axis]
        rhs = np.array([
            goal[axis] - (c0 + c1 * tau + c2 * tau ** 2),
            -(c1 + 2 * c2 * tau),
            -2 * c2,
        ])
        c345 = np.linalg.solve(a_mat, rhs)
        coeffs.append(np.array([c0, c1, c2, c345[0], c345[1], c345[2]]))
    return QuinticTrajectory(coeffs[0], coeffs[1], duration)


def generate_feasible(start: AgentState, goal, min_duration: float, limits: KinoLimits,
                      growth: float = 1.2, max_steps: int = 40,
                      n_check: int = 101) -> QuinticTrajectory:
    """Shortest duration on the ladder min_duration * growth**k whose quintic
    respects the limits at n_check uniform time samples."""
    if not min_duration > 0:
        raise ValueError("min_duration must be positive")
    for k in range(max_steps + 1):
        tau = min_duration * growth ** k
        traj = solve_quintic(start, goal, tau)
        ts = np.linspace(0.0, tau, n_check)
        _, vel, acc = traj.sample(ts)
        speed_ok = np.hypot(vel[:, 0], vel[:, 1]).max() <= limits.v_max + 1e-9
        acc_ok = np.hypot(acc[:, 0], acc[:, 1]).max() <= limits.a_max + 1e-9
        if speed_ok and acc_ok:
            return traj
    raise InfeasibleTrajectoryError(
        f"no feasible duration within {max_steps} ladder steps from {min_duration}")
