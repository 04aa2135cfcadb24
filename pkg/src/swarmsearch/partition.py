"""Grid-based Voronoi partition of the workspace among agents."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .world import ProbabilityMap


@dataclass
class VoronoiLabeling:
    """Cell-to-agent assignment: labels[iy, ix] is the owning agent index."""

    labels: np.ndarray  # (height, width) int
    positions: np.ndarray  # (n_agents, 2) generator positions

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)

    @property
    def n_agents(self) -> int:
        return int(self.positions.shape[0])

    def region_mask(self, agent: int) -> np.ndarray:
        return self.labels == agent

    def to_csv(self, path) -> None:
        np.savetxt(path, self.labels, delimiter=",", fmt="%d")


def partition(positions, prob_map: ProbabilityMap) -> VoronoiLabeling:
    """Label every cell with the nearest agent (cell-center to agent distance).

    Distance ties go to the smaller agent index, so coincident agents are fine.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    if positions.shape[0] < 1:
        raise ValueError("at least one agent position is required")
    for p in positions:
        if not prob_map.contains(p):
            raise ValueError(f"agent position {tuple(p)} outside workspace")
    xs, ys = prob_map.cell_centers()
    d2 = ((xs[None, None, :] - positions[:, 0, None, None]) ** 2
          + (ys[None, :, None] - positions[:, 1, None, None]) ** 2)
    labels = np.argmin(d2, axis=0)  # argmin takes the first (smallest) index on ties
    return VoronoiLabeling(labels, positions)


def global_maxima(labeling: VoronoiLabeling | None, agent: int,
                  prob_map: ProbabilityMap) -> np.ndarray | None:
    """Center of the highest-value cell in the agent's region, or None when the
    region holds no positive value. Ties resolve in row-major order.

    A None labeling treats the whole map as the agent's region.
    """
    if labeling is None:
        masked = prob_map.values
    else:
        if not 0 <= agent < labeling.n_agents:
            raise ValueError(f"agent index {agent} out of range")
        masked = np.where(labeling.region_mask(agent), prob_map.values, 0.0)
    flat = int(np.argmax(masked))
    if masked.ravel()[flat] <= 0.0:
        return None
    iy, ix = divmod(flat, prob_map.width_cells)
    return prob_map.cell_center(ix, iy)
