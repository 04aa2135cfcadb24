"""Workspace grid, probabilistic prior, targets, sensor footprint and map depletion.

Coordinate conventions used throughout the package:

- The workspace is the rectangle [0, W*cell_size] x [0, H*cell_size] in meters.
- Cell (ix, iy) covers [ix*cs, (ix+1)*cs) x [iy*cs, (iy+1)*cs); its center is
  ((ix + 0.5)*cs, (iy + 0.5)*cs).
- Grid arrays are stored row-major as values[iy, ix].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

_EPS = 1e-12


@dataclass
class ProbabilityMap:
    """Nonnegative occurrence-rate grid over the workspace.

    The prior starts as a normalized rate field and is progressively zeroed
    (depleted) under the sensor footprint of executed sweeps.
    """

    values: np.ndarray  # (height, width), row-major, all >= 0
    cell_size: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] < 1 or self.values.shape[1] < 1:
            raise ValueError("values must be a 2-D grid with at least one cell")
        if not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ValueError("map values must be finite and nonnegative")

    @property
    def height_cells(self) -> int:
        return self.values.shape[0]

    @property
    def width_cells(self) -> int:
        return self.values.shape[1]

    @property
    def extent(self) -> tuple[float, float]:
        """Workspace upper corner (x_max, y_max) in meters."""
        return (self.width_cells * self.cell_size, self.height_cells * self.cell_size)

    def total_mass(self) -> float:
        return float(self.values.sum())

    def contains(self, point) -> bool:
        x, y = float(point[0]), float(point[1])
        ex, ey = self.extent
        return 0.0 <= x <= ex and 0.0 <= y <= ey

    def cell_of(self, point) -> tuple[int, int]:
        """Cell (ix, iy) containing a workspace point; border points clip inward."""
        ix = min(int(point[0] / self.cell_size), self.width_cells - 1)
        iy = min(int(point[1] / self.cell_size), self.height_cells - 1)
        return max(ix, 0), max(iy, 0)

    def cell_center(self, ix: int, iy: int) -> np.ndarray:
        return np.array([(ix + 0.5) * self.cell_size, (iy + 0.5) * self.cell_size])

    def cell_centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Center coordinates as broadcastable (xs (W,), ys (H,)) arrays."""
        xs = (np.arange(self.width_cells) + 0.5) * self.cell_size
        ys = (np.arange(self.height_cells) + 0.5) * self.cell_size
        return xs, ys

    def copy(self) -> "ProbabilityMap":
        return ProbabilityMap(self.values.copy(), self.cell_size)

    def to_csv(self, path) -> None:
        """Write the grid row-major, one row per line, for external inspection."""
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")


@dataclass
class TargetSet:
    """Target positions with monotone found flags (a target is found once)."""

    positions: np.ndarray  # (n, 2) meters
    found: np.ndarray  # (n,) bool

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 2)
        self.found = np.asarray(self.found, dtype=bool).reshape(-1)
        if self.found.shape[0] != self.positions.shape[0]:
            raise ValueError("found flags must match the number of targets")

    @classmethod
    def unfound(cls, positions) -> "TargetSet":
        positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        return cls(positions, np.zeros(len(positions), dtype=bool))

    @property
    def total_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def found_count(self) -> int:
        return int(self.found.sum())

    def all_found(self) -> bool:
        return bool(self.found.all())


@dataclass
class SensorModel:
    """Square downward sensor footprint; side length is 2 * half_side meters."""

    half_side: float

    def __post_init__(self):
        if not self.half_side > 0:
            raise ValueError("half_side must be positive")


# Rates below this fraction of the peak are treated as zero: cells far from
# the preferred elevation band hold no targets, and a prior with true
# zero-support regions is what lets searches terminate and local strategies
# get stuck at all.
RATE_FLOOR_RATIO = 0.02


@dataclass
class RateParams:
    """Elevation-to-occurrence-rate mapping: rate(e) = exp(a - b*|e - e_star|).

    Occurrence concentrates in a band around the preferred elevation e_star;
    b controls how sharply the rate decays away from the band.
    """

    a: float = 0.0
    b: float = 3.0
    e_star: float = 0.5


@dataclass
class ElevationScenario:
    """Synthetic elevation field plus the parameters that produced it."""

    elevation: np.ndarray  # (height, width) meters
    rng_seed: int
    target_count: int
    rate_params: RateParams


def synth_elevation(rng: np.random.Generator, width_cells: int, height_cells: int,
                    cell_size: float) -> np.ndarray:
    """Smooth seeded elevation: a sum of 4 to 8 random cosine plane waves."""
    xs = (np.arange(width_cells) + 0.5) * cell_size
    ys = (np.arange(height_cells) + 0.5) * cell_size
    gx, gy = np.meshgrid(xs, ys)
    span = max(width_cells, height_cells) * cell_size
    elevation = np.zeros((height_cells, width_cells))
    n_waves = int(rng.integers(4, 9))
    for _ in range(n_waves):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        freq = rng.uniform(0.5, 2.0)
        amp = rng.uniform(0.3, 1.0)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        proj = math.cos(theta) * gx + math.sin(theta) * gy
        elevation += amp * np.cos(2.0 * math.pi * freq * proj / span + phase)
    return elevation


def occurrence_rates(elevation: np.ndarray, params: RateParams) -> np.ndarray:
    rates = np.exp(params.a - params.b * np.abs(elevation - params.e_star))
    rates[rates < RATE_FLOOR_RATIO * rates.max()] = 0.0
    return rates


def prior_from_elevation(elevation: np.ndarray, params: RateParams,
                         cell_size: float) -> ProbabilityMap:
    """Normalized occurrence-rate field (the coarse prior guiding the search)."""
    rates = occurrence_rates(np.asarray(elevation, dtype=np.float64), params)
    return ProbabilityMap(rates / rates.sum(), cell_size)


def sample_target_positions(rates: np.ndarray, cell_size: float, n_targets: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Draw target cells without replacement proportionally to the rate field,
    then place each target uniformly inside its cell."""
    rates = np.asarray(rates, dtype=np.float64)
    height, width = rates.shape
    if n_targets > rates.size:
        raise ValueError(
            f"cannot place {n_targets} targets in {rates.size} cells without replacement")
    p = (rates / rates.sum()).ravel()
    flat = rng.choice(rates.size, size=n_targets, replace=False, p=p)
    iy, ix = np.divmod(flat, width)
    offsets = rng.random((n_targets, 2))
    return np.column_stack([(ix + offsets[:, 0]) * cell_size,
                            (iy + offsets[:, 1]) * cell_size])


def generate_scenario(seed: int, width_cells: int, height_cells: int, cell_size: float,
                      n_targets: int, rate_params: RateParams | None = None,
                      ) -> tuple[ProbabilityMap, TargetSet, ElevationScenario]:
    """Build a seeded scenario: elevation, normalized prior, and target placement.

    Identical arguments produce bit-identical output.
    """
    if n_targets < 1:
        raise ValueError("n_targets must be at least 1")
    if width_cells < 1 or height_cells < 1 or not cell_size > 0:
        raise ValueError("grid dimensions must be positive")
    if n_targets > width_cells * height_cells:
        raise ValueError(
            f"cannot place {n_targets} targets in {width_cells * height_cells} cells")
    params = rate_params if rate_params is not None else RateParams()
    rng = np.random.default_rng(seed)
    elevation = synth_elevation(rng, width_cells, height_cells, cell_size)
    prob_map = prior_from_elevation(elevation, params, cell_size)
    rates = occurrence_rates(elevation, params)
    positions = sample_target_positions(rates, cell_size, n_targets, rng)
    targets = TargetSet.unfound(positions)
    scenario = ElevationScenario(elevation, int(seed), int(n_targets), params)
    return prob_map, targets, scenario


def _footprint_slices(position, half_side: float, prob_map: ProbabilityMap,
                      ) -> tuple[int, int, int, int]:
    """Inclusive-exclusive (x0, x1, y0, y1) index ranges of cells whose centers
    lie in the closed sensor square around position."""
    cs = prob_map.cell_size
    px, py = float(position[0]), float(position[1])
    x0 = int(math.ceil((px - half_side) / cs - 0.5 - _EPS))
    x1 = int(math.floor((px + half_side) / cs - 0.5 + _EPS)) + 1
    y0 = int(math.ceil((py - half_side) / cs - 0.5 - _EPS))
    y1 = int(math.floor((py + half_side) / cs - 0.5 + _EPS)) + 1
    return (max(x0, 0), min(x1, prob_map.width_cells),
            max(y0, 0), min(y1, prob_map.height_cells))


def sensed_cells(position, sensor: SensorModel, prob_map: ProbabilityMap) -> np.ndarray:
    """Cells whose centers fall inside the sensor square at position, clipped
    to the map. Returns an (n, 2) array of (ix, iy) index pairs."""
    if not prob_map.contains(position):
        raise ValueError(f"position {tuple(position)} outside workspace")
    x0, x1, y0, y1 = _footprint_slices(position, sensor.half_side, prob_map)
    ixs, iys = np.meshgrid(np.arange(x0, x1), np.arange(y0, y1))
    return np.column_stack([ixs.ravel(), iys.ravel()])


def update_found(targets: TargetSet, swept_positions, sensor: SensorModel) -> TargetSet:
    """Mark targets covered by any swept sensor square as found.

    Flags never revert; already-found targets stay found.
    """
    swept = np.asarray(swept_positions, dtype=np.float64).reshape(-1, 2)
    found = targets.found.copy()
    if swept.size and not found.all():
        # (samples, targets) Chebyshev distances; boundary contact counts as covered
        dx = np.abs(swept[:, None, 0] - targets.positions[None, :, 0])
        dy = np.abs(swept[:, None, 1] - targets.positions[None, :, 1])
        hit = (np.maximum(dx, dy) <= sensor.half_side + _EPS).any(axis=0)
        found |= hit
    return TargetSet(targets.positions, found)


def deplete(prob_map: ProbabilityMap, swept_positions, sensor: SensorModel) -> ProbabilityMap:
    """Zero every cell sensed from any swept position; all other cells keep
    their value. Returns a new map, the input is left untouched."""
    swept = np.asarray(swept_positions, dtype=np.float64).reshape(-1, 2)
    out = prob_map.values.copy()
    for pos in swept:
        x0, x1, y0, y1 = _footprint_slices(pos, sensor.half_side, prob_map)
        out[y0:y1, x0:x1] = 0.0
    return ProbabilityMap(out, prob_map.cell_size)


@dataclass
class ScenarioParams:
    """Generation parameters for a scenario, matching the scenario JSON schema."""

    seed: int
    width_cells: int
    height_cells: int
    cell_size_m: float
    n_targets: int
    rate_params: RateParams = field(default_factory=RateParams)

    def build(self) -> tuple[ProbabilityMap, TargetSet, ElevationScenario]:
        return generate_scenario(self.seed, self.width_cells, self.height_cells,
                                 self.cell_size_m, self.n_targets, self.rate_params)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "width_cells": self.width_cells,
            "height_cells": self.height_cells,
            "cell_size_m": self.cell_size_m,
            "n_targets": self.n_targets,
            "rate_params": {"a": self.rate_params.a, "b": self.rate_params.b,
                            "e_star": self.rate_params.e_star},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioParams":
        required = {"seed", "width_cells", "height_cells", "cell_size_m", "n_targets"}
        allowed = required | {"rate_params"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown scenario field(s): {sorted(unknown)}")
        missing = required - set(data)
        if missing:
            raise ValueError(f"missing scenario field(s): {sorted(missing)}")
        rp = data.get("rate_params", {})
        unknown_rp = set(rp) - {"a", "b", "e_star"}
        if unknown_rp:
            raise ValueError(f"unknown rate_params field(s): {sorted(unknown_rp)}")
        params = RateParams(**{k: float(v) for k, v in rp.items()})
        return cls(int(data["seed"]), int(data["width_cells"]), int(data["height_cells"]),
                   float(data["cell_size_m"]), int(data["n_targets"]), params)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ScenarioParams":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
