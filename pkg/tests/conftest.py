from __future__ import annotations

import numpy as np
import pytest

from swarmsearch.world import ProbabilityMap


@pytest.fixture
def uniform_map():
    return ProbabilityMap(np.full((11, 11), 1.0 / 121.0), 1.0)


@pytest.fixture
def random_map():
    rng = np.random.default_rng(42)
    return ProbabilityMap(rng.random((20, 20)), 1.0)


# --- independent geometric oracle -----------------------------------------
# Segment versus closed cell square, built directly from the definition with
# a slab test. Boundary tolerance matches the traversal kernels so that both
# classify grazing contacts identically.

ORACLE_TOL = 1e-9


def segment_intersects_cell(p0, p1, ix, iy, cell_size) -> bool:
    t0, t1 = 0.0, 1.0
    for axis, lo_cell in ((0, ix), (1, iy)):
        a = p0[axis] / cell_size
        d = p1[axis] / cell_size - a
        lo = lo_cell - ORACLE_TOL
        hi = lo_cell + 1 + ORACLE_TOL
        if abs(d) < 1e-15:
            if a < lo or a > hi:
                return False
            continue
        ta = (lo - a) / d
        tb = (hi - a) / d
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


def brute_force_supercover(p0, p1, prob_map) -> set[tuple[int, int]]:
    cells = set()
    for iy in range(prob_map.height_cells):
        for ix in range(prob_map.width_cells):
            if segment_intersects_cell(p0, p1, ix, iy, prob_map.cell_size):
                cells.add((ix, iy))
    return cells


def ray_border_exit(origin, angle, prob_map):
    """Where the ray leaves the workspace rectangle."""
    ox, oy = origin
    dx, dy = np.cos(angle), np.sin(angle)
    ex, ey = prob_map.extent
    t = np.inf
    if dx > 1e-15:
        t = min(t, (ex - ox) / dx)
    elif dx < -1e-15:
        t = min(t, -ox / dx)
    if dy > 1e-15:
        t = min(t, (ey - oy) / dy)
    elif dy < -1e-15:
        t = min(t, -oy / dy)
    if not np.isfinite(t):
        t = 0.0
    return np.array([ox + t * dx, oy + t * dy])
