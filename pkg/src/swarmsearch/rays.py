"""Angular ray fans and normalized per-ray information gain.

A ray is traversed with a supercover rule: every grid cell whose closed square
the segment touches is enumerated, in order along the ray. Rays run from the
agent to the map border, or stop at the first cell assigned to another agent
when a region labeling is supplied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(**_kwargs):
        def deco(fn):
            return fn
        return deco

# Tolerance for "point sits on a gridline" in cell units; both adjacent cells
# are counted as touched. The test oracle uses the same tolerance.
_BOUNDARY_TOL = 1e-9
_NO_LABELS = np.zeros((1, 1), dtype=np.int64)


@njit(cache=True)
def _supercover_kernel(x0, y0, x1, y1, cell_size, width, height):
    """Ordered cells touched by the closed segment, clipped to the grid.

    Walks the segment's gridline-crossing parameters; every crossing point,
    endpoint, and interval midpoint contributes the cells containing it, so
    corner-touching cells are included like the geometric definition demands.
    """
    u0 = x0 / cell_size
    v0 = y0 / cell_size
    u1 = x1 / cell_size
    v1 = y1 / cell_size
    du = u1 - u0
    dv = v1 - v0

    cap = int(abs(du)) + int(abs(dv)) + 8
    ts = np.empty(cap, np.float64)
    n = 0
    ts[n] = 0.0
    n += 1
    ts[n] = 1.0
    n += 1
    if du != 0.0:
        lo = int(math.ceil(min(u0, u1)))
        hi = int(math.floor(max(u0, u1)))
        for i in range(lo, hi + 1):
            t = (i - u0) / du
            if 0.0 < t < 1.0:
                ts[n] = t
                n += 1
    if dv != 0.0:
        lo = int(math.ceil(min(v0, v1)))
        hi = int(math.floor(max(v0, v1)))
        for i in range(lo, hi + 1):
            t = (i - v0) / dv
            if 0.0 < t < 1.0:
                ts[n] = t
                n += 1

    srt = np.sort(ts[:n])
    evts = np.empty(n, np.float64)
    n_e = 0
    for k in range(n):
        if n_e == 0 or srt[k] - evts[n_e - 1] > 1e-12:
            evts[n_e] = srt[k]
            n_e += 1

    out_ix = np.empty(8 * n_e, np.int64)
    out_iy = np.empty(8 * n_e, np.int64)
    m = 0
    n_pts = 2 * n_e - 1
    for k in range(n_pts):
        if k % 2 == 0:
            t = evts[k // 2]
        else:
            t = 0.5 * (evts[(k - 1) // 2] + evts[(k + 1) // 2])
        pu = u0 + t * du
        pv = v0 + t * dv

        ku = round(pu)
        if abs(pu - ku) < _BOUNDARY_TOL:
            cx_lo = int(ku) - 1
            cx_hi = int(ku)
        else:
            cx_lo = int(math.floor(pu))
            cx_hi = cx_lo
        kv = round(pv)
        if abs(pv - kv) < _BOUNDARY_TOL:
            cy_lo = int(kv) - 1
            cy_hi = int(kv)
        else:
            cy_lo = int(math.floor(pv))
            cy_hi = cy_lo

        for cy in (cy_lo, cy_hi):
            for cx in (cx_lo, cx_hi):
                if cx < 0 or cx >= width or cy < 0 or cy >= height:
                    continue
                # a cell reappears only within a few neighboring points, so a
                # short backward window is enough to deduplicate
                dup = False
                j = m - 1
                stop = m - 32
                while j >= 0 and j > stop:
                    if out_ix[j] == cx and out_iy[j] == cy:
                        dup = True
                        break
                    j -= 1
                if not dup:
                    out_ix[m] = cx
                    out_iy[m] = cy
                    m += 1
    return out_ix[:m], out_iy[:m]


@njit(cache=True)
def _border_exit(x0, y0, dx, dy, ext_x, ext_y):
    t = 1e300
    if dx > 1e-15:
        t = min(t, (ext_x - x0) / dx)
    elif dx < -1e-15:
        t = min(t, -x0 / dx)
    if dy > 1e-15:
        t = min(t, (ext_y - y0) / dy)
    elif dy < -1e-15:
        t = min(t, -y0 / dy)
    if t >= 1e300:
        t = 0.0
    return max(t, 0.0)


@njit(cache=True)
def _cast_ray_kernel(x0, y0, angle, values, labels, agent, use_mask, cell_size):
    height, width = values.shape
    dx = math.cos(angle)
    dy = math.sin(angle)
    t = _border_exit(x0, y0, dx, dy, width * cell_size, height * cell_size)
    ix, iy = _supercover_kernel(x0, y0, x0 + t * dx, y0 + t * dy,
                                cell_size, width, height)
    keep = ix.shape[0]
    raw = 0.0
    for j in range(ix.shape[0]):
        if use_mask and labels[iy[j], ix[j]] != agent:
            keep = j
            break
        raw += values[iy[j], ix[j]]
    return ix[:keep], iy[:keep], raw


@njit(cache=True)
def _ray_sum(x0, y0, x1, y1, cell_size, values, labels, agent, use_mask,
             ts_buf, stamp, epoch):
    """Value sum along one segment, same event walk as _supercover_kernel but
    without materializing the cell list; stops at the first foreign cell.

    `stamp` is an epoch grid shared across the rays of one fan: a cell counts
    once per ray because touching it writes the current epoch."""
    u0 = x0 / cell_size
    v0 = y0 / cell_size
    u1 = x1 / cell_size
    v1 = y1 / cell_size
    du = u1 - u0
    dv = v1 - v0
    height, width = values.shape

    n = 0
    ts_buf[n] = 0.0
    n += 1
    ts_buf[n] = 1.0
    n += 1
    if du != 0.0:
        lo = int(math.ceil(min(u0, u1)))
        hi = int(math.floor(max(u0, u1)))
        for i in range(lo, hi + 1):
            t = (i - u0) / du
            if 0.0 < t < 1.0:
                ts_buf[n] = t
                n += 1
    if dv != 0.0:
        lo = int(math.ceil(min(v0, v1)))
        hi = int(math.floor(max(v0, v1)))
        for i in range(lo, hi + 1):
            t = (i - v0) / dv
            if 0.0 < t < 1.0:
                ts_buf[n] = t
                n += 1
    srt = ts_buf[:n]
    srt.sort()
    n_e = 0
    for k in range(n):
        if n_e == 0 or srt[k] - srt[n_e - 1] > 1e-12:
            srt[n_e] = srt[k]
            n_e += 1

    total = 0.0
    n_pts = 2 * n_e - 1
    for k in range(n_pts):
        if k % 2 == 0:
            t = srt[k // 2]
        else:
            t = 0.5 * (srt[(k - 1) // 2] + srt[(k + 1) // 2])
        pu = u0 + t * du
        pv = v0 + t * dv
        ku = round(pu)
        if abs(pu - ku) < _BOUNDARY_TOL:
            cx_lo = int(ku) - 1
            cx_hi = int(ku)
        else:
            cx_lo = int(math.floor(pu))
            cx_hi = cx_lo
        kv = round(pv)
        if abs(pv - kv) < _BOUNDARY_TOL:
            cy_lo = int(kv) - 1
            cy_hi = int(kv)
        else:
            cy_lo = int(math.floor(pv))
            cy_hi = cy_lo
        for cy in (cy_lo, cy_hi):
            for cx in (cx_lo, cx_hi):
                if cx < 0 or cx >= width or cy < 0 or cy >= height:
                    continue
                if stamp[cy, cx] == epoch:
                    continue
                if use_mask and labels[cy, cx] != agent:
                    return total
                stamp[cy, cx] = epoch
                total += values[cy, cx]
    return total


@njit(cache=True)
def _fan_sums_kernel(x0, y0, angles, values, labels, agent, use_mask, cell_size):
    height, width = values.shape
    sums = np.empty(angles.shape[0])
    ts_buf = np.empty(width + height + 8, np.float64)
    stamp = np.zeros((height, width), np.int32)
    ext_x = width * cell_size
    ext_y = height * cell_size
    for j in range(angles.shape[0]):
        dx = math.cos(angles[j])
        dy = math.sin(angles[j])
        t = _border_exit(x0, y0, dx, dy, ext_x, ext_y)
        sums[j] = _ray_sum(x0, y0, x0 + t * dx, y0 + t * dy, cell_size, values,
                           labels, agent, use_mask, ts_buf, stamp, j + 1)
    return sums


@dataclass
class RayFan:
    """Uniform fan of rays with raw sums and normalized gains per ray."""

    origin: np.ndarray  # (2,)
    angles: np.ndarray  # (n,) radians, strictly increasing over [0, 2*pi)
    raw_sums: np.ndarray  # (n,) nonnegative map-value sums along each ray
    gains: np.ndarray  # (n,) normalized; all zeros when no mass is visible

    @property
    def n_rays(self) -> int:
        return int(self.angles.shape[0])


def _labels_array(labeling) -> np.ndarray:
    arr = getattr(labeling, "labels", labeling)
    return np.ascontiguousarray(arr, dtype=np.int64)


def supercover_line(p0, p1, prob_map) -> np.ndarray:
    """Ordered (ix, iy) cells touched by the segment p0 -> p1, clipped to the map."""
    ix, iy = _supercover_kernel(float(p0[0]), float(p0[1]), float(p1[0]), float(p1[1]),
                                prob_map.cell_size, prob_map.width_cells,
                                prob_map.height_cells)
    return np.column_stack([ix, iy])


def cast_ray(origin, angle, prob_map, labeling=None, agent: int | None = None,
             ) -> tuple[np.ndarray, float]:
    """Cells traversed by the ray from origin at the given angle, and the sum
    of map values over them.

    With a labeling, traversal stops right before the first cell assigned to
    a different agent; without one, the ray runs to the map border.
    """
    if not prob_map.contains(origin):
        raise ValueError(f"ray origin {tuple(origin)} outside workspace")
    if labeling is not None:
        labels = _labels_array(labeling)
        use_mask = True
        agent_idx = int(agent)
    else:
        labels = _NO_LABELS
        use_mask = False
        agent_idx = 0
    values = np.ascontiguousarray(prob_map.values)
    ix, iy, raw = _cast_ray_kernel(float(origin[0]), float(origin[1]), float(angle),
                                   values, labels, agent_idx, use_mask,
                                   prob_map.cell_size)
    return np.column_stack([ix, iy]), float(raw)


def compute_fan(origin, n_rays: int, prob_map, labeling=None,
                agent: int | None = None) -> RayFan:
    """Cast a uniform fan of n_rays rays and normalize their sums into gains.

    Gains sum to one whenever any ray sees positive mass; otherwise the fan is
    all zeros, which downstream code reads as "no local information".
    """
    if n_rays < 2:
        raise ValueError("a fan needs at least 2 rays")
    if not prob_map.contains(origin):
        raise ValueError(f"fan origin {tuple(origin)} outside workspace")
    if labeling is not None:
        labels = _labels_array(labeling)
        use_mask = True
        agent_idx = int(agent)
    else:
        labels = _NO_LABELS
        use_mask = False
        agent_idx = 0
    values = np.ascontiguousarray(prob_map.values)
    ox, oy = float(origin[0]), float(origin[1])
    angles = 2.0 * math.pi * np.arange(n_rays) / n_rays
    raw = _fan_sums_kernel(ox, oy, angles, values, labels, agent_idx, use_mask,
                           prob_map.cell_size)
    total = raw.sum()
    gains = raw / total if total > 0.0 else np.zeros(n_rays)
    return RayFan(np.array([ox, oy]), angles, raw, gains)


def top_directions(fan: RayFan, n_a: int) -> np.ndarray:
    """Angles of the n_a highest-gain rays, ties going to the smaller angle.

    Empty when every gain is zero.
    """
    if not 1 <= n_a <= fan.n_rays:
        raise ValueError(f"n_a must be in [1, {fan.n_rays}]")
    if not np.any(fan.gains > 0.0):
        return np.empty(0)
    order = np.lexsort((np.arange(fan.n_rays), -fan.gains))
    return fan.angles[order[:n_a]]
