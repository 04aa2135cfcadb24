"""Static SVG plots of traces: trajectories, partitions, timelines, scaling.

Plots are emitted with xml.etree so the output is self-contained, dependency
free and diffable. All builders are read-only over the trace data.
"""
from __future__ import annotations

import math
import xml.etree.ElementTree as ET

import numpy as np

from .partition import partition
from .trajectory import QuinticTrajectory
from .world import ProbabilityMap

AGENT_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                "#8c564b", "#e377c2", "#17becf")
MARGIN = 40.0


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _svg_root(width: float, height: float) -> ET.Element:
    return ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                      width=f"{width:g}", height=f"{height:g}",
                      viewBox=f"0 0 {width:g} {height:g}")


def _axes(root: ET.Element, width: float, height: float, title: str) -> None:
    ET.SubElement(root, "rect", x="0", y="0", width=f"{width:g}",
                  height=f"{height:g}", fill="white")
    ET.SubElement(root, "rect", {"class": "axes", "x": _fmt(MARGIN),
                                 "y": _fmt(MARGIN),
                                 "width": _fmt(width - 2 * MARGIN),
                                 "height": _fmt(height - 2 * MARGIN),
                                 "fill": "none", "stroke": "black"})
    label = ET.SubElement(root, "text", x=_fmt(width / 2), y=_fmt(MARGIN / 2),
                          fill="black", style="font: 14px sans-serif",
                          attrib={"text-anchor": "middle"})
    label.text = title


class _WorldFrame:
    """Maps workspace meters to pixel coordinates (y flipped for SVG)."""

    def __init__(self, extent_x: float, extent_y: float, draw_size: float = 500.0):
        self.scale = draw_size / max(extent_x, extent_y)
        self.width = extent_x * self.scale + 2 * MARGIN
        self.height = extent_y * self.scale + 2 * MARGIN
        self.extent_y = extent_y

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        return (MARGIN + x * self.scale,
                MARGIN + (self.extent_y - y) * self.scale)


def _heat_color(v: float) -> str:
    # white (zero) to dark blue (peak)
    c = int(255 * (1.0 - 0.85 * min(max(v, 0.0), 1.0)))
    return f"rgb({c},{c},255)"


def _heat_field(root: ET.Element, values: np.ndarray, cell_size: float,
                frame: _WorldFrame) -> None:
    group = ET.SubElement(root, "g", {"class": "heat"})
    peak = values.max()
    if peak <= 0:
        return
    h, w = values.shape
    px_cell = cell_size * frame.scale
    for iy in range(h):
        for ix in range(w):
            v = values[iy, ix] / peak
            if v <= 0:
                continue
            x, y = frame.to_px(ix * cell_size, (iy + 1) * cell_size)
            ET.SubElement(group, "rect", x=_fmt(x), y=_fmt(y),
                          width=_fmt(px_cell), height=_fmt(px_cell),
                          fill=_heat_color(v))


def _polyline(group: ET.Element, pts_px, color: str, cls: str,
              width: float = 1.5) -> None:
    d = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts_px)
    ET.SubElement(group, "polyline", {"class": cls, "points": d, "fill": "none",
                                      "stroke": color, "stroke-width": f"{width:g}"})


def _trace_map(trace: dict) -> ProbabilityMap:
    return ProbabilityMap(np.array(trace["initial_values"]), float(trace["cell_size_m"]))


def _require(trace: dict, keys) -> None:
    missing = [k for k in keys if k not in trace]
    if missing:
        raise ValueError(f"trace is missing field(s): {missing}")


def trajectories_svg(trace: dict) -> ET.Element:
    """Per-agent flight paths over the initial probability heat field."""
    _require(trace, ("initial_values", "cell_size_m", "rounds", "n_agents"))
    prob_map = _trace_map(trace)
    frame = _WorldFrame(*prob_map.extent)
    root = _svg_root(frame.width, frame.height)
    _axes(root, frame.width, frame.height,
          f"trajectories ({trace.get('strategy', '?')}, n={trace['n_agents']})")
    _heat_field(root, prob_map.values, prob_map.cell_size, frame)

    n = int(trace["n_agents"])
    paths: list[list] = [[] for _ in range(n)]
    for rnd in trace["rounds"]:
        for i, tdict in enumerate(rnd["trajectories"]):
            if tdict is None:
                continue
            traj = QuinticTrajectory.from_dict(tdict)
            ts = np.linspace(0.0, traj.duration, 40)
            paths[i].extend(traj.sample(ts)[0].tolist())
    for i, pts in enumerate(paths):
        if not pts:
            continue
        color = AGENT_COLORS[i % len(AGENT_COLORS)]
        group = ET.SubElement(root, "g", {"class": "agent", "id": f"agent-{i}"})
        _polyline(group, [frame.to_px(x, y) for x, y in pts], color, "agent-path")
        sx, sy = frame.to_px(*pts[0])
        ET.SubElement(group, "circle", cx=_fmt(sx), cy=_fmt(sy), r="4", fill=color)

    for (tx, ty), hit in zip(trace.get("target_positions", []),
                             trace.get("targets_found", [])):
        x, y = frame.to_px(tx, ty)
        ET.SubElement(root, "circle", {"class": "target", "cx": _fmt(x),
                                       "cy": _fmt(y), "r": "3",
                                       "fill": "gold" if hit else "black",
                                       "stroke": "black"})
    return root


def partition_svg(trace: dict, round_index: int = -1) -> ET.Element:
    """Region labeling recomputed from the agent positions of one round."""
    _require(trace, ("initial_values", "cell_size_m", "rounds", "n_agents"))
    prob_map = _trace_map(trace)
    frame = _WorldFrame(*prob_map.extent)
    root = _svg_root(frame.width, frame.height)
    rounds = trace["rounds"]
    if not rounds:
        _axes(root, frame.width, frame.height, "partition (no rounds)")
        return root
    rnd = rounds[round_index]
    _axes(root, frame.width, frame.height,
          f"voronoi partition, round {round_index % len(rounds)}")
    positions = np.array(rnd["positions"])
    labeling = partition(positions, prob_map)
    group = ET.SubElement(root, "g", {"class": "partition"})
    px_cell = prob_map.cell_size * frame.scale
    for iy in range(prob_map.height_cells):
        for ix in range(prob_map.width_cells):
            color = AGENT_COLORS[int(labeling.labels[iy, ix]) % len(AGENT_COLORS)]
            x, y = frame.to_px(ix * prob_map.cell_size, (iy + 1) * prob_map.cell_size)
            ET.SubElement(group, "rect", {"x": _fmt(x), "y": _fmt(y),
                                          "width": _fmt(px_cell),
                                          "height": _fmt(px_cell),
                                          "fill": color, "fill-opacity": "0.35"})
    for i, (ax, ay) in enumerate(positions):
        x, y = frame.to_px(ax, ay)
        ET.SubElement(root, "circle", {"class": "agent-marker", "cx": _fmt(x),
                                       "cy": _fmt(y), "r": "5",
                                       "fill": AGENT_COLORS[i % len(AGENT_COLORS)],
                                       "stroke": "black"})
    return root


def _line_chart(series: list[tuple[str, str, list[tuple[float, float]]]],
                title: str, width: float = 640.0, height: float = 420.0) -> ET.Element:
    """Simple multi-series line chart; each series is (name, color, points)."""
    root = _svg_root(width, height)
    _axes(root, width, height, title)
    pts_all = [p for _, _, pts in series for p in pts]
    if not pts_all:
        return root
    xs = [p[0] for p in pts_all]
    ys = [p[1] for p in pts_all]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(0.0, min(ys)), max(ys)
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def to_px(x, y):
        return (MARGIN + (x - x_lo) / x_span * (width - 2 * MARGIN),
                height - MARGIN - (y - y_lo) / y_span * (height - 2 * MARGIN))

    for idx, (name, color, pts) in enumerate(series):
        group = ET.SubElement(root, "g", {"class": "series", "id": f"series-{name}"})
        _polyline(group, [to_px(x, y) for x, y in pts], color, "series-line", 2.0)
        for x, y in pts:
            px, py = to_px(x, y)
            ET.SubElement(group, "circle", {"class": "series-point", "cx": _fmt(px),
                                            "cy": _fmt(py), "r": "3", "fill": color})
        tag = ET.SubElement(root, "text", x=_fmt(width - MARGIN - 6),
                            y=_fmt(MARGIN + 16 + 16 * idx), fill=color,
                            style="font: 12px sans-serif",
                            attrib={"text-anchor": "end"})
        tag.text = name
    lo_lab = ET.SubElement(root, "text", x=_fmt(MARGIN), y=_fmt(height - MARGIN / 4),
                           fill="black", style="font: 11px sans-serif")
    lo_lab.text = f"x: {x_lo:g} .. {x_hi:g}   y: {y_lo:g} .. {y_hi:g}"
    return root


def timeline_svg(trace: dict) -> ET.Element:
    """Cumulative found targets versus simulated time."""
    _require(trace, ("found_timeline",))
    pts = [(float(t), float(c)) for t, c in trace["found_timeline"]]
    return _line_chart([("targets found", AGENT_COLORS[1], pts)],
                       "found targets vs time")


def scalability_svg(points: list[dict]) -> ET.Element:
    """Max path length and mean plan time versus team size.

    Expects one dict per team size with keys n_agents, max_path_m and
    mean_plan_time_s; plan times are rescaled onto the path-length axis so
    both trends share one chart.
    """
    if not points:
        raise ValueError("no scalability points supplied")
    pts = sorted(points, key=lambda r: r["n_agents"])
    path_pts = [(float(r["n_agents"]), float(r["max_path_m"])) for r in pts]
    t_peak = max(float(r["mean_plan_time_s"]) for r in pts) or 1.0
    y_peak = max(p[1] for p in path_pts) or 1.0
    time_pts = [(float(r["n_agents"]),
                 float(r["mean_plan_time_s"]) / t_peak * y_peak) for r in pts]
    return _line_chart(
        [("max path (m)", AGENT_COLORS[1], path_pts),
         (f"mean plan time (peak {t_peak * 1e3:.2f} ms, rescaled)",
          AGENT_COLORS[3], time_pts)],
        "scalability vs team size")


def save_svg(element: ET.Element, path) -> None:
    ET.ElementTree(element).write(path, encoding="unicode", xml_declaration=True)
