"""Phase diagrams: grid sweeps, level lines, machine-readable output.

A sweep evaluates the deficit optimizer at every cell center of a
(T, B) grid and records the winning branch, optimal angle, deficit and
profile shape.  Cells are independent, so the sweep can fan out to a
process pool; output ordering is fixed by (T row, B column) regardless
of worker count and numbers are serialized with 9 significant digits,
so identical configurations produce byte-identical files.
"""

from __future__ import annotations

import json
import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .boundaries import BoundaryCurve, TriplePoint
from .model import ModelParams, temperature_floor
from .optimizer import optimize_deficit

__all__ = [
    "GridSpec",
    "PhaseDiagram",
    "diagram_to_csv",
    "diagram_to_json",
    "contours_to_csv",
    "level_lines",
    "sweep",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular (T, B) grid; cells are evaluated at their centers."""

    t_min: float
    t_max: float
    b_min: float
    b_max: float
    n_t: int
    n_b: int

    def __post_init__(self) -> None:
        if self.n_t < 2 or self.n_b < 2:
            raise ValueError("grid needs at least 2 cells per axis")
        if not (self.t_max > self.t_min and self.b_max > self.b_min):
            raise ValueError("empty grid range")
        if self.t_min <= temperature_floor():
            raise ValueError("T range must lie above the temperature floor")

    def t_centers(self) -> np.ndarray:
        step = (self.t_max - self.t_min) / self.n_t
        return self.t_min + step * (np.arange(self.n_t) + 0.5)

    def b_centers(self) -> np.ndarray:
        step = (self.b_max - self.b_min) / self.n_b
        return self.b_min + step * (np.arange(self.n_b) + 0.5)


@dataclass
class PhaseDiagram:
    """Classified grid plus any attached boundary curves/triple points."""

    grid: GridSpec
    J: float
    Jz: float
    branch: list[list[str]]
    theta: np.ndarray
    deficit: np.ndarray
    shape_tags: list[list[str]]
    boundaries: list[BoundaryCurve] = field(default_factory=list)
    triple_points: list[TriplePoint] = field(default_factory=list)
    norm_unit: str = "J"
    norm_value: float = 1.0


def _cell(args) -> tuple[str, float, float, str]:
    j, jz, t, b, n = args
    res = optimize_deficit(ModelParams(j, jz, b, t), n)
    return res.branch.value, res.optimal_theta, res.deficit, res.shape_label


def sweep(
    J: float,
    Jz: float,
    grid: GridSpec,
    *,
    workers: int = 1,
    n_scan: int = 201,
    norm_unit: str = "J",
) -> PhaseDiagram:
    """Classify every cell of the grid.

    Cells are pure and independent; with workers > 1 they are mapped over
    a process pool.  Results are assembled in (row, column) order either
    way, so the outcome does not depend on the worker count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if norm_unit not in ("J", "Jz"):
        raise ValueError(f"norm_unit must be 'J' or 'Jz', got {norm_unit!r}")
    norm_value = abs(J) if norm_unit == "J" else abs(Jz)
    if norm_value <= 0.0:
        raise ValueError(f"cannot normalize on |{norm_unit}| = 0")

    ts = grid.t_centers()
    bs = grid.b_centers()
    tasks = [(J, Jz, float(t), float(b), n_scan) for t in ts for b in bs]
    if workers == 1:
        flat = [_cell(a) for a in tasks]
    else:
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, len(tasks) // (workers * 8))
        with ctx.Pool(workers) as pool:
            flat = pool.map(_cell, tasks, chunksize=chunk)

    n_t, n_b = grid.n_t, grid.n_b
    branch = [[flat[i * n_b + j][0] for j in range(n_b)] for i in range(n_t)]
    theta = np.array(
        [[flat[i * n_b + j][1] for j in range(n_b)] for i in range(n_t)]
    )
    deficit = np.array(
        [[flat[i * n_b + j][2] for j in range(n_b)] for i in range(n_t)]
    )
    shapes = [[flat[i * n_b + j][3] for j in range(n_b)] for i in range(n_t)]
    return PhaseDiagram(
        grid=grid,
        J=J,
        Jz=Jz,
        branch=branch,
        theta=theta,
        deficit=deficit,
        shape_tags=shapes,
        norm_unit=norm_unit,
        norm_value=norm_value,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def diagram_to_csv(d: PhaseDiagram) -> str:
    g = d.grid
    u = d.norm_value
    lines = [
        f"# J={_fmt(d.J)} Jz={_fmt(d.Jz)} norm_unit={d.norm_unit}"
        f" norm_value={_fmt(u)}",
        f"# T_range=[{_fmt(g.t_min)},{_fmt(g.t_max)}]"
        f" B_range=[{_fmt(g.b_min)},{_fmt(g.b_max)}] n_t={g.n_t} n_b={g.n_b}",
        "T,B,branch,theta_opt,deficit_nats,deficit_bits",
    ]
    ts = g.t_centers()
    bs = g.b_centers()
    for i in range(g.n_t):
        for j in range(g.n_b):
            dn = d.deficit[i, j]
            lines.append(
                f"{_fmt(ts[i] / u)},{_fmt(bs[j] / u)},{d.branch[i][j]},"
                f"{_fmt(d.theta[i, j])},{_fmt(dn)},{_fmt(dn / LN2)}"
            )
    return "\n".join(lines) + "\n"


def _round9(x: float) -> float:
    return float(format(float(x), ".9g"))


def diagram_to_json(d: PhaseDiagram) -> str:
    g = d.grid
    u = d.norm_value
    ts = g.t_centers()
    bs = g.b_centers()
    cells = []
    for i in range(g.n_t):
        for j in range(g.n_b):
            dn = float(d.deficit[i, j])
            cells.append(
                {
                    "T": _round9(ts[i] / u),
                    "B": _round9(bs[j] / u),
                    "branch": d.branch[i][j],
                    "theta_opt": _round9(d.theta[i, j]),
                    "deficit_nats": _round9(dn),
                    "deficit_bits": _round9(dn / LN2),
                    "shape": d.shape_tags[i][j],
                }
            )
    doc = {
        "params": {"J": d.J, "Jz": d.Jz},
        "norm": {"unit": d.norm_unit, "value": _round9(u)},
        "grid": {
            "T_range": [g.t_min, g.t_max],
            "B_range": [g.b_min, g.b_max],
            "n_t": g.n_t,
            "n_b": g.n_b,
        },
        "cells": cells,
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _edge_point(pa, pb, va, vb, level):
    frac = (level - va) / (vb - va)
    return (pa[0] + frac * (pb[0] - pa[0]), pa[1] + frac * (pb[1] - pa[1]))


def _cell_segments(ts, bs, z, i, j, level):
    """Contour segments of one grid cell (marching squares).

    Corners are indexed counterclockwise from (i, j); crossing points on
    the four edges are paired according to the corner pattern, with the
    saddle cases disambiguated by the cell-center average.
    """
    corners = [
        ((ts[i], bs[j]), z[i, j]),
        ((ts[i + 1], bs[j]), z[i + 1, j]),
        ((ts[i + 1], bs[j + 1]), z[i + 1, j + 1]),
        ((ts[i], bs[j + 1]), z[i, j + 1]),
    ]
    inside = [v >= level for _, v in corners]
    if all(inside) or not any(inside):
        return []
    crossings = {}
    for e in range(4):
        (pa, va), (pb, vb) = corners[e], corners[(e + 1) % 4]
        if inside[e] != inside[(e + 1) % 4]:
            crossings[e] = _edge_point(pa, pb, va, vb, level)
    edges = sorted(crossings)
    if len(edges) == 2:
        return [(crossings[edges[0]], crossings[edges[1]])]
    center_inside = (sum(v for _, v in corners) / 4.0) >= level
    if center_inside == inside[0]:
        pairs = [(0, 1), (2, 3)]
    else:
        pairs = [(3, 0), (1, 2)]
    return [(crossings[a], crossings[b]) for a, b in pairs]


def _chain_segments(segments):
    """Join raw segments into polylines by matching endpoints."""

    def key(pt):
        return (round(pt[0], 10), round(pt[1], 10))

    adjacency: dict = {}
    for idx, (p1, p2) in enumerate(segments):
        adjacency.setdefault(key(p1), []).append((idx, p2))
        adjacency.setdefault(key(p2), []).append((idx, p1))

    used = [False] * len(segments)
    polylines = []
    for idx, (p1, p2) in enumerate(segments):
        if used[idx]:
            continue
        used[idx] = True
        chain = [p1, p2]
        for grow_end in (True, False):
            while True:
                tip = chain[-1] if grow_end else chain[0]
                nxt = None
                for sid, other in adjacency.get(key(tip), []):
                    if not used[sid]:
                        nxt = (sid, other)
                        break
                if nxt is None:
                    break
                used[nxt[0]] = True
                if grow_end:
                    chain.append(nxt[1])
                else:
                    chain.insert(0, nxt[1])
        polylines.append(chain)
    return polylines


def level_lines(d: PhaseDiagram, levels) -> list[tuple[float, list]]:
    """Iso-contours of the deficit field, one polyline list per level."""
    ts = d.grid.t_centers()
    bs = d.grid.b_centers()
    z = d.deficit
    out = []
    for level in levels:
        if not 0.0 <= level <= LN2 + 1e-12:
            raise ValueError(f"level {level!r} outside [0, ln 2]")
        segments = []
        for i in range(len(ts) - 1):
            for j in range(len(bs) - 1):
                segments.extend(_cell_segments(ts, bs, z, i, j, level))
        out.append((float(level), _chain_segments(segments)))
    return out


def contours_to_csv(contours, norm: float = 1.0) -> str:
    lines = ["level,polyline,T,B"]
    for level, polylines in contours:
        for pid, chain in enumerate(polylines):
            for t, b in chain:
                lines.append(
                    f"{_fmt(level)},{pid},{_fmt(t / norm)},{_fmt(b / norm)}"
                )
    return "\n".join(lines) + "\n"
