"""Vulnerability diagnostics derived from an impact/noticeability frontier.

A frontier is summarized by two scalars on a normalized [0,1]x[0,1]
scale: the slope of its first segment (impact gained per unit of
noticeability spent at the origin) and the area under the normalized
piecewise-linear curve (0.5 = linear trade-off, near 1 = severe impact
from tiny tampering).  Reports are comparable across networks, demand
levels, and attack durations via a max-vertical-gap shape distance.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .adversary import ParetoFrontier
from .errors import InputError


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def normalize(f: ParetoFrontier | list[tuple[int, int]]
              ) -> list[tuple[float, float]]:
    """Frontier points as (z2 / max z2, |z1| / max |z1|), order preserved.

    Degenerate frontiers (a single point, or zero range on either axis)
    collapse to the single point (0.0, 0.0).
    """
    pairs = f.pairs() if isinstance(f, ParetoFrontier) else list(f)
    if not pairs:
        raise InputError("cannot normalize an empty frontier")
    z1_max = max(abs(z1) for z1, _ in pairs)
    z2_max = max(z2 for _, z2 in pairs)
    if z1_max == 0 or z2_max == 0:
        return [(0.0, 0.0)]
    return [(z2 / z2_max, abs(z1) / z1_max) for z1, z2 in pairs]


def slope_at_origin(f: ParetoFrontier | list[tuple[int, int]]
                    ) -> float | None:
    """Rise over run of the first normalized segment; None if degenerate."""
    pts = normalize(f)
    if len(pts) < 2:
        return None
    (u0, v0), (u1, v1) = pts[0], pts[1]
    return (v1 - v0) / (u1 - u0)


def concavity_index(f: ParetoFrontier | list[tuple[int, int]]
                    ) -> float | None:
    """Trapezoidal area under the normalized curve; None if degenerate."""
    pts = normalize(f)
    if len(pts) < 2:
        return None
    area = 0.0
    for (u0, v0), (u1, v1) in zip(pts, pts[1:]):
        area += (u1 - u0) * (v0 + v1) / 2.0
    return area


@dataclass
class VulnerabilityReport:
    label: str
    m: float | None
    concavity_index: float | None
    normalized_points: list[tuple[float, float]]
    z1_max: int
    z2_max: int
    n_points: int
    settings: dict = field(default_factory=dict)

    @classmethod
    def from_frontier(cls, label: str,
                      f: ParetoFrontier | list[tuple[int, int]],
                      settings: dict | None = None) -> "VulnerabilityReport":
        pairs = f.pairs() if isinstance(f, ParetoFrontier) else list(f)
        if not pairs:
            raise InputError("cannot report on an empty frontier")
        return cls(
            label=label,
            m=slope_at_origin(pairs),
            concavity_index=concavity_index(pairs),
            normalized_points=normalize(pairs),
            z1_max=max(abs(z1) for z1, _ in pairs),
            z2_max=max(z2 for _, z2 in pairs),
            n_points=len(pairs),
            settings=dict(settings or {}),
        )

    def normalized_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["z2_norm", "abs_z1_norm"])
        for u, v in self.normalized_points:
            writer.writerow([_fmt(u), _fmt(v)])
        return buf.getvalue()


def reports_csv(reports: list[VulnerabilityReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "m", "concavity_index", "n_points",
                     "z1_max", "z2_max"])
    for r in reports:
        writer.writerow([
            r.label,
            "" if r.m is None else _fmt(r.m),
            "" if r.concavity_index is None else _fmt(r.concavity_index),
            r.n_points, r.z1_max, r.z2_max,
        ])
    return buf.getvalue()


def _curve_value(pts: list[tuple[float, float]], u: float) -> float:
    """Piecewise-linear interpolation, clamped to the end values."""
    if u <= pts[0][0]:
        return pts[0][1]
    for (u0, v0), (u1, v1) in zip(pts, pts[1:]):
        if u <= u1:
            return v0 + (v1 - v0) * (u - u0) / (u1 - u0)
    return pts[-1][1]


def shape_distance(a: list[tuple[float, float]],
                   b: list[tuple[float, float]]) -> float:
    """Max vertical gap between two normalized piecewise-linear curves.

    The difference of two piecewise-linear functions is piecewise linear,
    so the maximum gap is attained at a breakpoint of either curve.
    """
    breakpoints = sorted({u for u, _ in a} | {u for u, _ in b})
    return max(abs(_curve_value(a, u) - _curve_value(b, u))
               for u in breakpoints)


@dataclass
class ComparisonTable:
    axis: str
    rows: list[VulnerabilityReport]
    shape_distances: dict[tuple[str, str], float]

    def max_shape_distance(self) -> float:
        return max(self.shape_distances.values(), default=0.0)

    def slopes(self) -> dict[str, float | None]:
        return {r.label: r.m for r in self.rows}

    def to_csv(self) -> str:
        return reports_csv(self.rows)


def compare(reports: list[VulnerabilityReport], axis: str) -> ComparisonTable:
    """Side-by-side diagnostics for reports varying along one axis.

    Every non-varied setting must agree across the reports; the varied
    axis key is exempt.  Pairwise shape distances support the
    demand-invariance check (similar frontier shapes across demands).
    """
    if axis not in ("network", "demand", "duration"):
        raise InputError(f"unknown comparison axis {axis!r}")
    if len(reports) < 2:
        raise InputError("comparison needs at least two reports")
    base = {k: v for k, v in reports[0].settings.items() if k != axis}
    for r in reports[1:]:
        other = {k: v for k, v in r.settings.items() if k != axis}
        if other != base:
            raise InputError(
                f"report {r.label!r} varies settings other than {axis!r}: "
                f"{other} != {base}"
            )
    ordered = sorted(reports, key=lambda r: r.label)
    distances: dict[tuple[str, str], float] = {}
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            distances[(a.label, b.label)] = shape_distance(
                a.normalized_points, b.normalized_points
            )
    return ComparisonTable(axis=axis, rows=ordered,
                           shape_distances=distances)
