"""Render Pareto frontier overlays from exported CSV files."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

FRONTIER_HEADER = ["z2", "z1", "abs_z1", "witness_id"]
GROUPINGS = ("network", "demand", "duration")


class SchemaError(ValueError):
    """A CSV file does not match the exported frontier schema."""


@dataclass
class PlotSpec:
    inputs: list[Path]
    output: Path
    grouping: str = "network"
    normalized: bool = False
    title: str | None = None
    labels: dict[Path, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.grouping not in GROUPINGS:
            raise SchemaError(f"unknown grouping {self.grouping!r}; "
                              f"expected one of {GROUPINGS}")
        if not self.inputs:
            raise SchemaError("no input CSV files given")


def curve_label(path: Path) -> str:
    """Label for a curve: the file stem minus the '.frontier' suffix."""
    stem = path.name
    for suffix in (".csv", ".frontier"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    return stem


def read_frontier_csv(path: Path) -> list[tuple[int, int, int]]:
    """Parse one exported frontier as (z2, z1, abs_z1) rows, z2 ascending."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if not rows or rows[0] != FRONTIER_HEADER:
        raise SchemaError(f"{path}: expected header "
                          f"{','.join(FRONTIER_HEADER)}")
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(FRONTIER_HEADER):
            raise SchemaError(f"{path}:{lineno}: wrong column count")
        try:
            z2, z1, abs_z1 = int(row[0]), int(row[1]), int(row[2])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: non-integer z value") from exc
        if abs_z1 != abs(z1) or z2 < 0:
            raise SchemaError(f"{path}:{lineno}: inconsistent z values")
        points.append((z2, z1, abs_z1))
    if not points:
        raise SchemaError(f"{path}: no frontier points")
    if points != sorted(points, key=lambda p: p[0]):
        raise SchemaError(f"{path}: rows not sorted by z2")
    return points


def normalized_curve(points: list[tuple[int, int, int]]
                     ) -> list[tuple[float, float]]:
    """Map (z2, z1) rows onto [0,1]^2 as (z2/z2_max, |z1|/|z1|_max)."""
    z2_max = max(p[0] for p in points)
    z1_max = max(p[2] for p in points)
    if z2_max == 0 or z1_max == 0:
        return [(0.0, 0.0)]
    return [(z2 / z2_max, a / z1_max) for z2, _, a in points]


def render(spec: PlotSpec) -> Path:
    """Draw the overlay figure and a JSON sidecar with point counts.

    Returns the image path; the sidecar lives next to it with an extra
    ``.json`` suffix and records exactly how many CSV rows each curve
    contains, so downstream checks can tie the figure to its data.
    """
    curves = {}
    for path in spec.inputs:
        label = spec.labels.get(path, curve_label(path))
        if label in curves:
            raise SchemaError(f"duplicate curve label {label!r}")
        curves[label] = read_frontier_csv(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for label, points in curves.items():
        if spec.normalized:
            xy = normalized_curve(points)
        else:
            xy = [(z2, a) for z2, _, a in points]
        ax.plot([p[0] for p in xy], [p[1] for p in xy],
                marker="o", linestyle="-", label=label)
    if spec.normalized:
        ax.set_xlabel("noticeability (normalized $z_2$)")
        ax.set_ylabel("impact (normalized $|z_1|$)")
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.05)
    else:
        ax.set_xlabel("changed signal decisions $z_2$")
        ax.set_ylabel("throughput loss $|z_1|$ [vehicles]")
    ax.legend(title=spec.grouping)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)

    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output, bbox_inches="tight")
    plt.close(fig)

    sidecar = spec.output.with_name(spec.output.name + ".json")
    sidecar.write_text(json.dumps({
        "output": spec.output.name,
        "grouping": spec.grouping,
        "normalized": spec.normalized,
        "point_counts": {label: len(points)
                         for label, points in curves.items()},
        "inputs": [str(p) for p in spec.inputs],
    }, indent=1) + "\n")
    return spec.output


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tamperplots",
        description="Render Pareto frontier overlays from frontier CSVs.",
    )
    parser.add_argument("csvs", nargs="+", type=Path,
                        help="frontier CSV files (schema z2,z1,abs_z1,witness_id)")
    parser.add_argument("--out", type=Path, required=True,
                        help="output image path (.png or .svg)")
    parser.add_argument("--group", choices=GROUPINGS, default="network",
                        help="what distinguishes the overlaid curves")
    parser.add_argument("--normalized", action="store_true",
                        help="draw on the normalized [0,1]^2 scale")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        spec = PlotSpec(inputs=args.csvs, output=args.out,
                        grouping=args.group, normalized=args.normalized,
                        title=args.title)
        render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
