"""Command-line driver: scenarios in, CSV/JSON artifacts out.

Every command is deterministic given a scenario file (and seed), and
writes a run manifest listing all artifacts so results can be
reproduced byte-for-byte.  Exit codes: 0 success, 2 invalid input,
3 internal invariant violation.
"""

from __future__ import annotations

import concurrent.futures
import csv
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .adversary import (ParetoFrontier, brute_force_frontier,
                        encode_objectives, frontier_audit, pareto_frontier)
from .control import optimal_control
from .errors import InputError, InvariantError, TampernetError
from .mincost import HAVE_COMPILED_KERNEL, solve_lexicographic
from .network import degree_statistics, validate
from .scenarios import (ATTACK_DURATIONS, DEMAND_RATES, GRID_KINDS,
                        NETWORK_KINDS, ScenarioConfig)
from .supergraph import CLASS_NAMES
from .vulnerability import VulnerabilityReport, reports_csv

OUT_ENVVAR = "TAMPERNET_OUT"
# enumeration stays desk-scale within these bounds
ORACLE_MAX_GADGETS = 2
ORACLE_MAX_STEPS = 8
ORACLE_MAX_DEMAND = 4


class _Manifest:
    def __init__(self, command: str, out_dir: Path):
        self.doc = {
            "tool_version": __version__,
            "command": command,
            "argv": sys.argv[1:],
            "compiled_kernel": HAVE_COMPILED_KERNEL,
            "scenario": None,
            "seeds": {},
            "artifacts": [],
            "timings_s": {},
        }
        self.out_dir = out_dir
        self._t0 = time.monotonic()

    def time(self, key: str):
        manifest = self

        class _Timer:
            def __enter__(self):
                self.start = time.monotonic()
                return self

            def __exit__(self, *exc):
                manifest.doc["timings_s"][key] = round(
                    time.monotonic() - self.start, 3
                )
                return False

        return _Timer()

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
        self.doc["artifacts"].append(name)
        return path

    def finish(self) -> Path:
        self.doc["timings_s"]["total"] = round(
            time.monotonic() - self._t0, 3
        )
        path = self.out_dir / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.doc, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
        return path


def _load_scenario(path: str, manifest: _Manifest | None = None
                   ) -> ScenarioConfig:
    p = Path(path)
    if not p.exists():
        raise InputError(f"scenario file not found: {path}")
    cfg = ScenarioConfig.from_json(p.read_text(encoding="utf-8"))
    if cfg.network.get("kind") == "file":
        net_path = Path(cfg.network["path"])
        if not net_path.is_absolute():
            cfg.network["path"] = str(p.parent / net_path)
    if manifest is not None:
        manifest.doc["scenario"] = str(p)
        if "seed" in cfg.network:
            manifest.doc["seeds"]["network"] = cfg.network["seed"]
    return cfg


def _out_dir(out: str | None) -> Path:
    import os
    if out:
        return Path(out)
    env = os.environ.get(OUT_ENVVAR)
    if env:
        return Path(env)
    return Path.cwd() / "tampernet-out"


out_option = click.option("--out", "out", default=None,
                          help=f"Output directory (default ${OUT_ENVVAR} "
                               f"or ./tampernet-out).")
scenario_option = click.option("--scenario", "scenario", required=True,
                               help="Path to a scenario JSON file.")


@click.group()
@click.version_option(__version__)
def main():
    """Traffic-signal tampering analysis on time-expanded flow graphs."""


def _run(fn):
    try:
        fn()
    except InputError as exc:
        click.echo(json.dumps({"error": "invalid-input", "detail": str(exc)}),
                   err=True)
        sys.exit(2)
    except InvariantError as exc:
        click.echo(json.dumps({"error": "invariant-violation",
                               "detail": str(exc)}), err=True)
        sys.exit(3)
    except TampernetError as exc:
        click.echo(json.dumps({"error": "failure", "detail": str(exc)}),
                   err=True)
        sys.exit(3)


@main.command()
@click.option("--kind", type=click.Choice(NETWORK_KINDS), required=True)
@click.option("--horizon", type=int, default=450, show_default=True)
@click.option("--rate", type=float, default=400.0, show_default=True,
              help="Demand rate per source in veh/hr.")
@click.option("--seed", type=int, default=None,
              help="Network seed (required for kind D).")
@out_option
def generate(kind, horizon, rate, seed, out):
    """Emit a network file and a matching scenario file."""
    def body():
        network_spec = {"kind": kind}
        if seed is not None:
            network_spec["seed"] = seed
        cfg = ScenarioConfig(network=network_spec, horizon_steps=horizon,
                             demand_rate_veh_hr=rate)
        manifest = _Manifest("generate", _out_dir(out))
        if seed is not None:
            manifest.doc["seeds"]["network"] = seed
        with manifest.time("generate"):
            network = cfg.build_network()
        report = validate(network)
        if not report.ok:
            raise InvariantError(f"generated network invalid: "
                                 f"{report.problems}")
        manifest.write_text("network.json", network.to_json() + "\n")
        manifest.write_text("scenario.json", cfg.to_json() + "\n")
        degrees = degree_statistics(network)
        summary = {
            "kind": kind,
            "cells": len(network.cells),
            "connectors": len(network.connectors),
            "conflict_gadgets": len(network.gadgets),
            "uniform_degrees": degrees.uniform,
            "meta": network.meta,
        }
        manifest.write_text("network-summary.json",
                            json.dumps(summary, indent=2, sort_keys=True)
                            + "\n")
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


@main.command()
@scenario_option
@out_option
def expand(scenario, out):
    """Expand a scenario and emit super-graph statistics."""
    def body():
        manifest = _Manifest("expand", _out_dir(out))
        cfg = _load_scenario(scenario, manifest)
        with manifest.time("expand"):
            g = cfg.expand()
        counts = {CLASS_NAMES[k]: int((g.arc_class == k).sum())
                  for k in sorted(set(g.arc_class.tolist()))}
        stats = {
            "nodes": g.n_nodes,
            "arcs": g.n_arcs,
            "arc_classes": counts,
            "total_demand": int(g.demand_total),
            "horizon_steps": g.horizon.steps,
        }
        manifest.write_text("supergraph-stats.json",
                            json.dumps(stats, indent=2, sort_keys=True)
                            + "\n")
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


@main.command("solve-optimal")
@scenario_option
@out_option
def solve_optimal(scenario, out):
    """Compute the travel-time-minimizing control and export it."""
    def body():
        manifest = _Manifest("solve-optimal", _out_dir(out))
        cfg = _load_scenario(scenario, manifest)
        with manifest.time("expand"):
            g = cfg.expand()
        with manifest.time("solve"):
            opt = optimal_control(g)
        manifest.write_text("schedule.csv", opt.schedule.to_csv())
        manifest.write_text("optimal-flow.txt",
                            g.export_edge_list(opt.flow.flows))
        curve = "\n".join(
            f"{t},{v}" for t, v in enumerate(opt.throughput_curve.tolist())
        )
        manifest.write_text("throughput.csv",
                            "t,cumulative_exits\n" + curve + "\n")
        metrics = {
            "total_travel_time_steps": opt.total_travel_time,
            "vehicles_exited": int(opt.sink_flows.sum()),
            "total_demand": int(g.demand_total),
            "signal_switches": opt.schedule.switch_count(),
        }
        manifest.write_text("metrics.json",
                            json.dumps(metrics, indent=2, sort_keys=True)
                            + "\n")
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


def _frontier_artifacts(manifest: _Manifest, g, opt,
                        front: ParetoFrontier, prefix: str = ""):
    manifest.write_text(f"{prefix}frontier.csv", front.to_csv())
    provenance = "\n".join(
        json.dumps(e, sort_keys=True) for e in front.provenance
    )
    manifest.write_text(f"{prefix}provenance.txt", provenance + "\n")
    for k, p in enumerate(front.points):
        manifest.write_text(f"{prefix}witness-w{k:03d}.txt",
                            g.export_edge_list(p.witness.flows))


def _oracle_qualifies(cfg: ScenarioConfig, g) -> bool:
    return (len(g.network.gadgets) <= ORACLE_MAX_GADGETS
            and cfg.horizon_steps <= ORACLE_MAX_STEPS
            and g.demand_total <= ORACLE_MAX_DEMAND)


@main.command()
@scenario_option
@out_option
@click.option("--oracle-check", is_flag=True,
              help="Cross-check against brute-force enumeration when the "
                   "instance is small enough.")
def attack(scenario, out, oracle_check):
    """Enumerate the impact-versus-noticeability frontier."""
    def body():
        manifest = _Manifest("attack", _out_dir(out))
        cfg = _load_scenario(scenario, manifest)
        with manifest.time("expand"):
            g = cfg.expand()
        with manifest.time("solve-optimal"):
            opt = optimal_control(g)
        with manifest.time("frontier"):
            front = pareto_frontier(g, opt)
        audit = frontier_audit(front, opt, g)
        if not audit.ok:
            raise InvariantError(f"frontier audit failed: {audit.problems}")
        _frontier_artifacts(manifest, g, opt, front)
        if oracle_check:
            if _oracle_qualifies(cfg, g):
                with manifest.time("oracle"):
                    oracle = brute_force_frontier(g, opt)
                agrees = set(front.pairs()) == oracle
                manifest.doc["oracle_check"] = {
                    "ran": True,
                    "agrees": agrees,
                    "oracle_points": sorted(oracle, key=lambda p: p[1]),
                }
                if not agrees:
                    raise InvariantError(
                        f"frontier {front.pairs()} disagrees with "
                        f"enumeration {sorted(oracle)}"
                    )
            else:
                manifest.doc["oracle_check"] = {
                    "ran": False,
                    "reason": "instance exceeds enumeration bounds",
                }
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


def read_frontier_csv(path: Path) -> list[tuple[int, int]]:
    """Parse an exported frontier CSV back into (z1, z2) pairs."""
    if not path.exists():
        raise InputError(f"frontier file not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or \
                not {"z1", "z2"} <= set(reader.fieldnames):
            raise InputError(f"{path}: expected columns z1 and z2")
        try:
            return [(int(row["z1"]), int(row["z2"])) for row in reader]
        except (KeyError, ValueError) as exc:
            raise InputError(f"{path}: malformed frontier row: {exc}") \
                from exc


@main.command()
@click.argument("frontiers", nargs=-1, required=True)
@out_option
def vuln(frontiers, out):
    """Summarize exported frontier CSVs as vulnerability reports."""
    def body():
        manifest = _Manifest("vuln", _out_dir(out))
        reports = []
        for item in frontiers:
            path = Path(item)
            pairs = read_frontier_csv(path)
            label = path.stem.removesuffix(".frontier")
            report = VulnerabilityReport.from_frontier(label, pairs)
            reports.append(report)
            manifest.write_text(f"{label}.normalized.csv",
                                report.normalized_csv())
        manifest.write_text("vulnerability.csv", reports_csv(reports))
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


def _sweep_job(args):
    kind, rate, duration, seed = args
    network_spec = {"kind": kind}
    if kind == "D":
        network_spec["seed"] = seed
    cfg = ScenarioConfig(network=network_spec, horizon_steps=duration,
                         demand_rate_veh_hr=rate)
    g = cfg.expand()
    opt = optimal_control(g)
    front = pareto_frontier(g, opt)
    audit = frontier_audit(front, opt, g)
    if not audit.ok:
        raise InvariantError(
            f"frontier audit failed for {cfg.label}: {audit.problems}"
        )
    return cfg.label, front.to_csv(), front.pairs()


@main.command()
@out_option
@click.option("--networks", default=",".join(GRID_KINDS + ("D",)),
              show_default=True, help="Comma-separated network kinds.")
@click.option("--demands", default=",".join(str(r) for r in DEMAND_RATES),
              show_default=True, help="Comma-separated veh/hr rates.")
@click.option("--durations", default="450", show_default=True,
              help="Comma-separated horizons in steps "
                   f"(presets: {','.join(str(d) for d in ATTACK_DURATIONS)}).")
@click.option("--seed", type=int, default=1, show_default=True,
              help="Seed for irregular networks.")
@click.option("--jobs", type=int, default=1, show_default=True)
def sweep(out, networks, demands, durations, seed, jobs):
    """Frontier grid over networks x demand rates x durations."""
    def body():
        manifest = _Manifest("sweep", _out_dir(out))
        manifest.doc["seeds"]["network"] = seed
        try:
            kinds = [k.strip() for k in networks.split(",") if k.strip()]
            rates = [float(r) for r in demands.split(",") if r.strip()]
            steps = [int(d) for d in durations.split(",") if d.strip()]
        except ValueError as exc:
            raise InputError(f"malformed sweep axis: {exc}") from exc
        for k in kinds:
            if k not in NETWORK_KINDS:
                raise InputError(f"unknown network kind {k!r}")
        jobs_list = [(k, r, d, seed)
                     for k in kinds for r in rates for d in steps]
        with manifest.time("sweep"):
            if jobs > 1:
                with concurrent.futures.ProcessPoolExecutor(jobs) as pool:
                    results = list(pool.map(_sweep_job, jobs_list))
            else:
                results = [_sweep_job(j) for j in jobs_list]
        reports = []
        for label, csv_text, pairs in results:
            manifest.write_text(f"{label}.frontier.csv", csv_text)
            reports.append(VulnerabilityReport.from_frontier(label, pairs))
        manifest.write_text("vulnerability.csv", reports_csv(reports))
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


@main.command("max-impact")
@scenario_option
@out_option
def max_impact(scenario, out):
    """Report the largest achievable impact magnitude (one solve)."""
    def body():
        manifest = _Manifest("max-impact", _out_dir(out))
        cfg = _load_scenario(scenario, manifest)
        with manifest.time("expand"):
            g = cfg.expand()
        with manifest.time("solve"):
            opt = optimal_control(g)
            enc = encode_objectives(opt, g)
            flow = solve_lexicographic(g, enc.z1_costs, enc.z2_costs,
                                       enc.z2_bound)
        z1 = flow.objective + enc.z1_const
        z2 = flow.secondary_objective + enc.z2_const
        doc = {"label": cfg.label, "max_abs_z1": abs(z1), "z2_at_max": z2}
        manifest.write_text("max-impact.json",
                            json.dumps(doc, indent=2, sort_keys=True) + "\n")
        path = manifest.finish()
        click.echo(f"wrote {path.parent}")
    _run(body)


if __name__ == "__main__":
    main()
