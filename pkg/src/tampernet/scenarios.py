"""Reproducible test scenarios: networks, demand profiles, durations.

Three regular one-way grids of increasing density (A: 2x2 intersections
with 500 m links, B: 3x3 with 375 m average links, C: 4x4 with 250 m
links) and a seeded irregular network (D: 23 intersections, about 100 m
average links, 9 sources / 8 sinks, non-uniform degrees).  Cell length
is the distance covered at free-flow speed in one time step (50 m at
90 km/h and 2 s), so a link of length L becomes round(L / 50) cells.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .network import (Cell, ConflictGroup, Connector, RoadNetwork,
                      TransshipmentNode, validate)
from .supergraph import DemandProfile, Horizon, SuperGraph, expand

GRID_KINDS = ("A", "B", "C")
NETWORK_KINDS = GRID_KINDS + ("D",)
ATTACK_DURATIONS = (300, 450, 600)  # steps: 10 / 15 / 20 minutes at 2 s
DEMAND_RATES = (400, 800, 1200)     # veh/hr per source

_GRID_SIZE = {"A": 2, "B": 3, "C": 4}
# cells per link along each street, in travel order; cell length 50 m
_GRID_LINK_CELLS = {
    "A": [10, 10, 10],          # 3 links of 500 m
    "B": [8, 7, 8, 7],          # 4 links averaging 375 m
    "C": [5, 5, 5, 5, 5],       # 5 links of 250 m
}
_CELL_LENGTH_M = 50.0

_IRREGULAR_SITES = 23
_IRREGULAR_SOURCES = 9
_IRREGULAR_SINKS = 8
_IRREGULAR_CHORDS = 12
# cells per inter-site link, cycled; averages exactly 2 cells = 100 m
# when the link count is a multiple of 5 (23 cycle + 12 chord links)
_IRREGULAR_LINK_PATTERN = (2, 1, 2, 3, 2)


def _street_cells(street: str, pattern: list[int], n_occupancy: int,
                  flow_cap: int) -> tuple[list[Cell], list[list[str]]]:
    """Cells of one street: source, per-link chains, sink."""
    cells = [Cell(f"{street}:src", "source", n_occupancy, flow_cap)]
    links: list[list[str]] = []
    for k, length in enumerate(pattern):
        chain = [f"{street}:{k}:{c}" for c in range(length)]
        cells.extend(
            Cell(cid, "ordinary", n_occupancy, flow_cap) for cid in chain
        )
        links.append(chain)
    cells.append(Cell(f"{street}:snk", "sink", n_occupancy, flow_cap))
    return cells, links


def generate_regular_grid(kind: str, max_occupancy: int = 5,
                          flow_capacity: int = 1) -> RoadNetwork:
    """One-way single-lane grid with a crossing gadget per intersection.

    Street directions alternate row by row and column by column; each
    street enters at a boundary source cell and leaves at a boundary
    sink cell.
    """
    if kind not in GRID_KINDS:
        raise InputError(f"unknown grid kind {kind!r}")
    n = _GRID_SIZE[kind]
    pattern = _GRID_LINK_CELLS[kind]
    cells: list[Cell] = []
    connectors: list[Connector] = []
    # (i, j) -> street id -> (approach last cell, departure first cell)
    crossings: dict[tuple[int, int], dict[str, tuple[str, str]]] = {
        (i, j): {} for i in range(n) for j in range(n)
    }

    streets: list[tuple[str, list[tuple[int, int]]]] = []
    for j in range(n):  # horizontal, eastbound on even rows
        cols = list(range(n)) if j % 2 == 0 else list(range(n - 1, -1, -1))
        streets.append((f"h{j}", [(i, j) for i in cols]))
    for i in range(n):  # vertical, southbound on even columns
        rows = list(range(n)) if i % 2 == 0 else list(range(n - 1, -1, -1))
        streets.append((f"v{i}", [(i, j) for j in rows]))

    q = flow_capacity
    for street, path in streets:
        s_cells, links = _street_cells(street, pattern, max_occupancy, q)
        cells.extend(s_cells)
        connectors.append(
            Connector(f"{street}:enter", f"{street}:src", links[0][0], q)
        )
        for k, chain in enumerate(links):
            for a, b in zip(chain, chain[1:]):
                connectors.append(Connector(f"{street}:{a}>{b}", a, b, q))
            if k + 1 < len(links):
                crossings[path[k]][street] = (chain[-1], links[k + 1][0])
        connectors.append(
            Connector(f"{street}:leave", links[-1][-1], f"{street}:snk", q)
        )

    groups = []
    for (i, j), movements in sorted(crossings.items()):
        ordered = tuple(movements[s] for s in sorted(movements))
        groups.append(ConflictGroup(f"x{i}.{j}", ordered))

    n_streets = 2 * n
    meta = {
        "kind": kind,
        "intersections": n * n,
        "links": n_streets * (n + 1),
        "avg_link_length_m": sum(pattern) / len(pattern) * _CELL_LENGTH_M,
        "source_sink_points": n_streets,
    }
    return RoadNetwork.build(cells, connectors, conflict_groups=groups,
                             meta=meta)


def generate_irregular(seed: int, max_occupancy: int = 5,
                       flow_capacity: int = 1) -> RoadNetwork:
    """Seeded irregular one-way network with non-uniform intersections.

    Sites are joined by a directed cycle plus random chords; sources and
    sinks attach to disjoint random sites.  Sites with several inbound
    approaches become conflict gadgets, sites with one inbound and
    several outbound roads become diverge nodes, and one-in/one-out
    sites are plain pass-throughs.
    """
    rng = np.random.default_rng(seed)
    n_sites = _IRREGULAR_SITES
    q = flow_capacity

    edges: list[tuple[int, int]] = [(k, (k + 1) % n_sites)
                                    for k in range(n_sites)]
    taken = set(edges)
    while len(edges) < n_sites + _IRREGULAR_CHORDS:
        a, b = (int(v) for v in rng.integers(0, n_sites, size=2))
        if a == b or (a, b) in taken:
            continue
        taken.add((a, b))
        edges.append((a, b))

    special = rng.permutation(n_sites)[:_IRREGULAR_SOURCES + _IRREGULAR_SINKS]
    source_sites = {int(s) for s in special[:_IRREGULAR_SOURCES]}
    sink_sites = {int(s) for s in special[_IRREGULAR_SOURCES:]}

    cells: list[Cell] = []
    connectors: list[Connector] = []
    nodes: list[TransshipmentNode] = []
    groups: list[ConflictGroup] = []
    ins: dict[int, list[str]] = {s: [] for s in range(n_sites)}
    outs: dict[int, list[str]] = {s: [] for s in range(n_sites)}

    for idx, (a, b) in enumerate(edges):
        length = _IRREGULAR_LINK_PATTERN[idx % len(_IRREGULAR_LINK_PATTERN)]
        chain = [f"l{idx}:{c}" for c in range(length)]
        cells.extend(
            Cell(cid, "ordinary", max_occupancy, q) for cid in chain
        )
        for u, v in zip(chain, chain[1:]):
            connectors.append(Connector(f"l{idx}:{u}>{v}", u, v, q))
        outs[a].append(chain[0])
        ins[b].append(chain[-1])

    for s in sorted(source_sites):
        cells.append(Cell(f"src{s}", "source", max_occupancy, q))
        ins[s].append(f"src{s}")
    for s in sorted(sink_sites):
        cells.append(Cell(f"snk{s}", "sink", max_occupancy, q))
        outs[s].append(f"snk{s}")

    for s in range(n_sites):
        approach, depart = ins[s], outs[s]
        if len(approach) >= 2:
            movements = tuple((a, b) for a in approach for b in depart)
            groups.append(ConflictGroup(f"x{s}", movements))
        elif len(depart) >= 2:
            nodes.append(TransshipmentNode(f"d{s}", "diverge"))
            connectors.append(Connector(f"d{s}:in", approach[0], f"d{s}", q))
            for k, b in enumerate(depart):
                connectors.append(Connector(f"d{s}:out{k}", f"d{s}", b, q))
        else:
            connectors.append(Connector(f"p{s}", approach[0], depart[0], q))

    total_cells = sum(
        _IRREGULAR_LINK_PATTERN[i % len(_IRREGULAR_LINK_PATTERN)]
        for i in range(len(edges))
    )
    meta = {
        "kind": "D",
        "seed": int(seed),
        "intersections": n_sites,
        "links": len(edges),
        "avg_link_length_m": total_cells / len(edges) * _CELL_LENGTH_M,
        "sources": _IRREGULAR_SOURCES,
        "sinks": _IRREGULAR_SINKS,
    }
    network = RoadNetwork.build(cells, connectors, nodes=nodes,
                                conflict_groups=groups, meta=meta)
    report = validate(network)
    if not report.ok:
        raise InputError(
            f"irregular generator produced an invalid network for seed "
            f"{seed}: {report.problems}; try another seed"
        )
    return network


def demand_profile(network: RoadNetwork, rate_veh_per_hr: float,
                   horizon: Horizon) -> DemandProfile:
    """Uniform demand at every source via cumulative rounding."""
    if rate_veh_per_hr < 0:
        raise InputError("demand rate must be non-negative")
    from .supergraph import rate_to_arrivals
    arrivals = {
        c.id: rate_to_arrivals(rate_veh_per_hr, horizon)
        for c in network.source_cells()
    }
    return DemandProfile(arrivals=arrivals)


@dataclass
class ScenarioConfig:
    """Everything needed to reproduce one experiment instance."""

    network: dict  # {"kind": "A".."D", "seed": int (required for D)}
    horizon_steps: int
    demand_rate_veh_hr: float
    delta_tau: float = 2.0
    cell_max_occupancy: int = 5
    cell_flow_capacity: int = 1
    free_flow_speed_kmh: float = 90.0
    sink_capacity_policy: str = "uncapacitated"
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = self.network.get("kind")
        if kind not in NETWORK_KINDS + ("file",):
            raise InputError(f"unknown network kind {kind!r}")
        if kind == "D" and "seed" not in self.network:
            raise InputError("network kind D requires an explicit seed")
        if kind == "file" and "path" not in self.network:
            raise InputError("network kind 'file' requires a path")
        if self.horizon_steps < 1:
            raise InputError("horizon_steps must be >= 1")
        if not self.label:
            self.label = f"{kind}-r{self.demand_rate_veh_hr:g}" \
                         f"-T{self.horizon_steps}"

    @property
    def cell_length_m(self) -> float:
        return self.free_flow_speed_kmh / 3.6 * self.delta_tau

    def build_network(self) -> RoadNetwork:
        kind = self.network["kind"]
        if kind in GRID_KINDS:
            return generate_regular_grid(
                kind, self.cell_max_occupancy, self.cell_flow_capacity
            )
        if kind == "file":
            from pathlib import Path
            path = Path(self.network["path"])
            if not path.exists():
                raise InputError(f"network file not found: {path}")
            return RoadNetwork.from_json(path.read_text(encoding="utf-8"))
        return generate_irregular(
            int(self.network["seed"]), self.cell_max_occupancy,
            self.cell_flow_capacity,
        )

    def horizon(self) -> Horizon:
        return Horizon(self.horizon_steps, self.delta_tau)

    def expand(self, network: RoadNetwork | None = None) -> SuperGraph:
        network = network or self.build_network()
        horizon = self.horizon()
        demand = demand_profile(network, self.demand_rate_veh_hr, horizon)
        return expand(network, horizon, demand,
                      sink_capacity_policy=self.sink_capacity_policy)

    def to_json(self) -> str:
        doc = {
            "network": self.network,
            "horizon_steps": self.horizon_steps,
            "demand_rate_veh_hr": self.demand_rate_veh_hr,
            "delta_tau": self.delta_tau,
            "cell_max_occupancy": self.cell_max_occupancy,
            "cell_flow_capacity": self.cell_flow_capacity,
            "free_flow_speed_kmh": self.free_flow_speed_kmh,
            "sink_capacity_policy": self.sink_capacity_policy,
            "label": self.label,
            "meta": self.meta,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"scenario file is not valid JSON: {exc}") \
                from exc
        if not isinstance(doc, dict) or "network" not in doc:
            raise InputError("scenario file must be an object with a "
                             "'network' entry")
        known = {
            "network", "horizon_steps", "demand_rate_veh_hr", "delta_tau",
            "cell_max_occupancy", "cell_flow_capacity",
            "free_flow_speed_kmh", "sink_capacity_policy", "label", "meta",
        }
        unknown = set(doc) - known
        if unknown:
            raise InputError(f"unknown scenario fields: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise InputError(f"malformed scenario: {exc}") from exc
