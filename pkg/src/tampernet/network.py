"""Physical road network model.

A network is declared as cells (road segments that store vehicles),
plain connectors between them, zero-storage transshipment nodes
(diverge/merge), and conflict groups.  Each conflict group is
materialized into a two-node gadget: all conflicting movements feed an
upper node ``u``, a single capacitated connector ``(u, v)`` meters the
right-of-way, and ``v`` fans out to the receiving cells.  Because the
gadget connector carries at most ``gadget_capacity`` vehicles per step,
conflicting movements cannot flow simultaneously when the capacity is 1.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .errors import InputError

CELL_KINDS = ("ordinary", "source", "sink")
NODE_KINDS = ("diverge", "merge", "conflict_upper", "conflict_lower")


@dataclass(frozen=True)
class Cell:
    id: str
    kind: str
    max_occupancy: int
    flow_capacity: int
    lanes: int = 1

    def check(self) -> list[str]:
        problems = []
        if self.kind not in CELL_KINDS:
            problems.append(f"cell {self.id}: unknown kind {self.kind!r}")
        if self.max_occupancy < 1 or self.flow_capacity < 1 or self.lanes < 1:
            problems.append(f"cell {self.id}: N, Q and lanes must be >= 1")
        if self.max_occupancy < self.flow_capacity:
            problems.append(
                f"cell {self.id}: max occupancy {self.max_occupancy} below "
                f"flow capacity {self.flow_capacity}"
            )
        return problems


@dataclass(frozen=True)
class Connector:
    id: str
    tail: str
    head: str
    capacity: int
    is_conflict: bool = False  # true only for the metering (u, v) gadget arc


@dataclass(frozen=True)
class TransshipmentNode:
    id: str
    kind: str


@dataclass(frozen=True)
class ConflictGroup:
    id: str
    movements: tuple[tuple[str, str], ...]
    gadget_capacity: int = 1


@dataclass(frozen=True)
class GadgetInfo:
    """Bookkeeping for one materialized conflict gadget."""

    group_id: str
    upper: str
    lower: str
    meter_connector: str
    entries: tuple[tuple[str, str], ...]  # (sending cell, connector id)
    exits: tuple[tuple[str, str], ...]    # (receiving cell, connector id)
    capacity: int


@dataclass
class ValidationReport:
    ok: bool
    problems: list[str] = field(default_factory=list)


@dataclass
class DegreeSummary:
    degrees: dict[str, tuple[int, int]]  # intersection id -> (in, out)
    histogram: dict[tuple[int, int], int]
    uniform: bool


def build_conflict_gadget(
    group: ConflictGroup, cells: dict[str, Cell]
) -> tuple[list[TransshipmentNode], list[Connector]]:
    """Materialize one conflict group into nodes and connectors.

    A single-movement group degenerates to a plain connector.  Multi-lane
    sending cells contribute one unit-capacity entry connector per lane so
    approach capacity is preserved without widening the metering arc.
    """
    seen = set()
    for mv in group.movements:
        if mv in seen:
            raise InputError(f"conflict group {group.id}: duplicate movement {mv}")
        seen.add(mv)
    if not group.movements:
        raise InputError(f"conflict group {group.id}: no movements")

    if len(group.movements) == 1:
        (a, b), = group.movements
        cap = min(cells[a].flow_capacity, cells[b].flow_capacity)
        return [], [Connector(f"{group.id}:direct", a, b, cap)]

    u = f"{group.id}:u"
    v = f"{group.id}:v"
    nodes = [
        TransshipmentNode(u, "conflict_upper"),
        TransshipmentNode(v, "conflict_lower"),
    ]
    connectors = [Connector(f"{group.id}:meter", u, v, group.gadget_capacity,
                            is_conflict=True)]
    senders: list[str] = []
    receivers: list[str] = []
    for a, b in group.movements:
        if a not in senders:
            senders.append(a)
        if b not in receivers:
            receivers.append(b)
    for a in senders:
        for lane in range(cells[a].lanes):
            connectors.append(Connector(f"{group.id}:in:{a}:{lane}", a, u, 1))
    for b in receivers:
        connectors.append(
            Connector(f"{group.id}:out:{b}", v, b, cells[b].flow_capacity)
        )
    return nodes, connectors


@dataclass
class RoadNetwork:
    """Cells, connectors and nodes, with conflict gadgets materialized."""

    cells: dict[str, Cell]
    connectors: list[Connector]
    nodes: dict[str, TransshipmentNode]
    conflict_groups: list[ConflictGroup]
    gadgets: dict[str, GadgetInfo]
    declared_connectors: list[Connector]
    declared_nodes: list[TransshipmentNode]
    gamma_in: dict[str, list[Connector]]
    gamma_out: dict[str, list[Connector]]
    meta: dict = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        cells: list[Cell],
        connectors: list[Connector],
        nodes: list[TransshipmentNode] = (),
        conflict_groups: list[ConflictGroup] = (),
        meta: dict | None = None,
    ) -> "RoadNetwork":
        cell_map = {c.id: c for c in cells}
        if len(cell_map) != len(cells):
            raise InputError("duplicate cell ids")
        node_map = {n.id: n for n in nodes}
        all_connectors = list(connectors)
        all_nodes = dict(node_map)
        gadgets: dict[str, GadgetInfo] = {}
        for group in conflict_groups:
            for a, b in group.movements:
                if a not in cell_map or b not in cell_map:
                    raise InputError(
                        f"conflict group {group.id}: movement references "
                        f"unknown cell"
                    )
            g_nodes, g_conns = build_conflict_gadget(group, cell_map)
            for n in g_nodes:
                if n.id in all_nodes or n.id in cell_map:
                    raise InputError(f"gadget node id collision: {n.id}")
                all_nodes[n.id] = n
            all_connectors.extend(g_conns)
            if g_nodes:
                entries = tuple(
                    (c.tail, c.id) for c in g_conns
                    if c.head == g_nodes[0].id
                )
                exits = tuple(
                    (c.head, c.id) for c in g_conns
                    if c.tail == g_nodes[1].id
                )
                gadgets[group.id] = GadgetInfo(
                    group.id, g_nodes[0].id, g_nodes[1].id,
                    g_conns[0].id, entries, exits, group.gadget_capacity,
                )
        gamma_in: dict[str, list[Connector]] = defaultdict(list)
        gamma_out: dict[str, list[Connector]] = defaultdict(list)
        for conn in all_connectors:
            gamma_out[conn.tail].append(conn)
            gamma_in[conn.head].append(conn)
        return cls(
            cells=cell_map,
            connectors=all_connectors,
            nodes=all_nodes,
            conflict_groups=list(conflict_groups),
            gadgets=gadgets,
            declared_connectors=list(connectors),
            declared_nodes=list(nodes),
            gamma_in=dict(gamma_in),
            gamma_out=dict(gamma_out),
            meta=meta or {},
        )

    def source_cells(self) -> list[Cell]:
        return [c for c in self.cells.values() if c.kind == "source"]

    def sink_cells(self) -> list[Cell]:
        return [c for c in self.cells.values() if c.kind == "sink"]

    def conflict_connector_ids(self) -> list[str]:
        return [c.id for c in self.connectors if c.is_conflict]

    # ------------------------------------------------------------------
    # serialization (declared form only; gadgets are re-materialized)

    def to_json(self) -> str:
        doc = {
            "cells": [
                {
                    "id": c.id,
                    "kind": c.kind,
                    "max_occupancy": c.max_occupancy,
                    "flow_capacity": c.flow_capacity,
                    "lanes": c.lanes,
                }
                for c in self.cells.values()
            ],
            "connectors": [
                {"id": c.id, "from": c.tail, "to": c.head, "capacity": c.capacity}
                for c in self.declared_connectors
            ],
            "nodes": [
                {"id": n.id, "kind": n.kind} for n in self.declared_nodes
            ],
            "conflict_groups": [
                {
                    "id": g.id,
                    "movements": [list(m) for m in g.movements],
                    "gadget_capacity": g.gadget_capacity,
                }
                for g in self.conflict_groups
            ],
            "meta": self.meta,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RoadNetwork":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"network file is not valid JSON: {exc}") from exc
        try:
            cells = [
                Cell(d["id"], d["kind"], int(d["max_occupancy"]),
                     int(d["flow_capacity"]), int(d.get("lanes", 1)))
                for d in doc["cells"]
            ]
            connectors = [
                Connector(d["id"], d["from"], d["to"], int(d["capacity"]))
                for d in doc.get("connectors", [])
            ]
            nodes = [
                TransshipmentNode(d["id"], d["kind"])
                for d in doc.get("nodes", [])
            ]
            groups = [
                ConflictGroup(
                    d["id"],
                    tuple((m[0], m[1]) for m in d["movements"]),
                    int(d.get("gadget_capacity", 1)),
                )
                for d in doc.get("conflict_groups", [])
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed network description: {exc}") from exc
        return cls.build(cells, connectors, nodes, groups,
                         meta=doc.get("meta"))


def validate(network: RoadNetwork) -> ValidationReport:
    """Structural validation; returns a report instead of raising."""
    problems: list[str] = []
    cells, nodes = network.cells, network.nodes

    if not network.source_cells():
        problems.append("network has no source cell")
    if not network.sink_cells():
        problems.append("network has no sink cell")

    for cell in cells.values():
        problems.extend(cell.check())

    seen_pairs: dict[tuple[str, str], str] = {}
    for conn in network.connectors:
        for endpoint in (conn.tail, conn.head):
            if endpoint not in cells and endpoint not in nodes:
                problems.append(f"connector {conn.id}: dangling endpoint "
                                f"{endpoint!r}")
        if conn.tail == conn.head:
            problems.append(f"connector {conn.id}: self loop")
        if conn.capacity < 1:
            problems.append(f"connector {conn.id}: capacity must be >= 1")
        if conn.tail in cells and conn.head in cells:
            expected = min(cells[conn.tail].flow_capacity,
                           cells[conn.head].flow_capacity)
            if conn.capacity != expected:
                problems.append(
                    f"connector {conn.id}: capacity {conn.capacity} != "
                    f"min(Q_tail, Q_head) = {expected}"
                )
        key = (conn.tail, conn.head)
        head_is_upper = nodes.get(conn.head, None)
        parallel_ok = head_is_upper is not None and \
            head_is_upper.kind == "conflict_upper"
        if key in seen_pairs and not parallel_ok:
            problems.append(f"duplicate connector pair {key}")
        seen_pairs[key] = conn.id

    for node in nodes.values():
        n_in = len(network.gamma_in.get(node.id, []))
        n_out = len(network.gamma_out.get(node.id, []))
        if node.kind == "diverge" and not (n_in == 1 and n_out >= 1):
            problems.append(f"diverge node {node.id}: degree ({n_in}, {n_out})")
        elif node.kind == "merge" and not (n_in >= 1 and n_out == 1):
            problems.append(f"merge node {node.id}: degree ({n_in}, {n_out})")
        elif node.kind == "conflict_upper" and not (n_in >= 1 and n_out == 1):
            problems.append(f"conflict node {node.id}: degree "
                            f"({n_in}, {n_out})")
        elif node.kind == "conflict_lower" and not (n_in == 1 and n_out >= 1):
            problems.append(f"conflict node {node.id}: degree "
                            f"({n_in}, {n_out})")
        elif node.kind not in NODE_KINDS:
            problems.append(f"node {node.id}: unknown kind {node.kind!r}")

    for cell in cells.values():
        outs = network.gamma_out.get(cell.id, [])
        heads = {c.head for c in outs}
        if cell.kind == "sink":
            if outs:
                problems.append(f"sink cell {cell.id} has outbound connectors")
            continue
        if len(heads) == 0:
            problems.append(f"cell {cell.id} has no outbound connector")
        elif len(heads) > 1:
            problems.append(
                f"cell {cell.id} has outbound connectors to multiple targets "
                f"{sorted(heads)}; route choices belong to diverge nodes"
            )
        elif len(outs) > 1:
            head = next(iter(heads))
            if not (head in nodes and nodes[head].kind == "conflict_upper"):
                problems.append(f"cell {cell.id}: parallel connectors allowed "
                                f"only into a conflict gadget")

    # reachability: every source reaches at least one sink
    adjacency: dict[str, list[str]] = defaultdict(list)
    for conn in network.connectors:
        adjacency[conn.tail].append(conn.head)
    sinks = {c.id for c in network.sink_cells()}
    for src in network.source_cells():
        stack, seen = [src.id], {src.id}
        reached = False
        while stack:
            cur = stack.pop()
            if cur in sinks:
                reached = True
                break
            for nxt in adjacency.get(cur, []):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if not reached:
            problems.append(f"source cell {src.id} cannot reach any sink")

    return ValidationReport(ok=not problems, problems=problems)


def degree_statistics(network: RoadNetwork) -> DegreeSummary:
    """In/out connector degrees of every intersection structure.

    An intersection is a conflict gadget (counted once, over its cell-side
    connectors) or a standalone diverge/merge node.
    """
    degrees: dict[str, tuple[int, int]] = {}
    gadget_nodes = set()
    for info in network.gadgets.values():
        degrees[info.group_id] = (len(info.entries), len(info.exits))
        gadget_nodes.update((info.upper, info.lower))
    for node in network.nodes.values():
        if node.id in gadget_nodes:
            continue
        degrees[node.id] = (
            len(network.gamma_in.get(node.id, [])),
            len(network.gamma_out.get(node.id, [])),
        )
    histogram: dict[tuple[int, int], int] = defaultdict(int)
    for deg in degrees.values():
        histogram[deg] += 1
    return DegreeSummary(
        degrees=degrees,
        histogram=dict(histogram),
        uniform=len(histogram) <= 1,
    )
