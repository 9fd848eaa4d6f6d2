"""Time expansion of a road network into a static capacitated flow graph.

Each cell/time pair becomes two graph nodes: an *arrival* node where
inbound flow lands and an *departure* node drained by the cell's outbound
connectors.  The arc between them carries the cell occupancy (bounded by
the jam density N), the arc from departure at t to arrival at t+1 carries
the vehicles that stay put (the slack), and connector arcs advance
vehicles to the next layer.  A super-source R feeds the source cells with
the exogenous arrivals and a super-sink S collects sink-cell exits plus a
final uncapacitated residual layer so every demand pattern is feasible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, InvariantError
from .network import RoadNetwork

# arc classes
OCCUPANCY = 0
SLACK = 1
CONNECTOR = 2
CONFLICT = 3
SOURCE = 4
SINK = 5
RESIDUAL = 6

CLASS_NAMES = {
    OCCUPANCY: "occupancy",
    SLACK: "slack",
    CONNECTOR: "connector",
    CONFLICT: "conflict",
    SOURCE: "source",
    SINK: "sink",
    RESIDUAL: "residual",
}


@dataclass(frozen=True)
class Horizon:
    steps: int
    delta_tau: float = 2.0

    def __post_init__(self):
        if self.steps < 1:
            raise InputError("horizon must have at least one step")
        if self.delta_tau <= 0:
            raise InputError("delta_tau must be positive")


@dataclass
class DemandProfile:
    """Integer arrivals per source cell and time step."""

    arrivals: dict[str, np.ndarray]

    @property
    def total(self) -> int:
        return int(sum(int(a.sum()) for a in self.arrivals.values()))

    def check(self, network: RoadNetwork, horizon: Horizon) -> None:
        source_ids = {c.id for c in network.source_cells()}
        for cell_id, arr in self.arrivals.items():
            if cell_id not in source_ids:
                raise InputError(f"demand declared on non-source cell "
                                 f"{cell_id!r}")
            if len(arr) != horizon.steps:
                raise InputError(f"demand for {cell_id!r} has {len(arr)} "
                                 f"entries, expected {horizon.steps}")
            if (arr < 0).any():
                raise InputError(f"negative demand entry for {cell_id!r}")


@dataclass
class SuperGraph:
    """Static time-expanded graph with per-arc metadata.

    Arc arrays are parallel; ``arc_class``/``arc_obj``/``arc_t`` identify
    the (class, object, time) key of every arc.  Node 0 is the
    super-source R, node 1 the super-sink S.
    """

    n_nodes: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray
    arc_class: np.ndarray
    arc_obj: list[str]
    arc_t: np.ndarray
    node_labels: list[str]
    demand_total: int
    horizon: Horizon
    network: RoadNetwork
    R: int = 0
    S: int = 1
    _arc_index: dict | None = field(default=None, repr=False)

    @property
    def n_arcs(self) -> int:
        return len(self.tails)

    def supplies(self) -> np.ndarray:
        b = np.zeros(self.n_nodes, dtype=np.int64)
        b[self.R] = self.demand_total
        b[self.S] = -self.demand_total
        return b

    def class_mask(self, *classes: int) -> np.ndarray:
        mask = np.zeros(self.n_arcs, dtype=bool)
        for cls in classes:
            mask |= self.arc_class == cls
        return mask

    @property
    def sink_mask(self) -> np.ndarray:
        return self.class_mask(SINK)

    @property
    def conflict_mask(self) -> np.ndarray:
        return self.class_mask(CONFLICT)

    @property
    def nonsink_mask(self) -> np.ndarray:
        """Arcs not terminating in the super-sink."""
        return ~self.class_mask(SINK, RESIDUAL)

    def arc_index(self, cls: int, obj: str, t: int) -> int:
        if self._arc_index is None:
            idx = {}
            for a in range(self.n_arcs):
                idx[(int(self.arc_class[a]), self.arc_obj[a],
                     int(self.arc_t[a]))] = a
            self._arc_index = idx
        return self._arc_index[(cls, obj, t)]

    def export_edge_list(self, flows: np.ndarray | None = None) -> str:
        """Stable text dump: `tail head capacity class object_id t`."""
        lines = []
        for a in range(self.n_arcs):
            row = (f"{self.node_labels[self.tails[a]]} "
                   f"{self.node_labels[self.heads[a]]} "
                   f"{self.caps[a]} {CLASS_NAMES[int(self.arc_class[a])]} "
                   f"{self.arc_obj[a]} {self.arc_t[a]}")
            if flows is not None:
                row += f" {int(flows[a])}"
            lines.append(row)
        return "\n".join(lines) + "\n"


def expand(network: RoadNetwork, horizon: Horizon,
           demand: DemandProfile,
           sink_capacity_policy: str = "uncapacitated") -> SuperGraph:
    """Expand a validated network over the horizon.

    Source cells are treated as uncapacitated vertical queues (their
    occupancy and slack bounds are lifted to the total demand) so the
    full demand can always enter the system.  Sink arcs follow the
    requested policy; final-layer residual arcs guarantee feasibility.
    """
    demand.check(network, horizon)
    if sink_capacity_policy not in ("uncapacitated", "bounded"):
        raise InputError(f"unknown sink policy {sink_capacity_policy!r}")
    T = horizon.steps
    D = demand.total
    big = max(D, 1)

    cells = list(network.cells.values())
    nodes = list(network.nodes.values())

    labels = ["R", "S"]
    index: dict[tuple[str, str, int], int] = {}

    def add_node(kind: str, obj: str, t: int) -> None:
        index[(kind, obj, t)] = len(labels)
        labels.append(f"{kind}:{obj}:{t}")

    for cell in cells:
        for t in range(T + 1):
            add_node("arr", cell.id, t)
        for t in range(T):
            add_node("dep", cell.id, t)
    for node in nodes:
        for t in range(T):
            add_node("nd", node.id, t)

    arr = lambda i, t: index[("arr", i, t)]
    dep = lambda i, t: index[("dep", i, t)]
    nd = lambda i, t: index[("nd", i, t)]

    tails: list[int] = []
    heads: list[int] = []
    caps: list[int] = []
    arc_class: list[int] = []
    arc_obj: list[str] = []
    arc_t: list[int] = []

    def add_arc(u: int, v: int, cap: int, cls: int, obj: str, t: int) -> None:
        tails.append(u)
        heads.append(v)
        caps.append(cap)
        arc_class.append(cls)
        arc_obj.append(obj)
        arc_t.append(t)

    # source arcs R -> arr(i, t), capacity = arrivals
    for cell in cells:
        if cell.kind != "source":
            continue
        arrivals = demand.arrivals.get(cell.id)
        if arrivals is None:
            continue
        for t in range(T):
            d = int(arrivals[t])
            if d > 0:
                add_arc(0, arr(cell.id, t), d, SOURCE, cell.id, t)

    # occupancy and slack arcs
    for cell in cells:
        bound = big if cell.kind == "source" else cell.max_occupancy
        for t in range(T):
            add_arc(arr(cell.id, t), dep(cell.id, t), bound,
                    OCCUPANCY, cell.id, t)
        for t in range(T):
            add_arc(dep(cell.id, t), arr(cell.id, t + 1), bound,
                    SLACK, cell.id, t)

    # connector arcs (cell->cell, cell->node, node->node, node->cell)
    cell_ids = set(network.cells)
    for conn in network.connectors:
        tail_is_cell = conn.tail in cell_ids
        head_is_cell = conn.head in cell_ids
        cls = CONFLICT if conn.is_conflict else CONNECTOR
        for t in range(T):
            u = dep(conn.tail, t) if tail_is_cell else nd(conn.tail, t)
            v = arr(conn.head, t + 1) if head_is_cell else nd(conn.head, t)
            add_arc(u, v, conn.capacity, cls, conn.id, t)

    # sink arcs
    for cell in cells:
        if cell.kind != "sink":
            continue
        cap = big if sink_capacity_policy == "uncapacitated" \
            else cell.max_occupancy
        for t in range(T):
            add_arc(dep(cell.id, t), 1, cap, SINK, cell.id, t)

    # residual arcs: final layer of every cell drains to S
    for cell in cells:
        add_arc(arr(cell.id, T), 1, big, RESIDUAL, cell.id, T)

    return SuperGraph(
        n_nodes=len(labels),
        tails=np.asarray(tails, dtype=np.int64),
        heads=np.asarray(heads, dtype=np.int64),
        caps=np.asarray(caps, dtype=np.int64),
        arc_class=np.asarray(arc_class, dtype=np.int8),
        arc_obj=arc_obj,
        arc_t=np.asarray(arc_t, dtype=np.int32),
        node_labels=labels,
        demand_total=D,
        horizon=horizon,
        network=network,
    )


def incidence_check(g: SuperGraph) -> bool:
    """True iff every arc has one valid tail and head and supplies sum to 0."""
    n = g.n_nodes
    if g.n_arcs == 0:
        return int(g.supplies().sum()) == 0
    ok_range = bool(
        (g.tails >= 0).all() and (g.tails < n).all()
        and (g.heads >= 0).all() and (g.heads < n).all()
        and (g.tails != g.heads).all()
    )
    return ok_range and int(g.supplies().sum()) == 0


def conflict_arcs(g: SuperGraph) -> list[tuple[str, int, int]]:
    """All gadget metering arc copies as (connector id, t, arc index)."""
    out = []
    for a in np.flatnonzero(g.conflict_mask):
        out.append((g.arc_obj[a], int(g.arc_t[a]), int(a)))
    return out


def to_dag_order(g: SuperGraph) -> np.ndarray:
    """Topological ordering of the nodes; raises on a cycle.

    The super-source is seeded first so it heads the order.
    """
    if not incidence_check(g):
        raise InvariantError("incidence check failed before ordering")
    n = g.n_nodes
    indeg = np.zeros(n, dtype=np.int64)
    np.add.at(indeg, g.heads, 1)
    order_out = np.argsort(g.tails, kind="stable")
    starts = np.searchsorted(g.tails[order_out], np.arange(n))
    ends = np.searchsorted(g.tails[order_out], np.arange(n), side="right")

    ready = deque([g.R])
    ready.extend(v for v in range(n) if indeg[v] == 0 and v != g.R)
    order = []
    while ready:
        u = ready.popleft()
        order.append(u)
        for a in order_out[starts[u]:ends[u]]:
            v = int(g.heads[a])
            indeg[v] -= 1
            if indeg[v] == 0:
                ready.append(v)
    if len(order) != n:
        raise InvariantError("cycle detected in super-graph")
    return np.asarray(order, dtype=np.int64)


def rate_to_arrivals(rate_veh_per_hr: float, horizon: Horizon) -> np.ndarray:
    """Cumulative-rounding discretization of an hourly rate."""
    if rate_veh_per_hr < 0:
        raise InputError("demand rate must be non-negative")
    t = np.arange(horizon.steps + 1, dtype=np.float64)
    cumulative = np.floor(t * rate_veh_per_hr * horizon.delta_tau / 3600.0)
    return np.diff(cumulative).astype(np.int64)
