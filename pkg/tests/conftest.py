"""Shared desk-scale instances used across the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from tampernet.network import Cell, ConflictGroup, Connector, RoadNetwork
from tampernet.supergraph import DemandProfile, Horizon, expand


def build_chain(steps: int = 5, arrivals=(2,), n_occ: int = 5,
                q: int = 1):
    """Three-cell chain: source a -> ordinary b -> sink c."""
    cells = [
        Cell("a", "source", n_occ, q),
        Cell("b", "ordinary", n_occ, q),
        Cell("c", "sink", n_occ, q),
    ]
    connectors = [
        Connector("ab", "a", "b", q),
        Connector("bc", "b", "c", q),
    ]
    network = RoadNetwork.build(cells, connectors)
    arr = np.zeros(steps, dtype=np.int64)
    for t, d in enumerate(arrivals):
        arr[t] = d
    demand = DemandProfile({"a": arr})
    return network, expand(network, Horizon(steps), demand)


def build_crossing(steps: int = 6, arrivals_a=(1, 1), arrivals_b=(1, 1),
                   n_mid: int = 2, n_sink: int = 1):
    """Two one-cell approaches crossing through a single conflict gadget."""
    cells = [
        Cell("ra", "source", 5, 1),
        Cell("a", "ordinary", n_mid, 1),
        Cell("sa", "sink", n_sink, 1),
        Cell("rb", "source", 5, 1),
        Cell("b", "ordinary", n_mid, 1),
        Cell("sb", "sink", n_sink, 1),
    ]
    connectors = [
        Connector("raa", "ra", "a", 1),
        Connector("rbb", "rb", "b", 1),
    ]
    groups = [ConflictGroup("x", (("a", "sa"), ("b", "sb")))]
    network = RoadNetwork.build(cells, connectors, conflict_groups=groups)
    arr_a = np.zeros(steps, dtype=np.int64)
    arr_b = np.zeros(steps, dtype=np.int64)
    for t, d in enumerate(arrivals_a):
        arr_a[t] = d
    for t, d in enumerate(arrivals_b):
        arr_b[t] = d
    demand = DemandProfile({"ra": arr_a, "rb": arr_b})
    return network, expand(network, Horizon(steps), demand)


def random_micro_instance(rng: np.random.Generator):
    """Random instance within enumeration bounds (<= 2 gadgets, small)."""
    steps = int(rng.integers(4, 9))
    n_gadgets = int(rng.integers(1, 3))
    n_mid = int(rng.integers(1, 4))
    n_sink = int(rng.integers(1, 3))
    cells = []
    connectors = []
    groups = []
    arrivals = {}
    total = 0
    budget = 4
    for k in range(n_gadgets):
        cells += [
            Cell(f"r{k}a", "source", 5, 1),
            Cell(f"{k}a", "ordinary", n_mid, 1),
            Cell(f"s{k}a", "sink", n_sink, 1),
            Cell(f"r{k}b", "source", 5, 1),
            Cell(f"{k}b", "ordinary", n_mid, 1),
            Cell(f"s{k}b", "sink", n_sink, 1),
        ]
        connectors += [
            Connector(f"r{k}a>", f"r{k}a", f"{k}a", 1),
            Connector(f"r{k}b>", f"r{k}b", f"{k}b", 1),
        ]
        groups.append(
            ConflictGroup(f"x{k}", ((f"{k}a", f"s{k}a"),
                                    (f"{k}b", f"s{k}b")))
        )
        for side in "ab":
            arr = np.zeros(steps, dtype=np.int64)
            n_veh = int(rng.integers(0, min(3, budget - total) + 1))
            for _ in range(n_veh):
                arr[int(rng.integers(0, max(1, steps - 2)))] += 1
            total += n_veh
            arrivals[f"r{k}{side}"] = arr
    if total == 0:
        arrivals[f"r0a"][0] = 1
    network = RoadNetwork.build(cells, connectors, conflict_groups=groups)
    g = expand(network, Horizon(steps), DemandProfile(arrivals))
    return network, g


def oracle_min_cost(g, costs) -> int:
    """Exhaustive minimum-cost value by topological enumeration.

    Memoized on (position, pending inflows); shares no code with the
    solver kernels.  Only for desk-scale instances.
    """
    from tampernet.supergraph import to_dag_order

    order = to_dag_order(g)
    n = g.n_nodes
    out_arcs = [[] for _ in range(n)]
    for a in range(g.n_arcs):
        out_arcs[int(g.tails[a])].append(a)
    caps = [int(c) for c in g.caps]
    heads = [int(h) for h in g.heads]
    cost = [int(c) for c in costs]
    inflow = [0] * n
    inflow[g.R] = g.demand_total
    INF = float("inf")
    memo = {}

    def best_suffix(pos):
        if pos == n - 1:
            return 0
        key = (pos, tuple(inflow[int(order[i])] for i in range(pos, n)))
        if key in memo:
            return memo[key]
        u = int(order[pos])
        arcs = out_arcs[u]
        best = [INF]

        def split(i, left, acc):
            if i == len(arcs):
                if left == 0:
                    sub = best_suffix(pos + 1)
                    if sub is not None and acc + sub < best[0]:
                        best[0] = acc + sub
                return
            a = arcs[i]
            rest = sum(caps[k] for k in arcs[i + 1:])
            for q in range(max(0, left - rest), min(caps[a], left) + 1):
                inflow[heads[a]] += q
                split(i + 1, left - q, acc + q * cost[a])
                inflow[heads[a]] -= q

        split(0, inflow[u], 0)
        result = None if best[0] == INF else best[0]
        memo[key] = result
        return result

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * (n + g.n_arcs) + 100))
    try:
        value = best_suffix(0)
    finally:
        sys.setrecursionlimit(old)
    assert value is not None, "oracle found no feasible flow"
    return value


@pytest.fixture
def chain():
    return build_chain()


@pytest.fixture
def crossing():
    return build_crossing()
