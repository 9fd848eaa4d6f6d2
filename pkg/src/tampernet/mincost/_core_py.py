"""Pure-Python min-cost flow kernel.

Primal-dual method on a DAG: node potentials are seeded by a topological
relaxation (costs may be negative), then phases of Dijkstra over reduced
costs followed by a blocking flow on the zero-reduced-cost admissible
subgraph push flow from the single source to the single sink.

All arithmetic uses Python integers, so no cost magnitude can overflow.
The compiled kernel in ``_core.pyx`` implements the identical algorithm
with identical tie-breaking; both produce the same flow vector.
"""

from __future__ import annotations

import heapq

STATUS_OK = 0
STATUS_INFEASIBLE = 1


def solve_kernel(n, tails, heads, caps, costs, source, sink, total):
    """Return (flow list, status) for a single-source/single-sink problem."""
    m = len(tails)
    tails = [int(x) for x in tails]
    heads = [int(x) for x in heads]
    caps = [int(x) for x in caps]
    costs = [int(x) for x in costs]

    # residual arc e pairs with e ^ 1
    fro = [0] * (2 * m)
    to = [0] * (2 * m)
    res = [0] * (2 * m)
    cost = [0] * (2 * m)
    for a in range(m):
        fro[2 * a], to[2 * a] = tails[a], heads[a]
        res[2 * a], cost[2 * a] = caps[a], costs[a]
        fro[2 * a + 1], to[2 * a + 1] = heads[a], tails[a]
        cost[2 * a + 1] = -costs[a]
    adj = [[] for _ in range(n)]
    for e in range(2 * m):
        adj[fro[e]].append(e)

    # forward reachability from the source; residual moves never leave it
    reachable = [False] * n
    reachable[source] = True
    stack = [source]
    fwd = [[] for _ in range(n)]
    for a in range(m):
        fwd[tails[a]].append(a)
    while stack:
        u = stack.pop()
        for a in fwd[u]:
            v = heads[a]
            if not reachable[v]:
                reachable[v] = True
                stack.append(v)

    flow = [0] * m
    if total == 0:
        return flow, STATUS_OK
    if not reachable[sink]:
        return flow, STATUS_INFEASIBLE

    # topological order (Kahn) for the initial potentials
    indeg = [0] * n
    for a in range(m):
        indeg[heads[a]] += 1
    queue = [v for v in range(n) if indeg[v] == 0]
    topo = []
    while queue:
        u = queue.pop()
        topo.append(u)
        for a in fwd[u]:
            v = heads[a]
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if len(topo) != n:
        raise ValueError("kernel requires an acyclic graph")

    # Any tentative Dijkstra label is bounded by 5 * sum(|c|) (potentials
    # are true shortest distances, themselves bounded by sum(|c|) on a
    # DAG), so this sentinel behaves as infinity.
    big = 1 + 5 * sum(abs(c) for c in costs)
    pi = [0] * n
    known = [False] * n
    known[source] = True
    dist0 = [0] * n
    for u in topo:
        if not known[u]:
            continue
        for a in fwd[u]:
            v = heads[a]
            nd = dist0[u] + costs[a]
            if not known[v] or nd < dist0[v]:
                known[v] = True
                dist0[v] = nd
    for v in range(n):
        pi[v] = dist0[v] if known[v] else 0

    remaining = int(total)
    dist = [0] * n
    settled = [False] * n
    level = [0] * n
    ptr = [0] * n

    while remaining > 0:
        # Dijkstra over reduced costs on the residual network
        for v in range(n):
            dist[v] = big
            settled[v] = False
        dist[source] = 0
        heap = [(0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if settled[u] or d > dist[u]:
                continue
            settled[u] = True
            for e in adj[u]:
                if res[e] <= 0:
                    continue
                v = to[e]
                if not reachable[v]:
                    continue
                nd = d + cost[e] + pi[u] - pi[v]
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        if not settled[sink]:
            return flow, STATUS_INFEASIBLE
        dsink = dist[sink]
        for v in range(n):
            if reachable[v]:
                pi[v] += dist[v] if settled[v] and dist[v] < dsink else dsink

        # BFS levels over admissible (zero reduced cost) residual arcs
        for v in range(n):
            level[v] = -1
            ptr[v] = 0
        level[source] = 0
        queue = [source]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for e in adj[u]:
                v = to[e]
                if res[e] > 0 and level[v] < 0 and reachable[v] \
                        and cost[e] + pi[u] - pi[v] == 0:
                    level[v] = level[u] + 1
                    queue.append(v)

        # blocking flow (iterative DFS with current-arc pointers)
        path: list[int] = []
        u = source
        while True:
            if u == sink:
                push = remaining
                for e in path:
                    if res[e] < push:
                        push = res[e]
                for e in path:
                    res[e] -= push
                    res[e ^ 1] += push
                remaining -= push
                if remaining == 0:
                    break
                path = []
                u = source
                continue
            advanced = False
            while ptr[u] < len(adj[u]):
                e = adj[u][ptr[u]]
                v = to[e]
                if res[e] > 0 and level[v] == level[u] + 1 \
                        and cost[e] + pi[u] - pi[v] == 0:
                    path.append(e)
                    u = v
                    advanced = True
                    break
                ptr[u] += 1
            if not advanced:
                if u == source:
                    break
                level[u] = -1
                e = path.pop()
                u = fro[e]
                ptr[u] += 1

    for a in range(m):
        flow[a] = res[2 * a + 1]
    return flow, STATUS_OK
