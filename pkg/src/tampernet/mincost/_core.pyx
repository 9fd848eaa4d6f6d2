# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled min-cost flow kernel.

Same primal-dual algorithm and tie-breaking as ``_core_py``; int64
arithmetic throughout.  The wrapper guarantees cost magnitudes small
enough that no intermediate label can overflow (see the 5 * sum(|c|)
bound in the pure kernel).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

STATUS_OK = 0
STATUS_INFEASIBLE = 1


def solve_kernel(Py_ssize_t n,
                 cnp.int64_t[::1] tails,
                 cnp.int64_t[::1] heads,
                 cnp.int64_t[::1] caps,
                 cnp.int64_t[::1] costs,
                 Py_ssize_t source,
                 Py_ssize_t sink,
                 long long total):
    cdef Py_ssize_t m = tails.shape[0]
    cdef Py_ssize_t a, e, u, v, qi, hsize, i, parent, child, best
    cdef long long d, nd, push, remaining, dsink, big

    flow_arr = np.zeros(m, dtype=np.int64)
    cdef cnp.int64_t[::1] flow = flow_arr
    if total == 0:
        return flow_arr, STATUS_OK

    fro_arr = np.empty(2 * m, dtype=np.int64)
    to_arr = np.empty(2 * m, dtype=np.int64)
    res_arr = np.empty(2 * m, dtype=np.int64)
    cost_arr = np.empty(2 * m, dtype=np.int64)
    cdef cnp.int64_t[::1] fro = fro_arr
    cdef cnp.int64_t[::1] to = to_arr
    cdef cnp.int64_t[::1] res = res_arr
    cdef cnp.int64_t[::1] cost = cost_arr

    big = 1
    for a in range(m):
        fro[2 * a] = tails[a]
        to[2 * a] = heads[a]
        res[2 * a] = caps[a]
        cost[2 * a] = costs[a]
        fro[2 * a + 1] = heads[a]
        to[2 * a + 1] = tails[a]
        res[2 * a + 1] = 0
        cost[2 * a + 1] = -costs[a]
        big += 5 * (costs[a] if costs[a] >= 0 else -costs[a])

    # CSR adjacency over residual arcs, in residual-arc index order
    deg_arr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] start = deg_arr
    for e in range(2 * m):
        start[fro[e] + 1] += 1
    for u in range(n):
        start[u + 1] += start[u]
    adj_arr = np.empty(2 * m, dtype=np.int64)
    cdef cnp.int64_t[::1] adj = adj_arr
    fill_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] fill = fill_arr
    for e in range(2 * m):
        u = fro[e]
        adj[start[u] + fill[u]] = e
        fill[u] += 1

    reach_arr = np.zeros(n, dtype=np.int8)
    cdef cnp.int8_t[::1] reachable = reach_arr
    stack_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t sp = 0
    reachable[source] = 1
    stack[sp] = source
    sp = 1
    while sp > 0:
        sp -= 1
        u = stack[sp]
        for i in range(start[u], start[u + 1]):
            e = adj[i]
            if e & 1:
                continue
            v = to[e]
            if not reachable[v]:
                reachable[v] = 1
                stack[sp] = v
                sp += 1
    if not reachable[sink]:
        return flow_arr, STATUS_INFEASIBLE

    # topological order for initial potentials
    indeg_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] indeg = indeg_arr
    for a in range(m):
        indeg[heads[a]] += 1
    topo_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] topo = topo_arr
    cdef Py_ssize_t tn = 0
    sp = 0
    for v in range(n):
        if indeg[v] == 0:
            stack[sp] = v
            sp += 1
    while sp > 0:
        sp -= 1
        u = stack[sp]
        topo[tn] = u
        tn += 1
        for i in range(start[u], start[u + 1]):
            e = adj[i]
            if e & 1:
                continue
            v = to[e]
            indeg[v] -= 1
            if indeg[v] == 0:
                stack[sp] = v
                sp += 1
    if tn != n:
        raise ValueError("kernel requires an acyclic graph")

    pi_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] pi = pi_arr
    known_arr = np.zeros(n, dtype=np.int8)
    cdef cnp.int8_t[::1] known = known_arr
    dist_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    known[source] = 1
    for i in range(n):
        u = topo[i]
        if not known[u]:
            continue
        for qi in range(start[u], start[u + 1]):
            e = adj[qi]
            if e & 1:
                continue
            v = to[e]
            nd = dist[u] + cost[e]
            if not known[v] or nd < dist[v]:
                known[v] = 1
                dist[v] = nd
    for v in range(n):
        pi[v] = dist[v] if known[v] else 0

    settled_arr = np.zeros(n, dtype=np.int8)
    cdef cnp.int8_t[::1] settled = settled_arr
    level_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] level = level_arr
    ptr_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] ptr = ptr_arr
    # binary heap of (dist, node); keys are unique per node
    hd_arr = np.empty(2 * m + n + 2, dtype=np.int64)
    hn_arr = np.empty(2 * m + n + 2, dtype=np.int64)
    cdef cnp.int64_t[::1] hd = hd_arr
    cdef cnp.int64_t[::1] hn = hn_arr
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    path_arr = np.empty(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] path = path_arr
    cdef Py_ssize_t pathlen, qn
    cdef long long hdist
    cdef Py_ssize_t hnode
    cdef bint advanced

    remaining = total
    while remaining > 0:
        for v in range(n):
            dist[v] = big
            settled[v] = 0
        dist[source] = 0
        hsize = 0
        hd[0] = 0
        hn[0] = source
        hsize = 1
        while hsize > 0:
            hdist = hd[0]
            hnode = hn[0]
            hsize -= 1
            hd[0] = hd[hsize]
            hn[0] = hn[hsize]
            parent = 0
            while True:
                child = 2 * parent + 1
                if child >= hsize:
                    break
                if child + 1 < hsize and (
                        hd[child + 1] < hd[child]
                        or (hd[child + 1] == hd[child]
                            and hn[child + 1] < hn[child])):
                    child += 1
                if hd[child] < hd[parent] or (
                        hd[child] == hd[parent] and hn[child] < hn[parent]):
                    hd[parent], hd[child] = hd[child], hd[parent]
                    hn[parent], hn[child] = hn[child], hn[parent]
                    parent = child
                else:
                    break
            u = hnode
            if settled[u] or hdist > dist[u]:
                continue
            settled[u] = 1
            d = hdist
            for i in range(start[u], start[u + 1]):
                e = adj[i]
                if res[e] <= 0:
                    continue
                v = to[e]
                if not reachable[v]:
                    continue
                nd = d + cost[e] + pi[u] - pi[v]
                if nd < dist[v]:
                    dist[v] = nd
                    child = hsize
                    hd[child] = nd
                    hn[child] = v
                    hsize += 1
                    while child > 0:
                        parent = (child - 1) >> 1
                        if hd[child] < hd[parent] or (
                                hd[child] == hd[parent]
                                and hn[child] < hn[parent]):
                            hd[parent], hd[child] = hd[child], hd[parent]
                            hn[parent], hn[child] = hn[child], hn[parent]
                            child = parent
                        else:
                            break
        if not settled[sink]:
            return flow_arr, STATUS_INFEASIBLE
        dsink = dist[sink]
        for v in range(n):
            if reachable[v]:
                if settled[v] and dist[v] < dsink:
                    pi[v] += dist[v]
                else:
                    pi[v] += dsink

        for v in range(n):
            level[v] = -1
            ptr[v] = 0
        level[source] = 0
        queue[0] = source
        qn = 1
        qi = 0
        while qi < qn:
            u = queue[qi]
            qi += 1
            for i in range(start[u], start[u + 1]):
                e = adj[i]
                v = to[e]
                if res[e] > 0 and level[v] < 0 and reachable[v] \
                        and cost[e] + pi[u] - pi[v] == 0:
                    level[v] = level[u] + 1
                    queue[qn] = v
                    qn += 1

        pathlen = 0
        u = source
        while True:
            if u == sink:
                push = remaining
                for i in range(pathlen):
                    e = path[i]
                    if res[e] < push:
                        push = res[e]
                for i in range(pathlen):
                    e = path[i]
                    res[e] -= push
                    res[e ^ 1] += push
                remaining -= push
                if remaining == 0:
                    break
                pathlen = 0
                u = source
                continue
            advanced = False
            while ptr[u] < start[u + 1] - start[u]:
                e = adj[start[u] + ptr[u]]
                v = to[e]
                if res[e] > 0 and level[v] == level[u] + 1 \
                        and cost[e] + pi[u] - pi[v] == 0:
                    path[pathlen] = e
                    pathlen += 1
                    u = v
                    advanced = True
                    break
                ptr[u] += 1
            if not advanced:
                if u == source:
                    break
                level[u] = -1
                pathlen -= 1
                e = path[pathlen]
                u = fro[e]
                ptr[u] += 1

    for a in range(m):
        flow[a] = res[2 * a + 1]
    return flow_arr, STATUS_OK
