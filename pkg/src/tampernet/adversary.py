"""Bi-objective signal tampering: impact versus noticeability.

The attacker minimizes two objectives over feasible integral flows:
the throughput deviation from the reference optimal control (impact,
non-positive) and the number of gadget metering decisions changed from
the reference (noticeability, non-negative).  Because metering flows are
binary under unit gadget capacities, both objectives are exact linear
functions of the flow, so every weighted-sum problem stays a pure
min-cost flow and the complete set of extreme supported nondominated
points is enumerated by recursive segment subdivision with lexicographic
tie-breaking toward minimum impact.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass, field

import numpy as np

from .control import OptimalSolution, SignalSchedule, infer_signal_schedule
from .errors import InputError, InvariantError
from .mincost import IntegralFlow, check_feasible, solve_lexicographic
from .supergraph import SuperGraph, to_dag_order


@dataclass
class ObjectiveEncoding:
    """Arc-cost realizations of the two objectives.

    For any feasible flow x:
      impact(x)        = z1_costs . x + z1_const   (= throughput deviation)
      noticeability(x) = z2_costs . x + z2_const   (= metering L1 distance)
    """

    z1_costs: np.ndarray
    z1_const: int
    z2_costs: np.ndarray
    z2_const: int
    z1_bound: int  # valid range bound for lexicographic weighting
    z2_bound: int

    def z1(self, flow: IntegralFlow) -> int:
        return flow.dot(self.z1_costs) + self.z1_const

    def z2(self, flow: IntegralFlow) -> int:
        return flow.dot(self.z2_costs) + self.z2_const


def encode_objectives(opt: OptimalSolution, g: SuperGraph) -> ObjectiveEncoding:
    conflict_idx = np.flatnonzero(g.conflict_mask)
    ref = opt.conflict_flows
    if not np.isin(ref, (0, 1)).all() or (g.caps[conflict_idx] != 1).any():
        raise InputError(
            "noticeability encoding requires binary metering flows "
            "(unit gadget capacities)"
        )
    z1_costs = g.sink_mask.astype(np.int64)
    z1_const = -int(opt.sink_flows.sum())
    z2_costs = np.zeros(g.n_arcs, dtype=np.int64)
    z2_costs[conflict_idx] = np.where(ref == 1, -1, 1)
    z2_const = int(ref.sum())
    return ObjectiveEncoding(
        z1_costs=z1_costs,
        z1_const=z1_const,
        z2_costs=z2_costs,
        z2_const=z2_const,
        z1_bound=g.demand_total * g.horizon.steps + 1,
        z2_bound=len(conflict_idx) + 1,
    )


@dataclass
class ParetoPoint:
    z1: int
    z2: int
    witness: IntegralFlow
    schedule: SignalSchedule


@dataclass
class ParetoFrontier:
    points: list[ParetoPoint]  # sorted by z2 ascending
    provenance: list[dict] = field(default_factory=list)

    def pairs(self) -> list[tuple[int, int]]:
        return [(p.z1, p.z2) for p in self.points]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["z2", "z1", "abs_z1", "witness_id"])
        for k, p in enumerate(self.points):
            writer.writerow([p.z2, p.z1, abs(p.z1), f"w{k:03d}"])
        return buf.getvalue()


def evaluate_attack(witness: IntegralFlow, opt: OptimalSolution,
                    g: SuperGraph) -> tuple[int, int, SignalSchedule]:
    """Recompute both objectives from raw flows, never from solver output."""
    flows = witness.flows
    problems = check_feasible(g, flows)
    if problems:
        raise InputError(f"witness flow infeasible: {problems}")
    z1 = int(flows[g.sink_mask].sum()) - int(opt.sink_flows.sum())
    z2 = int(np.abs(flows[g.conflict_mask] - opt.conflict_flows).sum())
    schedule = infer_signal_schedule(flows, g.network, g)
    return z1, z2, schedule


def _solve_point(g, primary, secondary, bound, opt):
    flow = solve_lexicographic(g, primary, secondary, bound)
    z1, z2, schedule = evaluate_attack(flow, opt, g)
    return ParetoPoint(z1=z1, z2=z2, witness=flow, schedule=schedule)


def pareto_frontier(g: SuperGraph, opt: OptimalSolution) -> ParetoFrontier:
    """All extreme supported nondominated (z1, z2) points.

    Initialization takes the two lexicographic corner points; each
    candidate segment is probed with weights equal to its axis spans and
    the weighted optimum broken toward minimum z1.  A segment whose probe
    reproduces an endpoint is final; otherwise the probe point splits it.
    Segments are processed FIFO so the provenance log is deterministic.
    """
    enc = encode_objectives(opt, g)
    provenance: list[dict] = []

    p1 = _solve_point(g, enc.z1_costs, enc.z2_costs, enc.z2_bound, opt)
    p2 = _solve_point(g, enc.z2_costs, enc.z1_costs, enc.z1_bound, opt)
    provenance.append({"event": "init", "max_impact": [p1.z1, p1.z2],
                       "min_notice": [p2.z1, p2.z2]})
    if (p1.z1, p1.z2) == (p2.z1, p2.z2):
        return ParetoFrontier(points=[p1], provenance=provenance)

    points: dict[int, ParetoPoint] = {1: p1, 2: p2}
    segments: list[tuple[int, int]] = [(1, 2)]
    finals: list[tuple[int, int]] = []
    next_id = 3
    while segments:
        r, s = segments.pop(0)
        pr, ps = points[r], points[s]
        w1 = abs(ps.z2 - pr.z2)
        w2 = abs(ps.z1 - pr.z1)
        if w1 <= 0 or w2 <= 0:
            raise InvariantError("degenerate frontier segment weights")
        weighted = (w1 * enc.z1_costs.astype(object)
                    + w2 * enc.z2_costs.astype(object))
        cand = _solve_point(g, weighted, enc.z1_costs, enc.z1_bound, opt)
        entry = {
            "event": "segment",
            "endpoints": [[pr.z1, pr.z2], [ps.z1, ps.z2]],
            "weights": [w1, w2],
            "candidate": [cand.z1, cand.z2],
        }
        if (cand.z1, cand.z2) in ((pr.z1, pr.z2), (ps.z1, ps.z2)):
            entry["accepted"] = False
            finals.append((r, s))
        else:
            entry["accepted"] = True
            lo, hi = sorted((pr.z2, ps.z2))
            if not (lo < cand.z2 < hi):
                raise InvariantError(
                    "weighted probe left its segment; frontier would be "
                    "unsorted"
                )
            points[next_id] = cand
            segments.append((r, next_id))
            segments.append((next_id, s))
            next_id += 1
        provenance.append(entry)

    ordered = sorted(points.values(), key=lambda p: p.z2)
    return ParetoFrontier(points=ordered, provenance=provenance)


# ----------------------------------------------------------------------
# brute-force oracle

def _lower_left_extremes(pairs: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Extreme points of the lower-left hull of the nondominated set."""
    if not pairs:
        return set()
    by_z2: dict[int, int] = {}
    for z1, z2 in pairs:
        if z2 not in by_z2 or z1 < by_z2[z2]:
            by_z2[z2] = z1
    best = None
    nondom = []
    for z2 in sorted(by_z2):
        z1 = by_z2[z2]
        if best is None or z1 < best:
            nondom.append((z2, z1))
            best = z1
    # lower hull over (z2, z1); strict turns drop collinear interiors
    hull: list[tuple[int, int]] = []
    for p in nondom:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return {(z1, z2) for z2, z1 in hull}


def _prune_nondominated(pairs) -> tuple[tuple[int, int], ...]:
    """Nondominated subset of (z1, z2) pairs (min z1 per z2, Pareto scan)."""
    by_z2: dict[int, int] = {}
    for z1, z2 in pairs:
        if z2 not in by_z2 or z1 < by_z2[z2]:
            by_z2[z2] = z1
    out: list[tuple[int, int]] = []
    best = None
    for z2 in sorted(by_z2):
        z1 = by_z2[z2]
        if best is None or z1 < best:
            out.append((z1, z2))
            best = z1
    return tuple(out)


def brute_force_frontier(g: SuperGraph, opt: OptimalSolution,
                         state_limit: int = 2_000_000
                         ) -> set[tuple[int, int]]:
    """Exhaustive enumeration oracle for desk-scale instances.

    Walks nodes in topological order, distributing each node's inflow
    over its outbound arcs in every capacity-feasible way.  Work is
    organized as a memoized suffix recursion: the value of a state
    (position, pending inflows at unprocessed nodes) is the set of
    objective-pair contributions achievable by the remaining arcs,
    pruned to its nondominated subset.  The pruning is exact because
    contributions are additive and the already-fixed prefix is constant
    within a state, so a dominated suffix can never complete to a
    nondominated total.  Independent of the min-cost solver by
    construction.
    """
    order = to_dag_order(g)
    n, m = g.n_nodes, g.n_arcs
    out_arcs: list[list[int]] = [[] for _ in range(n)]
    for a in range(m):
        out_arcs[int(g.tails[a])].append(a)
    caps = [int(c) for c in g.caps]
    heads = [int(h) for h in g.heads]
    conflict_idx = np.flatnonzero(g.conflict_mask)
    ref_conf = {int(a): int(v)
                for a, v in zip(conflict_idx, opt.conflict_flows)}
    opt_sink_total = int(opt.sink_flows.sum())
    sink_arcs = set(np.flatnonzero(g.sink_mask).tolist())

    node_pos = {int(v): i for i, v in enumerate(order)}
    if node_pos[g.S] != n - 1:
        raise InvariantError("super-sink is not last in topological order")

    inflow = [0] * n
    inflow[g.R] = g.demand_total
    memo: dict[tuple, tuple[tuple[int, int], ...]] = {}
    counter = [0]

    def suffix_pairs(pos: int) -> tuple[tuple[int, int], ...]:
        if pos == n - 1:  # the super-sink, last in topological order
            return ((0, 0),)
        key = (pos, tuple(inflow[int(order[i])] for i in range(pos, n)))
        hit = memo.get(key)
        if hit is not None:
            return hit
        counter[0] += 1
        if counter[0] > state_limit:
            raise InputError(
                f"oracle state limit {state_limit} exceeded; instance too "
                f"large for exhaustive enumeration"
            )
        u = int(order[pos])
        arcs = out_arcs[u]
        collected: set[tuple[int, int]] = set()

        def split(i: int, left: int, dz1: int, dz2: int):
            if i == len(arcs):
                if left == 0:
                    for z1, z2 in suffix_pairs(pos + 1):
                        collected.add((z1 + dz1, z2 + dz2))
                return
            a = arcs[i]
            rest = sum(caps[k] for k in arcs[i + 1:])
            lo = max(0, left - rest)
            hi = min(caps[a], left)
            in_sink = a in sink_arcs
            ref = ref_conf.get(a)
            for q in range(lo, hi + 1):
                a_dz1 = q if in_sink else 0
                a_dz2 = abs(q - ref) if ref is not None else 0
                inflow[heads[a]] += q
                split(i + 1, left - q, dz1 + a_dz1, dz2 + a_dz2)
                inflow[heads[a]] -= q

        split(0, inflow[u], 0, 0)
        result = _prune_nondominated(collected)
        memo[key] = result
        return result

    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, 4 * (n + m) + 100))
    try:
        root = suffix_pairs(0)
    finally:
        sys.setrecursionlimit(old_limit)
    return _lower_left_extremes(
        {(z1 - opt_sink_total, z2) for z1, z2 in root}
    )


@dataclass
class AuditReport:
    ok: bool
    problems: list[str] = field(default_factory=list)


def frontier_audit(f: ParetoFrontier, opt: OptimalSolution | None = None,
                   g: SuperGraph | None = None) -> AuditReport:
    """Sortedness, strict nondomination, convex position, witness match."""
    problems = []
    pts = f.points
    if not pts:
        problems.append("frontier is empty")
    for a, b in zip(pts, pts[1:]):
        if b.z2 <= a.z2:
            problems.append(f"z2 not strictly increasing at ({a.z2}, {b.z2})")
        if b.z1 >= a.z1:
            problems.append(f"z1 not strictly decreasing at ({a.z1}, {b.z1})")
    for i in range(len(pts) - 2):
        p, q, r = pts[i], pts[i + 1], pts[i + 2]
        cross = (q.z2 - p.z2) * (r.z1 - p.z1) - (q.z1 - p.z1) * (r.z2 - p.z2)
        if cross <= 0:
            problems.append(
                f"point ({q.z1}, {q.z2}) is not in strictly convex position"
            )
    seen = set()
    for p in pts:
        if (p.z1, p.z2) in seen:
            problems.append(f"duplicate point ({p.z1}, {p.z2})")
        seen.add((p.z1, p.z2))
    if opt is not None and g is not None:
        for p in pts:
            z1, z2, _ = evaluate_attack(p.witness, opt, g)
            if (z1, z2) != (p.z1, p.z2):
                problems.append(
                    f"witness of ({p.z1}, {p.z2}) re-evaluates to "
                    f"({z1}, {z2})"
                )
    return AuditReport(ok=not problems, problems=problems)
