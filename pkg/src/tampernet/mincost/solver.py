"""Exact integral min-cost flow on the super-graph.

Costs are integers and may be negative (the graph is acyclic).
Lexicographic two-objective solves are realized by exact big-M
weighting: with W exceeding the feasible range of the secondary
objective, minimizing W * primary + secondary minimizes the secondary
among primary minimizers, exactly, because both objectives are integral.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.sparse.csgraph import NegativeCycleError, bellman_ford

from ..errors import InputError, InvariantError
from ..supergraph import SuperGraph
from . import _core_py

try:
    from . import _core
except ImportError:
    _core = None
if os.environ.get("TAMPERNET_KERNEL") == "py":
    _core = None

HAVE_COMPILED_KERNEL = _core is not None

# any intermediate label in the compiled kernel is < 5 * sum(|c|) + 1
_INT64_COST_BUDGET = 2 ** 60


@dataclass
class IntegralFlow:
    """One integral feasible flow with its objective value(s)."""

    flows: np.ndarray  # int64, parallel to the graph's arc arrays
    objective: int
    secondary_objective: int | None = None

    def dot(self, costs: np.ndarray) -> int:
        """Exact integer inner product (no int64 overflow)."""
        nz = np.flatnonzero(self.flows)
        return int(sum(int(costs[a]) * int(self.flows[a]) for a in nz))


def _as_cost_vector(g: SuperGraph, c) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    if c.shape != (g.n_arcs,):
        raise InputError(f"cost vector has shape {c.shape}, expected "
                         f"({g.n_arcs},)")
    return c


def _run_kernel(g: SuperGraph, costs: np.ndarray, force_py: bool = False):
    if len(costs) == 0:
        abs_sum = 0
    elif costs.dtype == object:
        abs_sum = int(sum(abs(int(x)) for x in costs))
    else:
        abs_sum = int(np.abs(costs).sum(dtype=object))
    use_compiled = (
        _core is not None and not force_py and costs.dtype == np.int64
        and 5 * abs_sum + 1 < _INT64_COST_BUDGET
    )
    if use_compiled:
        flow, status = _core.solve_kernel(
            g.n_nodes, g.tails, g.heads, g.caps,
            np.ascontiguousarray(costs), g.R, g.S, int(g.demand_total),
        )
        flow = np.asarray(flow, dtype=np.int64)
    else:
        flow_list, status = _core_py.solve_kernel(
            g.n_nodes, g.tails, g.heads, g.caps, costs,
            g.R, g.S, int(g.demand_total),
        )
        flow = np.asarray(flow_list, dtype=np.int64)
    if status != 0:
        raise InvariantError(
            "min-cost flow reported infeasible demand; the residual-arc "
            "construction should make every instance feasible"
        )
    return flow


def solve_min_cost(g: SuperGraph, costs, *, force_py: bool = False
                   ) -> IntegralFlow:
    """Minimize costs^T x over feasible integral flows on g."""
    c = _as_cost_vector(g, costs)
    flow = _run_kernel(g, c, force_py=force_py)
    sol = IntegralFlow(flows=flow, objective=0)
    sol.objective = sol.dot(c)
    return sol


def solve_lexicographic(g: SuperGraph, primary, secondary,
                        bound_secondary_range: int) -> IntegralFlow:
    """Minimize secondary among minimizers of primary.

    ``bound_secondary_range`` must be a valid upper bound on the spread
    of secondary^T x over feasible flows; W = bound + 1 then makes the
    weighted solve exactly lexicographic.
    """
    if bound_secondary_range <= 0:
        raise InputError("bound_secondary_range must be positive")
    p = _as_cost_vector(g, primary)
    s = _as_cost_vector(g, secondary)
    W = int(bound_secondary_range) + 1
    combined = (p.astype(object) * W + s.astype(object))
    max_abs = int(max((abs(int(x)) for x in combined), default=0))
    if 5 * max_abs * max(g.n_arcs, 1) + 1 < _INT64_COST_BUDGET:
        combined = combined.astype(np.int64)
    flow = _run_kernel(g, combined)
    sol = IntegralFlow(flows=flow, objective=0)
    sol.objective = sol.dot(p)
    sol.secondary_objective = sol.dot(s)
    return sol


def check_feasible(g: SuperGraph, flow: np.ndarray) -> list[str]:
    """Capacity and conservation violations of a candidate flow."""
    problems = []
    flow = np.asarray(flow, dtype=np.int64)
    if flow.shape != (g.n_arcs,):
        return [f"flow vector has shape {flow.shape}"]
    if (flow < 0).any():
        problems.append("negative arc flow")
    if (flow > g.caps).any():
        problems.append("arc capacity exceeded")
    balance = np.zeros(g.n_nodes, dtype=np.int64)
    np.add.at(balance, g.tails, flow)       # outflow counts positive
    np.subtract.at(balance, g.heads, flow)
    if not np.array_equal(balance, g.supplies()):
        problems.append("conservation violated")
    return problems


def verify_optimality(g: SuperGraph, costs, flow) -> bool:
    """Independent optimality certificate.

    A feasible flow is optimal iff the residual graph admits feasible
    node potentials, i.e. contains no negative-cost cycle.  The check
    runs Bellman-Ford (scipy) from a virtual root connected to every
    node, so it shares no code with the solver kernels.
    """
    c = _as_cost_vector(g, costs)
    flow = np.asarray(flow, dtype=np.int64)
    if check_feasible(g, flow):
        return False

    fwd = flow < g.caps
    bwd = flow > 0
    tails = np.concatenate([g.tails[fwd], g.heads[bwd]])
    heads = np.concatenate([g.heads[fwd], g.tails[bwd]])
    costs_r = np.concatenate([c[fwd], -c[bwd]]).astype(np.float64)
    root = g.n_nodes
    tails = np.concatenate([tails, np.full(g.n_nodes, root)])
    heads = np.concatenate([heads, np.arange(g.n_nodes)])
    costs_r = np.concatenate([costs_r, np.zeros(g.n_nodes)])

    # keep the cheapest parallel arc per (u, v); sparse would sum them
    order = np.lexsort((costs_r, heads, tails))
    tails, heads, costs_r = tails[order], heads[order], costs_r[order]
    keep = np.ones(len(tails), dtype=bool)
    keep[1:] = (tails[1:] != tails[:-1]) | (heads[1:] != heads[:-1])
    tails, heads, costs_r = tails[keep], heads[keep], costs_r[keep]

    # sparse storage drops explicit zeros; nudge zero-cost arcs to the
    # smallest subnormal, which cannot flip the sign of an integer-valued
    # cycle sum
    zero = costs_r == 0.0
    costs_r[zero] = np.finfo(np.float64).tiny
    mat = scipy.sparse.csr_matrix((costs_r, (tails, heads)),
                                  shape=(g.n_nodes + 1, g.n_nodes + 1))
    try:
        bellman_ford(mat, indices=root, return_predecessors=False)
    except NegativeCycleError:
        return False
    return True
