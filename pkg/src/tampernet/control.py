"""Optimal signal control and schedule readout.

The travel-time-minimizing flow is a min-cost flow with unit cost on
every arc that does not terminate in the super-sink.  Signal schedules
are a pure readout of gadget entry flows; a post-pass relabels
slack-indifferent steps (idle gadgets) to cut the switch count without
touching the flow, so the travel-time objective is provably unchanged.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError
from .mincost import IntegralFlow, solve_min_cost
from .network import RoadNetwork
from .supergraph import CONFLICT, CONNECTOR, SuperGraph


@dataclass
class SignalSchedule:
    """Per conflict group and step, the sending cells granted right-of-way."""

    grants: dict[str, list[tuple[str, ...]]]  # group id -> per-step senders

    def switch_count(self) -> int:
        total = 0
        for seq in self.grants.values():
            for prev, cur in zip(seq, seq[1:]):
                if cur != prev:
                    total += 1
        return total

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["group_id", "t", "granted_movement"])
        for group_id in sorted(self.grants):
            for t, senders in enumerate(self.grants[group_id]):
                writer.writerow([group_id, t, "|".join(senders)])
        return buf.getvalue()


@dataclass
class OptimalSolution:
    flow: IntegralFlow
    sink_flows: np.ndarray        # restriction of x to sink-class arcs
    conflict_flows: np.ndarray    # restriction of x to conflict arcs
    total_travel_time: int        # unit-cost objective over non-sink arcs
    throughput_curve: np.ndarray  # cumulative exits per step
    schedule: SignalSchedule
    raw_schedule: SignalSchedule


def travel_time_costs(g: SuperGraph) -> np.ndarray:
    return g.nonsink_mask.astype(np.int64)


def throughput_curve(g: SuperGraph, flows: np.ndarray) -> np.ndarray:
    curve = np.zeros(g.horizon.steps, dtype=np.int64)
    sink = np.flatnonzero(g.sink_mask)
    np.add.at(curve, g.arc_t[sink], flows[sink])
    return np.cumsum(curve)


def infer_signal_schedule(flows, network: RoadNetwork,
                          g: SuperGraph) -> SignalSchedule:
    """Read the granted movement per gadget and step off the entry flows."""
    if isinstance(flows, IntegralFlow):
        flows = flows.flows
    T = g.horizon.steps
    grants: dict[str, list[tuple[str, ...]]] = {}
    for group_id, info in sorted(network.gadgets.items()):
        meter_flow = [
            int(flows[g.arc_index(CONFLICT, info.meter_connector, t)])
            for t in range(T)
        ]
        seq: list[tuple[str, ...]] = []
        for t in range(T):
            if meter_flow[t] > info.capacity:
                raise InvariantError(
                    f"gadget {group_id} carries {meter_flow[t]} at t={t}, "
                    f"capacity {info.capacity}"
                )
            senders = tuple(
                cell for cell, conn_id in info.entries
                if flows[g.arc_index(CONNECTOR, conn_id, t)] > 0
            )
            seq.append(senders)
        grants[group_id] = seq
    return SignalSchedule(grants=grants)


def minimize_switches(sol: OptimalSolution, g: SuperGraph) -> OptimalSolution:
    """Relabel idle steps with the previous grant to reduce switching.

    Only schedule presentation changes; the flow (and hence the travel
    time and every frontier quantity) is untouched, which is asserted.
    """
    smoothed: dict[str, list[tuple[str, ...]]] = {}
    for group_id, seq in sol.schedule.grants.items():
        out: list[tuple[str, ...]] = []
        for senders in seq:
            if senders == () and out:
                out.append(out[-1])
            else:
                out.append(senders)
        smoothed[group_id] = out
    new_schedule = SignalSchedule(grants=smoothed)
    if new_schedule.switch_count() > sol.schedule.switch_count():
        raise InvariantError("switch post-pass increased the switch count")
    before = sol.total_travel_time
    after = sol.flow.dot(travel_time_costs(g))
    if before != after:
        raise InvariantError("switch post-pass changed the objective")
    return OptimalSolution(
        flow=sol.flow,
        sink_flows=sol.sink_flows,
        conflict_flows=sol.conflict_flows,
        total_travel_time=sol.total_travel_time,
        throughput_curve=sol.throughput_curve,
        schedule=new_schedule,
        raw_schedule=sol.raw_schedule,
    )


def optimal_control(g: SuperGraph) -> OptimalSolution:
    """Travel-time-minimizing control with schedule post-processing."""
    costs = travel_time_costs(g)
    flow = solve_min_cost(g, costs)
    raw_schedule = infer_signal_schedule(flow.flows, g.network, g)
    sol = OptimalSolution(
        flow=flow,
        sink_flows=flow.flows[g.sink_mask].copy(),
        conflict_flows=flow.flows[g.conflict_mask].copy(),
        total_travel_time=flow.objective,
        throughput_curve=throughput_curve(g, flow.flows),
        schedule=raw_schedule,
        raw_schedule=raw_schedule,
    )
    return minimize_switches(sol, g)
