"""Bi-objective tampering: encodings, frontier, oracle equivalence."""

import numpy as np
import pytest

from tampernet.adversary import (brute_force_frontier, encode_objectives,
                                 evaluate_attack, frontier_audit,
                                 pareto_frontier)
from tampernet.control import optimal_control
from tampernet.errors import InputError
from tampernet.mincost import solve_lexicographic, solve_min_cost

from conftest import build_crossing, random_micro_instance


def frontier_setup(builder=build_crossing, **kwargs):
    _, g = builder(**kwargs)
    opt = optimal_control(g)
    return g, opt


class TestObjectiveEncoding:
    def test_reference_flow_scores_zero_zero(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        enc = encode_objectives(opt, g)
        assert enc.z1(opt.flow) == 0
        assert enc.z2(opt.flow) == 0

    def test_exact_linearization_random_binary_vectors(self, crossing):
        """The arc costs reproduce the L1 metering distance exactly."""
        _, g = crossing
        opt = optimal_control(g)
        enc = encode_objectives(opt, g)
        conf = np.flatnonzero(g.conflict_mask)
        ref = opt.conflict_flows
        rng = np.random.default_rng(3)
        for _ in range(1000):
            x_conf = rng.integers(0, 2, size=len(conf))
            linear = int((enc.z2_costs[conf] * x_conf).sum()) + enc.z2_const
            assert linear == int(np.abs(x_conf - ref).sum())

    def test_all_zero_reference_gives_plus_one_costs(self):
        _, g = build_crossing(steps=3, arrivals_a=(0,), arrivals_b=(0, 0, 1))
        opt = optimal_control(g)
        # no vehicle can reach the gadget within three steps
        assert int(opt.conflict_flows.sum()) == 0
        enc = encode_objectives(opt, g)
        conf = np.flatnonzero(g.conflict_mask)
        assert (enc.z2_costs[conf] == 1).all()
        assert enc.z2_const == 0

    def test_flipping_one_granted_step_costs_two(self, crossing):
        # move a metered crossing to a previously idle step: one arc
        # changes 1 -> 0 and another 0 -> 1
        _, g = crossing
        opt = optimal_control(g)
        enc = encode_objectives(opt, g)
        conf = np.flatnonzero(g.conflict_mask)
        ref = opt.conflict_flows.copy()
        ones = np.flatnonzero(ref == 1)
        zeros = np.flatnonzero(ref == 0)
        assert len(ones) and len(zeros)
        tampered = ref.copy()
        tampered[ones[0]] = 0
        tampered[zeros[0]] = 1
        linear = int((enc.z2_costs[conf] * tampered).sum()) + enc.z2_const
        assert linear == 2


class TestEvaluateAttack:
    def test_reference_witness_scores_zero(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        z1, z2, schedule = evaluate_attack(opt.flow, opt, g)
        assert (z1, z2) == (0, 0)
        assert schedule.grants == opt.raw_schedule.grants

    def test_frontier_witnesses_recompute_exactly(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        front = pareto_frontier(g, opt)
        for p in front.points:
            z1, z2, _ = evaluate_attack(p.witness, opt, g)
            assert (z1, z2) == (p.z1, p.z2)

    def test_infeasible_witness_rejected(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        bad = opt.flow.flows.copy()
        bad[0] += 1
        from tampernet.mincost import IntegralFlow
        with pytest.raises(InputError):
            evaluate_attack(IntegralFlow(bad, 0), opt, g)


class TestParetoFrontier:
    def test_zero_demand_single_origin_point(self):
        _, g = build_crossing(steps=3, arrivals_a=(0,), arrivals_b=(0,))
        opt = optimal_control(g)
        front = pareto_frontier(g, opt)
        assert front.pairs() == [(0, 0)]

    def test_crossing_toy_matches_oracle(self):
        g, opt = frontier_setup()
        front = pareto_frontier(g, opt)
        oracle = brute_force_frontier(g, opt)
        assert set(front.pairs()) == oracle

    def test_multi_point_frontier_matches_oracle(self):
        # scarce sink storage forces an impact/noticeability trade-off
        g, opt = frontier_setup(steps=7, arrivals_a=(1, 1),
                                arrivals_b=(1, 1), n_sink=1)
        front = pareto_frontier(g, opt)
        oracle = brute_force_frontier(g, opt)
        assert len(front.points) >= 2
        assert set(front.pairs()) == oracle

    def test_monotone_and_convex(self):
        g, opt = frontier_setup(steps=8, arrivals_a=(1, 1, 1),
                                arrivals_b=(1,), n_sink=1)
        front = pareto_frontier(g, opt)
        audit = frontier_audit(front, opt, g)
        assert audit.ok, audit.problems

    def test_max_impact_endpoint_bounded_by_demand(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        front = pareto_frontier(g, opt)
        assert abs(front.points[-1].z1) <= g.demand_total
        assert front.points[0].z2 >= 0

    def test_provenance_records_every_segment(self):
        g, opt = frontier_setup(steps=7, arrivals_a=(1, 1),
                                arrivals_b=(1, 1), n_sink=1)
        front = pareto_frontier(g, opt)
        events = [e["event"] for e in front.provenance]
        assert events[0] == "init"
        n_segments = sum(1 for e in events if e == "segment")
        if len(front.points) > 1:
            assert n_segments >= len(front.points) - 1

    def test_weighted_sum_support(self):
        """Every adjacent pair's weighted problem is minimized by both."""
        g, opt = frontier_setup(steps=8, arrivals_a=(1, 1, 1),
                                arrivals_b=(1,), n_sink=1)
        enc = encode_objectives(opt, g)
        front = pareto_frontier(g, opt)
        for p, q in zip(front.points, front.points[1:]):
            w1 = abs(q.z2 - p.z2)
            w2 = abs(q.z1 - p.z1)
            weighted = (w1 * enc.z1_costs.astype(object)
                        + w2 * enc.z2_costs.astype(object))
            probe = solve_min_cost(g, weighted)
            best = probe.objective
            for point in (p, q):
                value = (w1 * (point.z1 - enc.z1_const)
                         + w2 * (point.z2 - enc.z2_const))
                assert value == best


class TestBruteForceOracle:
    def test_randomized_micro_instances_agree(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            _, g = random_micro_instance(rng)
            opt = optimal_control(g)
            front = pareto_frontier(g, opt)
            oracle = brute_force_frontier(g, opt)
            assert set(front.pairs()) == oracle

    def test_state_limit_guard(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        with pytest.raises(InputError):
            brute_force_frontier(g, opt, state_limit=3)


class TestFrontierAudit:
    def test_clean_frontier_passes(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        front = pareto_frontier(g, opt)
        assert frontier_audit(front, opt, g).ok

    def test_duplicate_point_flagged(self, crossing):
        _, g = crossing
        opt = optimal_control(g)
        front = pareto_frontier(g, opt)
        front.points.append(front.points[-1])
        report = frontier_audit(front)
        assert not report.ok

    def test_dominated_point_flagged(self):
        g, opt = frontier_setup(steps=7, arrivals_a=(1, 1),
                                arrivals_b=(1, 1), n_sink=1)
        front = pareto_frontier(g, opt)
        assert len(front.points) >= 2
        from dataclasses import replace
        worse = replace(front.points[0],
                        z2=front.points[-1].z2 + 1,
                        z1=front.points[0].z1)
        front.points.append(worse)
        report = frontier_audit(front)
        assert not report.ok
