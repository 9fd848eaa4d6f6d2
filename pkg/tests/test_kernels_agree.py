"""The compiled kernel and its pure-Python twin are deterministic twins."""

import numpy as np
import pytest

from tampernet.control import travel_time_costs
from tampernet.mincost import HAVE_COMPILED_KERNEL, solve_min_cost
from tampernet.scenarios import ScenarioConfig

from conftest import build_chain, build_crossing, random_micro_instance

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED_KERNEL, reason="compiled kernel not built"
)


@needs_compiled
class TestKernelAgreement:
    def test_identical_flows_on_fixed_instances(self):
        for builder, kwargs in (
            (build_chain, {}),
            (build_crossing, {}),
            (build_crossing, {"steps": 8, "arrivals_a": (2, 1),
                              "arrivals_b": (0, 2)}),
        ):
            _, g = builder(**kwargs)
            costs = travel_time_costs(g)
            compiled = solve_min_cost(g, costs)
            pure = solve_min_cost(g, costs, force_py=True)
            assert np.array_equal(compiled.flows, pure.flows)
            assert compiled.objective == pure.objective

    def test_identical_flows_on_random_instances_and_costs(self):
        rng = np.random.default_rng(7)
        for _ in range(15):
            _, g = random_micro_instance(rng)
            costs = rng.integers(-4, 5, size=g.n_arcs).astype(np.int64)
            compiled = solve_min_cost(g, costs)
            pure = solve_min_cost(g, costs, force_py=True)
            assert np.array_equal(compiled.flows, pure.flows)

    def test_identical_flows_on_scenario_instance(self):
        cfg = ScenarioConfig(network={"kind": "A"}, horizon_steps=40,
                             demand_rate_veh_hr=400)
        g = cfg.expand()
        costs = travel_time_costs(g)
        compiled = solve_min_cost(g, costs)
        pure = solve_min_cost(g, costs, force_py=True)
        assert np.array_equal(compiled.flows, pure.flows)
