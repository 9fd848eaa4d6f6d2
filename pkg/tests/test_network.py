"""Network model: cells, gadgets, validation, serialization."""

import pytest

from tampernet.errors import InputError
from tampernet.network import (Cell, ConflictGroup, Connector, RoadNetwork,
                               TransshipmentNode, build_conflict_gadget,
                               degree_statistics, validate)


def simple_cells():
    return [
        Cell("r", "source", 5, 1),
        Cell("a", "ordinary", 5, 1),
        Cell("b", "ordinary", 5, 1),
        Cell("s", "sink", 5, 1),
    ]


class TestCell:
    def test_valid_cell_checks_clean(self):
        assert Cell("a", "ordinary", 5, 1).check() == []

    def test_unknown_kind_flagged(self):
        assert Cell("a", "weird", 5, 1).check()

    def test_occupancy_below_flow_capacity_flagged(self):
        assert Cell("a", "ordinary", 1, 3).check()

    def test_nonpositive_parameters_flagged(self):
        assert Cell("a", "ordinary", 0, 1).check()
        assert Cell("a", "ordinary", 5, 0).check()
        assert Cell("a", "ordinary", 5, 1, lanes=0).check()


class TestConflictGadget:
    def test_two_movement_gadget_structure(self):
        cells = {c.id: c for c in simple_cells()}
        group = ConflictGroup("x", (("a", "s"), ("b", "s")))
        nodes, conns = build_conflict_gadget(group, cells)
        assert [n.kind for n in nodes] == ["conflict_upper", "conflict_lower"]
        meters = [c for c in conns if c.is_conflict]
        assert len(meters) == 1 and meters[0].capacity == 1
        entries = [c for c in conns if c.head == nodes[0].id]
        assert {c.tail for c in entries} == {"a", "b"}
        assert all(c.capacity == 1 for c in entries)

    def test_single_movement_degenerates_to_connector(self):
        cells = {c.id: c for c in simple_cells()}
        group = ConflictGroup("x", (("a", "b"),))
        nodes, conns = build_conflict_gadget(group, cells)
        assert nodes == []
        assert len(conns) == 1 and not conns[0].is_conflict

    def test_multilane_sender_gets_one_entry_per_lane(self):
        cells = {c.id: c for c in simple_cells()}
        cells["a"] = Cell("a", "ordinary", 6, 2, lanes=2)
        group = ConflictGroup("x", (("a", "s"), ("b", "s")))
        nodes, conns = build_conflict_gadget(group, cells)
        entries_a = [c for c in conns
                     if c.tail == "a" and c.head == nodes[0].id]
        assert len(entries_a) == 2
        assert all(c.capacity == 1 for c in entries_a)

    def test_duplicate_movement_rejected(self):
        cells = {c.id: c for c in simple_cells()}
        group = ConflictGroup("x", (("a", "s"), ("a", "s")))
        with pytest.raises(InputError):
            build_conflict_gadget(group, cells)

    def test_empty_group_rejected(self):
        with pytest.raises(InputError):
            build_conflict_gadget(ConflictGroup("x", ()), {})


class TestBuildAndValidate:
    def test_chain_passes_validation(self):
        net = RoadNetwork.build(
            simple_cells(),
            [Connector("ra", "r", "a", 1), Connector("ab", "a", "b", 1),
             Connector("bs", "b", "s", 1)],
        )
        assert validate(net).ok

    def test_empty_network_fails(self):
        net = RoadNetwork.build([], [])
        report = validate(net)
        assert not report.ok
        assert any("source" in p for p in report.problems)
        assert any("sink" in p for p in report.problems)

    def test_dangling_connector_flagged(self):
        net = RoadNetwork.build(
            simple_cells(),
            [Connector("ra", "r", "a", 1), Connector("ab", "a", "b", 1),
             Connector("bs", "b", "s", 1),
             Connector("bad", "a", "ghost", 1)],
        )
        report = validate(net)
        assert any("dangling" in p for p in report.problems)

    def test_cell_cell_capacity_must_be_min_rule(self):
        cells = simple_cells()
        net = RoadNetwork.build(
            cells,
            [Connector("ra", "r", "a", 3), Connector("ab", "a", "b", 1),
             Connector("bs", "b", "s", 1)],
        )
        report = validate(net)
        assert any("min(Q_tail, Q_head)" in p for p in report.problems)

    def test_cell_with_two_targets_flagged(self):
        cells = simple_cells()
        net = RoadNetwork.build(
            cells,
            [Connector("ra", "r", "a", 1), Connector("ab", "a", "b", 1),
             Connector("as", "a", "s", 1), Connector("bs", "b", "s", 1)],
        )
        report = validate(net)
        assert any("multiple targets" in p for p in report.problems)

    def test_diverge_degree_enforced(self):
        cells = simple_cells()
        nodes = [TransshipmentNode("d", "diverge")]
        net = RoadNetwork.build(
            cells,
            [Connector("ra", "r", "a", 1), Connector("ad", "a", "d", 1),
             Connector("bd", "b", "d", 1), Connector("ds", "d", "s", 1)],
            nodes=nodes,
        )
        report = validate(net)
        assert any("diverge node d" in p for p in report.problems)

    def test_unreachable_sink_flagged(self):
        cells = simple_cells()
        net = RoadNetwork.build(
            cells,
            [Connector("ra", "r", "a", 1), Connector("ab", "a", "b", 1),
             Connector("ba", "b", "a", 1)],  # no path reaches the sink
        )
        report = validate(net)
        assert any("cannot reach any sink" in p for p in report.problems)

    def test_duplicate_cell_ids_rejected(self):
        with pytest.raises(InputError):
            RoadNetwork.build(
                [Cell("a", "source", 5, 1), Cell("a", "sink", 5, 1)], []
            )


class TestSerialization:
    def test_round_trip_preserves_structure(self, crossing):
        network, _ = crossing
        clone = RoadNetwork.from_json(network.to_json())
        assert clone.to_json() == network.to_json()
        assert set(clone.cells) == set(network.cells)
        assert len(clone.gadgets) == len(network.gadgets)

    def test_bad_json_raises_input_error(self):
        with pytest.raises(InputError):
            RoadNetwork.from_json("{not json")

    def test_missing_fields_raise_input_error(self):
        with pytest.raises(InputError):
            RoadNetwork.from_json('{"cells": [{"id": "a"}]}')


class TestDegreeStatistics:
    def test_gadget_counted_once(self, crossing):
        network, _ = crossing
        summary = degree_statistics(network)
        assert summary.degrees["x"] == (2, 2)

    def test_uniform_flag(self, crossing):
        network, _ = crossing
        assert degree_statistics(network).uniform
