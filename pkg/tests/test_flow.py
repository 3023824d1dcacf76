"""Max flow against a brute-force min-cut oracle; demand feasibility checks."""

import numpy as np
import pytest

from conftest import random_connected_graph
from netlasso.errors import InvalidConfigError, InvalidDemandSpecError, NodeOutOfRangeError
from netlasso.flow import (
    DemandSpec,
    FlowNetwork,
    feasible_flow,
    max_flow,
    verify_cut_certificate,
    verify_demand_witness,
    verify_max_flow_assignment,
)
from netlasso.graphs import validate_graph

BACKENDS = ("dinic", "scipy")


def brute_force_min_cut(net: FlowNetwork, s: int, t: int, scale: int) -> int:
    """Minimum s-t cut by enumerating every side assignment of the other nodes."""
    others = [v for v in range(net.node_count) if v not in (s, t)]
    best = None
    for mask in range(1 << len(others)):
        side = {s}
        for pos, v in enumerate(others):
            if mask >> pos & 1:
                side.add(v)
        cap = sum(
            int(round(c * scale))
            for u, v, c in net.arcs
            if u in side and v not in side
        )
        best = cap if best is None else min(best, cap)
    return best


def random_network(rng: np.random.Generator, max_nodes: int = 8) -> FlowNetwork:
    n = int(rng.integers(2, max_nodes + 1))
    arcs = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < 0.45:
                arcs.append((u, v, float(rng.integers(0, 11))))
    # occasional parallel arcs
    if arcs and rng.random() < 0.5:
        u, v, _ = arcs[int(rng.integers(0, len(arcs)))]
        arcs.append((u, v, float(rng.integers(1, 5))))
    return FlowNetwork(n, tuple(arcs))


class TestMaxFlow:
    def test_single_arc(self):
        net = FlowNetwork(2, ((0, 1, 5.0),))
        for backend in BACKENDS:
            value, asg = max_flow(net, 0, 1, backend=backend)
            assert value == 5.0
            assert asg.flows == (5.0,)

    def test_two_path_with_cross_arc(self):
        # min cut {s, a} has capacity 2 + 1 + 1 = 4
        net = FlowNetwork(4, ((0, 1, 3.0), (0, 2, 2.0), (1, 3, 1.0), (2, 3, 3.0), (1, 2, 1.0)))
        for backend in BACKENDS:
            value, asg = max_flow(net, 0, 3, backend=backend)
            assert value == 4.0
            assert verify_max_flow_assignment(net, 0, 3, asg)

    def test_zero_capacity_network(self):
        net = FlowNetwork(3, ((0, 1, 0.0), (1, 2, 0.0)))
        for backend in BACKENDS:
            value, _ = max_flow(net, 0, 2, backend=backend)
            assert value == 0.0

    def test_node_out_of_range(self):
        net = FlowNetwork(2, ((0, 1, 1.0),))
        with pytest.raises(NodeOutOfRangeError):
            max_flow(net, 0, 5)

    def test_source_equals_sink(self):
        net = FlowNetwork(2, ((0, 1, 1.0),))
        with pytest.raises(InvalidConfigError):
            max_flow(net, 1, 1)

    @pytest.mark.parametrize("backend", BACKENDS)
    def test_matches_brute_force_min_cut(self, backend):
        rng = np.random.default_rng(7)
        for _ in range(100):
            net = random_network(rng)
            s, t = 0, net.node_count - 1
            value, asg = max_flow(net, s, t, scale=1, backend=backend)
            assert asg.value_scaled == brute_force_min_cut(net, s, t, scale=1)
            assert verify_max_flow_assignment(net, s, t, asg)

    def test_backends_agree_on_value(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            net = random_network(rng)
            v1, _ = max_flow(net, 0, net.node_count - 1, backend="dinic")
            v2, _ = max_flow(net, 0, net.node_count - 1, backend="scipy")
            assert v1 == v2

    def test_integrality_with_integer_capacities(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            net = random_network(rng)
            _, asg = max_flow(net, 0, net.node_count - 1, scale=1)
            assert all(isinstance(f, int) for f in asg.scaled_flows)
            assert isinstance(asg.value_scaled, int)


class TestFeasibleFlow:
    def test_path_exact_capacity(self, path2):
        spec = DemandSpec(injections={0: 1.0, 1: -1.0})
        res = feasible_flow(path2, [], spec)
        assert res.feasible
        assert res.witness.edge_flows == (res.witness.scale,)
        assert verify_demand_witness(path2, [], spec, res.witness)

    def test_path_over_capacity_yields_cut(self, path2):
        spec = DemandSpec(injections={0: 2.0, 1: -2.0})
        res = feasible_flow(path2, [], spec)
        assert not res.feasible
        assert res.cut.nodes == (0,)
        assert res.cut.demand_scaled == 2 * res.scale
        assert res.cut.capacity_scaled == 1 * res.scale
        assert verify_cut_certificate(path2, [], spec, res.cut)

    def test_star_routes_through_center(self):
        star = validate_graph([(0, 1), (0, 2), (0, 3)], [2.0] * 3, 4)
        spec = DemandSpec(injections={1: 2.0, 2: -2.0, 3: 0.0})
        res = feasible_flow(star, [], spec)
        assert res.feasible
        assert verify_demand_witness(star, [], spec, res.witness)
        flows = dict(zip(res.witness.edges, res.witness.edge_flows))
        assert flows[(0, 1)] == -2 * res.scale  # leaf 1 -> center
        assert flows[(0, 2)] == 2 * res.scale  # center -> leaf 2

    def test_slack_absorbs_imbalance(self, path4):
        spec = DemandSpec(injections={0: 1.0}, slack_nodes=frozenset({3}), slack_bound=1.0)
        res = feasible_flow(path4, [], spec)
        assert res.feasible
        net_out = res.witness.node_net_outflow
        assert net_out[0] == res.scale
        assert net_out[3] == -res.scale

    def test_slack_bound_binds(self, path4):
        spec = DemandSpec(injections={0: 1.0}, slack_nodes=frozenset({3}), slack_bound=0.25)
        res = feasible_flow(path4, [], spec)
        assert not res.feasible
        assert verify_cut_certificate(path4, [], spec, res.cut)

    def test_excluded_edges_removed(self, path4):
        spec = DemandSpec(injections={0: 1.0, 3: -1.0})
        res = feasible_flow(path4, [(1, 2)], spec)
        assert not res.feasible
        assert verify_cut_certificate(path4, [(1, 2)], spec, res.cut)

    def test_invalid_demand_spec(self, path2):
        with pytest.raises(InvalidDemandSpecError):
            DemandSpec(slack_bound=-1.0)
        with pytest.raises(InvalidDemandSpecError):
            feasible_flow(path2, [], DemandSpec(injections={9: 1.0}))

    def test_integrality_and_witness_reverification_random(self):
        rng = np.random.default_rng(10)
        feasible_seen = infeasible_seen = 0
        for _ in range(120):
            n = int(rng.integers(2, 8))
            g = random_connected_graph(rng, n, w_lo=1.0, w_hi=4.0)
            # integer weights for exact scale-1 arithmetic
            g = validate_graph(g.edges, np.round(g.weights), n)
            b = {}
            total = 0
            for i in range(n - 1):
                v = int(rng.integers(-2, 3))
                if v:
                    b[i] = float(v)
                    total += v
            b[n - 1] = float(-total)  # balance so zero-slack instances can be feasible
            slack = frozenset(
                int(i) for i in rng.choice(n, size=int(rng.integers(0, n)), replace=False)
            )
            spec = DemandSpec(injections=b, slack_nodes=slack, slack_bound=float(rng.integers(0, 3)))
            res = feasible_flow(g, [], spec, scale=1)
            if res.feasible:
                feasible_seen += 1
                assert all(isinstance(f, int) for f in res.witness.edge_flows)
                assert verify_demand_witness(g, [], spec, res.witness)
            else:
                infeasible_seen += 1
                assert verify_cut_certificate(g, [], spec, res.cut)
        assert feasible_seen > 10 and infeasible_seen > 10

    def test_feasibility_monotone_in_capacity_scaling(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            n = int(rng.integers(3, 7))
            g = random_connected_graph(rng, n, w_lo=0.5, w_hi=1.5)
            b = {0: 2.0, n - 1: -2.0}
            spec = DemandSpec(injections=b)
            res1 = feasible_flow(g, [], spec)
            if not res1.feasible:
                continue
            scaled_up = validate_graph(g.edges, g.weights * 3.0, n)
            res2 = feasible_flow(scaled_up, [], spec)
            assert res2.feasible

    def test_backends_agree_on_feasibility(self):
        rng = np.random.default_rng(12)
        for _ in range(40):
            n = int(rng.integers(2, 7))
            g = random_connected_graph(rng, n)
            spec = DemandSpec(
                injections={0: float(rng.integers(1, 4)), n - 1: -1.0},
                slack_nodes=frozenset({n - 1}),
                slack_bound=float(rng.integers(0, 4)),
            )
            r1 = feasible_flow(g, [], spec, backend="dinic")
            r2 = feasible_flow(g, [], spec, backend="scipy")
            assert r1.feasible == r2.feasible
