"""Maximum flow and feasibility of flows with node demands.

All flow arithmetic happens on integers: capacities and demands are
quantized by a configurable scale factor (default 10**6) before solving, so
results are exact at that quantization and certificates re-verify with
integer arithmetic. Two interchangeable max-flow backends are provided: a
pure-Python Dinic (arbitrary-precision capacities, parallel arcs kept
distinct) and scipy's C implementation (used automatically when capacities
fit comfortably in int64).

Undirected graph edges act as bidirectional capacity: each edge {i,j} may
carry up to W_ij in a direction of the solver's choosing. Feasibility of a
flow with prescribed node injections and bounded-slack nodes reduces to one
max-flow problem via a reservoir node plus the standard lower-bound
transform; infeasibility is certified by a node set whose required net
outflow exceeds the capacity leaving it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import maximum_flow as _scipy_maximum_flow

from .errors import (
    InvalidConfigError,
    InvalidDemandSpecError,
    NodeOutOfRangeError,
)
from .graphs import Edge, Graph

DEFAULT_SCALE = 10**6

# scipy's solver works on int64 capacities; stay far from overflow when
# summing capacities along augmenting paths.
_SCIPY_CAP_LIMIT = 2**60


def scaled(value: float, scale: int) -> int:
    """Quantize a real capacity/demand to the integer grid."""
    return int(round(value * scale))


@dataclass(frozen=True)
class FlowNetwork:
    """Directed arcs (u, v, capacity >= 0); parallel arcs permitted."""

    node_count: int
    arcs: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.node_count <= 0:
            raise InvalidConfigError("node_count must be positive")
        cleaned = []
        for u, v, c in self.arcs:
            u, v, c = int(u), int(v), float(c)
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise NodeOutOfRangeError(f"arc ({u}, {v}) outside 0..{self.node_count - 1}")
            if u == v:
                raise InvalidConfigError(f"self arc at node {u}")
            if not np.isfinite(c) or c < 0.0:
                raise InvalidConfigError(f"arc ({u}, {v}) has invalid capacity {c}")
            cleaned.append((u, v, c))
        object.__setattr__(self, "arcs", tuple(cleaned))


@dataclass(frozen=True)
class FlowAssignment:
    """Per-arc flows of a max-flow solution, aligned with the network's arcs."""

    flows: tuple[float, ...]
    scaled_flows: tuple[int, ...]
    scale: int
    value: float
    value_scaled: int


class _Dinic:
    """Blocking-flow max flow on integer capacities (Python ints, no overflow)."""

    def __init__(self, n: int):
        self.n = n
        self.head: list[int] = []
        self.cap: list[int] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add_arc(self, u: int, v: int, capacity: int) -> int:
        arc_id = len(self.head)
        self.head.append(v)
        self.cap.append(capacity)
        self.head.append(u)
        self.cap.append(0)
        self.adj[u].append(arc_id)
        self.adj[v].append(arc_id + 1)
        return arc_id

    def _bfs(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        head, cap, adj = self.head, self.cap, self.adj
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = head[e]
                if cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        head, cap, adj = self.head, self.cap, self.adj
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            # Iterative DFS for a blocking flow in the level graph.
            path_arcs: list[int] = []
            u = s
            while True:
                if u == t:
                    push = min(cap[e] for e in path_arcs)
                    total += push
                    retreat = 0
                    for pos, e in enumerate(path_arcs):
                        cap[e] -= push
                        cap[e ^ 1] += push
                        if cap[e] == 0 and retreat == 0:
                            retreat = pos
                    # Back up to the tail of the first saturated arc.
                    del path_arcs[retreat:]
                    u = s if not path_arcs else head[path_arcs[-1]]
                    continue
                advanced = False
                while it[u] < len(adj[u]):
                    e = adj[u][it[u]]
                    v = head[e]
                    if cap[e] > 0 and level[v] == level[u] + 1:
                        path_arcs.append(e)
                        u = v
                        advanced = True
                        break
                    it[u] += 1
                if advanced:
                    continue
                if u == s:
                    break
                level[u] = -1  # dead end in this phase
                e = path_arcs.pop()
                u = s if not path_arcs else head[path_arcs[-1]]

    def arc_flow(self, arc_id: int, original_capacity: int) -> int:
        return original_capacity - self.cap[arc_id]

    def residual_reachable(self, s: int) -> set[int]:
        """Nodes reachable from s through positive residual capacity."""
        seen = {s}
        queue = deque([s])
        head, cap, adj = self.head, self.cap, self.adj
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = head[e]
                if cap[e] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _solve_int_max_flow(
    n: int,
    arcs: Sequence[tuple[int, int, int]],
    s: int,
    t: int,
    backend: str = "auto",
) -> tuple[int, list[int]]:
    """Exact integer max flow; returns (value, per-arc flows)."""
    if backend not in ("auto", "dinic", "scipy"):
        raise InvalidConfigError(f"unknown flow backend {backend!r}")
    if backend == "auto":
        total_cap = sum(c for _, _, c in arcs)
        backend = "scipy" if total_cap < _SCIPY_CAP_LIMIT else "dinic"
    if backend == "scipy":
        return _scipy_int_max_flow(n, arcs, s, t)
    return _dinic_int_max_flow(n, arcs, s, t)


def _dinic_int_max_flow(n, arcs, s, t):
    solver = _Dinic(n)
    ids = [solver.add_arc(u, v, c) for u, v, c in arcs]
    value = solver.max_flow(s, t)
    flows = [solver.arc_flow(a, c) for a, (_, _, c) in zip(ids, arcs)]
    return value, flows


def _scipy_int_max_flow(n, arcs, s, t):
    # csr construction sums duplicate entries, merging parallel arcs; the
    # merged flow is split back across the originals greedily afterwards.
    rows, cols, data = [], [], []
    by_pair: dict[tuple[int, int], list[int]] = {}
    for idx, (u, v, c) in enumerate(arcs):
        if c > 0:
            rows.append(u)
            cols.append(v)
            data.append(c)
            by_pair.setdefault((u, v), []).append(idx)
    if not rows:
        return 0, [0] * len(arcs)
    matrix = sp.csr_matrix(
        (np.asarray(data, dtype=np.int64), (rows, cols)), shape=(n, n)
    )
    result = _scipy_maximum_flow(matrix, s, t)
    flows = [0] * len(arcs)
    flow_coo = result.flow.tocoo()
    for u, v, f in zip(flow_coo.row, flow_coo.col, flow_coo.data):
        if f <= 0:
            continue
        remaining = int(f)
        for idx in by_pair.get((int(u), int(v)), ()):
            take = min(remaining, arcs[idx][2])
            flows[idx] = take
            remaining -= take
            if remaining == 0:
                break
    return int(result.flow_value), flows


def max_flow(
    net: FlowNetwork,
    s: int,
    t: int,
    scale: int = DEFAULT_SCALE,
    backend: str = "auto",
) -> tuple[float, FlowAssignment]:
    """Maximum s-t flow, exact at the integer quantization ``scale``."""
    if not (0 <= s < net.node_count and 0 <= t < net.node_count):
        raise NodeOutOfRangeError(f"source/sink outside 0..{net.node_count - 1}")
    if s == t:
        raise InvalidConfigError("source equals sink")
    int_arcs = [(u, v, scaled(c, scale)) for u, v, c in net.arcs]
    value, flows = _solve_int_max_flow(net.node_count, int_arcs, s, t, backend)
    assignment = FlowAssignment(
        flows=tuple(f / scale for f in flows),
        scaled_flows=tuple(flows),
        scale=scale,
        value=value / scale,
        value_scaled=value,
    )
    return assignment.value, assignment


def verify_max_flow_assignment(
    net: FlowNetwork, s: int, t: int, assignment: FlowAssignment
) -> bool:
    """Independent check: capacity bounds and conservation away from s, t."""
    balance = [0] * net.node_count
    for (u, v, c), f in zip(net.arcs, assignment.scaled_flows):
        if f < 0 or f > scaled(c, assignment.scale):
            return False
        balance[u] -= f
        balance[v] += f
    for i in range(net.node_count):
        if i in (s, t):
            continue
        if balance[i] != 0:
            return False
    return balance[t] == assignment.value_scaled and balance[s] == -assignment.value_scaled


@dataclass(frozen=True)
class DemandSpec:
    """Required net outflows plus a set of slack nodes.

    A node with injection b must have net outflow exactly b; a slack node
    may deviate from its injection by at most ``slack_bound`` in either
    direction. Injections default to zero.
    """

    injections: Mapping[int, float] = field(default_factory=dict)
    slack_nodes: frozenset[int] = frozenset()
    slack_bound: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "injections", dict(self.injections))
        object.__setattr__(self, "slack_nodes", frozenset(int(i) for i in self.slack_nodes))
        if not np.isfinite(self.slack_bound) or self.slack_bound < 0.0:
            raise InvalidDemandSpecError("slack_bound must be finite and >= 0")
        for i, b in self.injections.items():
            if not np.isfinite(b):
                raise InvalidDemandSpecError(f"injection at node {i} is not finite")

    def validate_nodes(self, node_count: int) -> None:
        for i in self.injections:
            if not 0 <= int(i) < node_count:
                raise InvalidDemandSpecError(f"injection node {i} outside 0..{node_count - 1}")
        for i in self.slack_nodes:
            if not 0 <= i < node_count:
                raise InvalidDemandSpecError(f"slack node {i} outside 0..{node_count - 1}")


@dataclass(frozen=True)
class DemandWitness:
    """Feasible flow on the kept edges, in scaled integer units.

    ``edge_flows[k]`` is the signed flow on ``edges[k]``: positive means the
    flow runs from the smaller endpoint to the larger one.
    """

    edges: tuple[Edge, ...]
    edge_flows: tuple[int, ...]
    node_net_outflow: tuple[int, ...]
    scale: int


@dataclass(frozen=True)
class CutCertificate:
    """Hoffman-style infeasibility certificate.

    For kind 'supply-excess', the nodes' total required injection exceeds
    the capacity leaving the set plus its slack allowance; 'demand-excess'
    is the mirror statement for required absorption and entering capacity.
    """

    kind: str
    nodes: tuple[int, ...]
    demand_scaled: int
    capacity_scaled: int
    scale: int


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: DemandWitness | None
    cut: CutCertificate | None
    scale: int


def _scaled_injections(g: Graph, spec: DemandSpec, scale: int) -> list[int]:
    b = [0] * g.node_count
    for i, v in spec.injections.items():
        b[int(i)] = scaled(v, scale)
    return b


def _kept_edges(g: Graph, excluded: Iterable[Edge]) -> list[int]:
    excluded_ids = set()
    for e in excluded:
        excluded_ids.add(g.edge_id(*e))
    return [k for k in range(g.edge_count) if k not in excluded_ids]


def feasible_flow(
    g: Graph,
    excluded: Iterable[Edge],
    spec: DemandSpec,
    scale: int = DEFAULT_SCALE,
    backend: str = "auto",
) -> FeasibilityResult:
    """Decide whether the graph minus ``excluded`` supports the demanded flow.

    Each kept edge {i,j} may carry up to W_ij in one direction of the
    solver's choosing. Returns a witness flow when feasible, otherwise a cut
    certificate proving infeasibility.
    """
    spec.validate_nodes(g.node_count)
    kept = _kept_edges(g, excluded)
    b = _scaled_injections(g, spec, scale)
    k_scaled = scaled(spec.slack_bound, scale)
    caps = [scaled(float(g.weights[k]), scale) for k in kept]

    n = g.node_count
    reservoir, source, sink = n, n + 1, n + 2
    supply_total = sum(v for v in b if v > 0)
    demand_total = sum(-v for v in b if v < 0)

    arcs: list[tuple[int, int, int]] = []
    forward_ids = {}
    backward_ids = {}
    for pos, k in enumerate(kept):
        i, j = g.edges[k]
        forward_ids[k] = len(arcs)
        arcs.append((i, j, caps[pos]))
        backward_ids[k] = len(arcs)
        arcs.append((j, i, caps[pos]))
    for i in sorted(spec.slack_nodes):
        arcs.append((i, reservoir, k_scaled))
        arcs.append((reservoir, i, k_scaled))
    for i in range(n):
        if b[i] > 0:
            arcs.append((source, i, b[i]))
        elif b[i] < 0:
            arcs.append((i, sink, -b[i]))
    if demand_total > 0:
        arcs.append((source, reservoir, demand_total))
    if supply_total > 0:
        arcs.append((reservoir, sink, supply_total))

    value, flows = _solve_int_max_flow(n + 3, arcs, source, sink, backend)
    required = supply_total + demand_total

    if value == required:
        edge_flows = []
        net_out = [0] * n
        for k in kept:
            i, j = g.edges[k]
            f = flows[forward_ids[k]] - flows[backward_ids[k]]
            edge_flows.append(f)
            net_out[i] += f
            net_out[j] -= f
        witness = DemandWitness(
            edges=tuple(g.edges[k] for k in kept),
            edge_flows=tuple(edge_flows),
            node_net_outflow=tuple(net_out),
            scale=scale,
        )
        return FeasibilityResult(True, witness, None, scale)

    reachable = _residual_reachable(n + 3, arcs, flows, source)
    if reservoir in reachable:
        # Complement side: the unreached nodes must absorb more than can reach them.
        nodes = tuple(sorted(i for i in range(n) if i not in reachable))
        demand = sum(-b[i] for i in nodes)
        kind = "demand-excess"
    else:
        nodes = tuple(sorted(i for i in range(n) if i in reachable))
        demand = sum(b[i] for i in nodes)
        kind = "supply-excess"
    inside = set(nodes)
    capacity = sum(
        caps[pos]
        for pos, k in enumerate(kept)
        if (g.edges[k][0] in inside) != (g.edges[k][1] in inside)
    )
    capacity += k_scaled * sum(1 for i in spec.slack_nodes if i in inside)
    cut = CutCertificate(
        kind=kind,
        nodes=nodes,
        demand_scaled=demand,
        capacity_scaled=capacity,
        scale=scale,
    )
    return FeasibilityResult(False, None, cut, scale)


def _residual_reachable(n, arcs, flows, s):
    out: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (u, v, c), f in zip(arcs, flows):
        if c - f > 0:
            out[u].append((v, c - f))
        if f > 0:
            out[v].append((u, f))
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v, _ in out[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def verify_demand_witness(
    g: Graph, excluded: Iterable[Edge], spec: DemandSpec, witness: DemandWitness
) -> bool:
    """Re-verify a witness against the raw instance with integer arithmetic."""
    scale = witness.scale
    kept = _kept_edges(g, excluded)
    if tuple(g.edges[k] for k in kept) != witness.edges:
        return False
    b = _scaled_injections(g, spec, scale)
    k_scaled = scaled(spec.slack_bound, scale)
    net = [0] * g.node_count
    for (i, j), f, k in zip(witness.edges, witness.edge_flows, kept):
        if abs(f) > scaled(float(g.weights[k]), scale):
            return False
        net[i] += f
        net[j] -= f
    if tuple(net) != witness.node_net_outflow:
        return False
    for i in range(g.node_count):
        if i in spec.slack_nodes:
            if abs(net[i] - b[i]) > k_scaled:
                return False
        elif net[i] != b[i]:
            return False
    return True


def verify_cut_certificate(
    g: Graph, excluded: Iterable[Edge], spec: DemandSpec, cut: CutCertificate
) -> bool:
    """Re-verify that a cut certificate proves infeasibility."""
    scale = cut.scale
    inside = set(cut.nodes)
    b = _scaled_injections(g, spec, scale)
    k_scaled = scaled(spec.slack_bound, scale)
    sign = 1 if cut.kind == "supply-excess" else -1
    demand = sum(sign * b[i] for i in inside)
    kept = _kept_edges(g, excluded)
    capacity = sum(
        scaled(float(g.weights[k]), scale)
        for k in kept
        if (g.edges[k][0] in inside) != (g.edges[k][1] in inside)
    )
    capacity += k_scaled * sum(1 for i in spec.slack_nodes if i in inside)
    if demand != cut.demand_scaled or capacity != cut.capacity_scaled:
        return False
    return demand > capacity
