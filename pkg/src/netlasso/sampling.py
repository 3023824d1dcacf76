"""Sampling-set construction: boundary-aware greedy and uniform random."""

from __future__ import annotations

import numpy as np

from .errors import BudgetExceedsNodesError
from .graphs import Graph, Partition, boundary


def _check_budget(g: Graph, budget: int) -> int:
    budget = int(budget)
    if not 1 <= budget <= g.node_count:
        raise BudgetExceedsNodesError(
            f"budget {budget} outside 1..{g.node_count}"
        )
    return budget


# Per-pick discount applied to a node's boundary-incidence score for every
# sample its cluster already holds; spreads the budget across clusters in
# proportion to their boundary mass instead of exhausting one cluster first.
SATURATION_DISCOUNT = 0.5


def sample_boundary_aware(g: Graph, partition: Partition, budget: int) -> tuple[int, ...]:
    """Deterministically pick nodes that pin down cluster boundaries.

    Greedy: repeatedly take the node with the highest incident boundary
    weight, discounted by SATURATION_DISCOUNT for each sample its cluster
    already received. Ties fall back to the node's strongest in-cluster
    edge to a boundary endpoint (the support edge the sufficient
    certificate condition needs), then descending weighted degree, then
    smallest node id. Nodes touching no boundary therefore enter in
    support-weight order, and once the boundary is exhausted the remaining
    budget fills by weighted degree, so a single-cluster partition reduces
    to a pure weighted-degree ranking.
    """
    budget = _check_budget(g, budget)
    partition.check_against(g)
    lab = partition.labels
    bnd = boundary(g, partition)

    cross_weight = np.zeros(g.node_count)
    endpoints = set()
    for i, j in bnd:
        w = g.weight(i, j)
        cross_weight[i] += w
        cross_weight[j] += w
        endpoints.update((i, j))
    support = np.zeros(g.node_count)
    for u in endpoints:
        cluster = lab[u]
        for v, k in g.neighbors(u):
            if lab[v] == cluster:
                support[v] = max(support[v], float(g.weights[k]))
    wdeg = g.weighted_degrees()

    chosen: list[int] = []
    cluster_counts = [0] * partition.cluster_count
    remaining = set(range(g.node_count))
    while len(chosen) < budget:
        best = min(
            remaining,
            key=lambda v: (
                -cross_weight[v] * SATURATION_DISCOUNT ** cluster_counts[lab[v]],
                -support[v],
                -wdeg[v],
                v,
            ),
        )
        chosen.append(best)
        cluster_counts[lab[best]] += 1
        remaining.discard(best)
    return tuple(sorted(chosen))


def sample_uniform(g: Graph, budget: int, seed: int) -> tuple[int, ...]:
    """Budget-many distinct nodes drawn uniformly without replacement."""
    budget = _check_budget(g, budget)
    rng = np.random.default_rng(seed)
    nodes = rng.choice(g.node_count, size=budget, replace=False)
    return tuple(sorted(int(i) for i in nodes))
