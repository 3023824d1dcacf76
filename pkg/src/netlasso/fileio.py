"""Line-oriented text formats for graphs, signals, partitions and node sets.

Graph files: a header line ``N <node_count>`` followed by one ``i j w`` line
per edge (0-based endpoints, decimal weight). Signals and observation label
files: ``i v`` per line. Partitions: ``i c`` per line mapping node to cluster
index. Node sets: one integer per line. Blank lines and ``#`` comments are
ignored everywhere. Parsers raise FileFormatError with the offending line
number on any invariant violation.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .errors import FileFormatError, NetlassoError
from .graphs import Graph, Observations, Partition, as_signal, validate_graph


def _content_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def read_graph(path: str | os.PathLike) -> Graph:
    node_count = None
    edges = []
    weights = []
    seen = set()
    for lineno, line in _content_lines(path):
        parts = line.split()
        if node_count is None:
            if len(parts) != 2 or parts[0] != "N":
                raise FileFormatError("expected header 'N <node_count>'", path, lineno)
            try:
                node_count = int(parts[1])
            except ValueError:
                raise FileFormatError(f"bad node count {parts[1]!r}", path, lineno) from None
            if node_count <= 0:
                raise FileFormatError("node count must be positive", path, lineno)
            continue
        if len(parts) != 3:
            raise FileFormatError("expected edge line 'i j w'", path, lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise FileFormatError(f"unparsable edge line {line!r}", path, lineno) from None
        # Validate each edge at its own line so the report is actionable.
        try:
            validate_graph([(i, j)], [w], node_count)
        except NetlassoError as exc:
            raise FileFormatError(str(exc), path, lineno) from exc
        key = (min(i, j), max(i, j))
        if key in seen:
            raise FileFormatError(f"duplicate edge {key}", path, lineno)
        seen.add(key)
        edges.append((i, j))
        weights.append(w)
    if node_count is None:
        raise FileFormatError("missing header 'N <node_count>'", path, 1)
    return validate_graph(edges, weights, node_count)


def write_graph(path: str | os.PathLike, g: Graph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"N {g.node_count}\n")
        for (i, j), w in zip(g.edges, g.weights):
            fh.write(f"{i} {j} {float(w)!r}\n")


def read_value_map(path: str | os.PathLike) -> dict[int, float]:
    """Parse ``i v`` lines into a node -> value mapping."""
    values: dict[int, float] = {}
    for lineno, line in _content_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise FileFormatError("expected line 'i v'", path, lineno)
        try:
            i = int(parts[0])
            v = float(parts[1])
        except ValueError:
            raise FileFormatError(f"unparsable line {line!r}", path, lineno) from None
        if i < 0:
            raise FileFormatError(f"negative node id {i}", path, lineno)
        if i in values:
            raise FileFormatError(f"duplicate entry for node {i}", path, lineno)
        if not np.isfinite(v):
            raise FileFormatError(f"non-finite value for node {i}", path, lineno)
        values[i] = v
    return values


def read_signal(path: str | os.PathLike, g: Graph) -> np.ndarray:
    """Read a full signal on g; every node must be assigned exactly once."""
    values = read_value_map(path)
    missing = set(range(g.node_count)) - set(values)
    extra = set(values) - set(range(g.node_count))
    if missing or extra:
        raise FileFormatError(
            f"signal must cover exactly nodes 0..{g.node_count - 1} "
            f"(missing {sorted(missing)[:5]}, extra {sorted(extra)[:5]})",
            path,
        )
    return as_signal(g, [values[i] for i in range(g.node_count)])


def write_value_map(path: str | os.PathLike, values) -> None:
    if isinstance(values, np.ndarray):
        items = list(enumerate(values.tolist()))
    elif isinstance(values, dict):
        items = sorted(values.items())
    else:
        items = list(values)
    with open(path, "w", encoding="utf-8") as fh:
        for i, v in items:
            fh.write(f"{i} {float(v)!r}\n")


def read_partition(path: str | os.PathLike, g: Graph | None = None) -> Partition:
    assignment = read_value_map(path)
    labels: dict[int, int] = {}
    for i, c in assignment.items():
        if c != int(c):
            raise FileFormatError(f"cluster index for node {i} must be an integer", path)
        labels[i] = int(c)
    n = max(labels) + 1 if labels else 0
    if set(labels) != set(range(n)):
        raise FileFormatError("partition lines must cover exactly nodes 0..N-1", path)
    try:
        part = Partition.from_labels([labels[i] for i in range(n)])
    except NetlassoError as exc:
        raise FileFormatError(str(exc), path) from exc
    if g is not None and part.node_count != g.node_count:
        raise FileFormatError(
            f"partition covers {part.node_count} nodes, graph has {g.node_count}", path
        )
    return part


def write_partition(path: str | os.PathLike, partition: Partition) -> None:
    write_value_map(path, list(enumerate(partition.labels.tolist())))


def read_node_set(path: str | os.PathLike) -> tuple[int, ...]:
    nodes = []
    seen = set()
    for lineno, line in _content_lines(path):
        try:
            i = int(line)
        except ValueError:
            raise FileFormatError(f"expected a node id, got {line!r}", path, lineno) from None
        if i < 0:
            raise FileFormatError(f"negative node id {i}", path, lineno)
        if i in seen:
            raise FileFormatError(f"duplicate node {i}", path, lineno)
        seen.add(i)
        nodes.append(i)
    return tuple(sorted(nodes))


def write_node_set(path: str | os.PathLike, nodes: Iterable[int]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in sorted(int(i) for i in nodes):
            fh.write(f"{i}\n")


def read_observations(path: str | os.PathLike, x_true: np.ndarray | None = None) -> Observations:
    """Read labels ``i y`` into Observations.

    Realized noise is recovered as y - x_true when the true signal is given,
    otherwise recorded as zero (unknown).
    """
    values = read_value_map(path)
    nodes = tuple(sorted(values))
    y = np.array([values[i] for i in nodes], dtype=np.float64)
    if x_true is not None:
        if nodes and nodes[-1] >= len(x_true):
            raise FileFormatError(
                f"observed node {nodes[-1]} outside the true signal's graph", path
            )
        eps = y - np.asarray(x_true, dtype=np.float64)[list(nodes)]
    else:
        eps = np.zeros(len(nodes))
    return Observations(nodes=nodes, y=y, eps=eps)


def write_observations(path: str | os.PathLike, obs: Observations) -> None:
    write_value_map(path, list(zip(obs.nodes, obs.y.tolist())))
