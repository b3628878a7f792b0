"""Acyclic fork-join network topologies.

Nodes are numbered ``1..n`` everywhere a user can see them. The text format
is line oriented::

    # comment
    nodes 5
    edge 1 3
    edge 1 4

Blank lines and ``#`` comments are ignored; trailing ``# ...`` on a line is
allowed. Edges are directed from the first node to the second.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from pathlib import Path

import numpy as np

from .maxplus import EPS, MaxPlusMatrix

__all__ = [
    "Topology",
    "TopologyError",
    "ParseError",
    "validate_acyclic",
    "standard_adjacency",
    "longest_path_length",
    "sources",
    "sinks",
    "fig1",
    "tandem",
    "parse_topology",
    "format_topology",
    "load_topology",
]


class TopologyError(ValueError):
    """Raised for graphs that do not describe a valid acyclic network."""


class ParseError(ValueError):
    """Malformed input text. ``lineno`` is 1-based, or None for whole-file errors."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


def _cycle_check(n: int, edges) -> tuple[bool, list[int]]:
    ts = TopologicalSorter({i: () for i in range(1, n + 1)})
    for i, j in edges:
        ts.add(j, i)
    try:
        ts.prepare()
    except CycleError as exc:
        # graphlib reports the cycle as [v0, ..., v0]
        cyc = list(exc.args[1][:-1])
        k = cyc.index(min(cyc))
        return False, cyc[k:] + cyc[:k]
    return True, []


@dataclass(frozen=True)
class Topology:
    """Directed acyclic network graph on nodes ``1..n``.

    Validated on construction: edges must reference existing nodes and the
    graph must have no self-loops, duplicate edges, or cycles.
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise TopologyError(f"node count must be a positive integer, got {self.n!r}")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        seen = set()
        for i, j in edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise TopologyError(f"edge {i}->{j} references a node outside 1..{self.n}")
            if i == j:
                raise TopologyError(f"self-loop at node {i}")
            if (i, j) in seen:
                raise TopologyError(f"duplicate edge {i}->{j}")
            seen.add((i, j))
        ok, cycle = _cycle_check(self.n, edges)
        if not ok:
            raise TopologyError("graph has a cycle: " + " -> ".join(map(str, cycle + cycle[:1])))
        if self.labels is not None and len(self.labels) != self.n:
            raise TopologyError("labels must name every node")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", edges)

    def predecessors(self, j: int) -> list[int]:
        return [a for a, b in self.edges if b == j]

    def successors(self, i: int) -> list[int]:
        return [b for a, b in self.edges if a == i]

    def topological_order(self) -> list[int]:
        """Nodes in an order where every edge points forward (ties by number)."""
        indeg = {v: 0 for v in range(1, self.n + 1)}
        for _, j in self.edges:
            indeg[j] += 1
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for w in self.successors(v):
                indeg[w] -= 1
                if indeg[w] == 0:
                    ready.append(w)
            ready.sort()
        return order

    def adjacency(self) -> MaxPlusMatrix:
        return standard_adjacency(self)

    @property
    def longest_path(self) -> int:
        return longest_path_length(self)


def validate_acyclic(n: int, edges) -> tuple[bool, list[int]]:
    """Check a raw edge list for cycles without building a Topology.

    Returns ``(True, [])`` for an acyclic graph, otherwise ``(False, cycle)``
    where ``cycle`` lists the nodes of one directed cycle in edge order,
    starting from its smallest node.
    """
    return _cycle_check(n, [(int(i), int(j)) for i, j in edges])


def standard_adjacency(t: Topology) -> MaxPlusMatrix:
    """G with ``G[i, j] = 0`` for each edge i->j and EPS elsewhere (0-based storage)."""
    g = np.full((t.n, t.n), EPS)
    for i, j in t.edges:
        g[i - 1, j - 1] = 0.0
    return MaxPlusMatrix(g)


def longest_path_length(t: Topology) -> int:
    """Maximum number of edges on a directed path, by DP over a topological order."""
    depth = {v: 0 for v in range(1, t.n + 1)}
    for v in t.topological_order():
        for w in t.successors(v):
            depth[w] = max(depth[w], depth[v] + 1)
    return max(depth.values())


def sources(t: Topology) -> set[int]:
    heads = {j for _, j in t.edges}
    return {v for v in range(1, t.n + 1) if v not in heads}


def sinks(t: Topology) -> set[int]:
    tails = {i for i, _ in t.edges}
    return {v for v in range(1, t.n + 1) if v not in tails}


def fig1() -> Topology:
    """The five-node fork-join network: 1->3, 1->4, 2->4, 3->5, 4->5."""
    return Topology(5, ((1, 3), (1, 4), (2, 4), (3, 5), (4, 5)))


def tandem(n: int) -> Topology:
    """Open tandem queues 1 -> 2 -> ... -> n."""
    return Topology(n, tuple((i, i + 1) for i in range(1, n)))


def parse_topology(text: str, source: str | None = None) -> Topology:
    n = None
    edges = []
    edge_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        if key == "nodes":
            if n is not None:
                raise ParseError("duplicate 'nodes' line", lineno, source)
            if len(parts) != 2:
                raise ParseError("expected 'nodes N'", lineno, source)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"node count is not an integer: {parts[1]!r}", lineno, source) from None
            if n < 1:
                raise ParseError("node count must be positive", lineno, source)
        elif key == "edge":
            if n is None:
                raise ParseError("'edge' before 'nodes' header", lineno, source)
            if len(parts) != 3:
                raise ParseError("expected 'edge I J'", lineno, source)
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError("edge endpoints must be integers", lineno, source) from None
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(f"edge {i}->{j} outside nodes 1..{n}", lineno, source)
            if (i, j) in edge_lines:
                raise ParseError(f"duplicate edge {i}->{j} (first on line {edge_lines[(i, j)]})", lineno, source)
            if i == j:
                raise ParseError(f"self-loop at node {i}", lineno, source)
            edge_lines[(i, j)] = lineno
            edges.append((i, j))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno, source)
    if n is None:
        raise ParseError("missing 'nodes N' header", None, source)
    ok, cycle = validate_acyclic(n, edges)
    if not ok:
        first = edge_lines[(cycle[0], cycle[1])]
        raise ParseError("graph has a cycle: " + " -> ".join(map(str, cycle + cycle[:1])), first, source)
    return Topology(n, tuple(edges))


def format_topology(t: Topology) -> str:
    lines = [f"nodes {t.n}"]
    lines += [f"edge {i} {j}" for i, j in t.edges]
    return "\n".join(lines) + "\n"


def load_topology(path: str | Path) -> Topology:
    path = Path(path)
    return parse_topology(path.read_text(encoding="utf-8"), source=str(path))
