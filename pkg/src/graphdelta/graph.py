"""Undirected graph snapshots, the four mutation primitives, and graph measures.

A :class:`Snapshot` is an immutable value. Bulk mutation (reconstruction,
ingest) goes through :class:`MutableGraph`, which is frozen back into a
snapshot when done.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from .errors import EmptyGraph, NodeAbsent, ParseError, PreconditionViolated

Edge = tuple[int, int]

# Diameter of a disconnected graph.
INFINITE = math.inf


def make_edge(a: int, b: int) -> Edge:
    """Canonical undirected edge ``(min, max)``. Self-loops are rejected."""
    if a == b:
        raise ValueError(f"self-loop on node {a}")
    return (a, b) if a < b else (b, a)


class OpKind(enum.Enum):
    ADD_NODE = "AN"
    REM_NODE = "RN"
    ADD_EDGE = "AE"
    REM_EDGE = "RE"

    @property
    def is_node_op(self) -> bool:
        return self in (OpKind.ADD_NODE, OpKind.REM_NODE)


_INVERSE = {
    OpKind.ADD_NODE: OpKind.REM_NODE,
    OpKind.REM_NODE: OpKind.ADD_NODE,
    OpKind.ADD_EDGE: OpKind.REM_EDGE,
    OpKind.REM_EDGE: OpKind.ADD_EDGE,
}


@dataclass(frozen=True)
class GraphOp:
    """One structural update. Node ops use ``u`` only; edge ops carry ``u < v``."""

    kind: OpKind
    u: int
    v: Optional[int] = None

    def __post_init__(self):
        if self.kind.is_node_op:
            if self.v is not None:
                raise ValueError(f"{self.kind.name} takes a single node")
        else:
            if self.v is None:
                raise ValueError(f"{self.kind.name} takes an edge")
            if self.u >= self.v:
                # keep the canonical (min, max) orientation
                a, b = make_edge(self.u, self.v)
                object.__setattr__(self, "u", a)
                object.__setattr__(self, "v", b)

    @classmethod
    def add_node(cls, v: int) -> "GraphOp":
        return cls(OpKind.ADD_NODE, v)

    @classmethod
    def rem_node(cls, v: int) -> "GraphOp":
        return cls(OpKind.REM_NODE, v)

    @classmethod
    def add_edge(cls, a: int, b: int) -> "GraphOp":
        return cls(OpKind.ADD_EDGE, *make_edge(a, b))

    @classmethod
    def rem_edge(cls, a: int, b: int) -> "GraphOp":
        return cls(OpKind.REM_EDGE, *make_edge(a, b))

    @property
    def edge(self) -> Edge:
        if self.v is None:
            raise AttributeError("node operation has no edge")
        return (self.u, self.v)

    @property
    def nodes(self) -> tuple[int, ...]:
        return (self.u,) if self.v is None else (self.u, self.v)

    def touches(self, node: int) -> bool:
        return self.u == node or self.v == node

    def inverse(self) -> "GraphOp":
        return GraphOp(_INVERSE[self.kind], self.u, self.v)

    def __str__(self) -> str:
        args = self.u if self.v is None else f"{self.u},{self.v}"
        return f"{self.kind.name}({args})"


def invert(op: GraphOp) -> GraphOp:
    return op.inverse()


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Frozen graph state at tick ``as_of``.

    Equality compares node set, edge set and ``as_of``.
    """

    nodes: frozenset
    edges: frozenset
    as_of: int = 0

    def __post_init__(self):
        if not isinstance(self.nodes, frozenset):
            object.__setattr__(self, "nodes", frozenset(self.nodes))
        if not isinstance(self.edges, frozenset):
            object.__setattr__(self, "edges", frozenset(make_edge(*e) for e in self.edges))

    @classmethod
    def empty(cls, as_of: int = 0) -> "Snapshot":
        return cls(frozenset(), frozenset(), as_of)

    @classmethod
    def build(cls, nodes: Iterable[int], edges: Iterable[tuple[int, int]], as_of: int = 0) -> "Snapshot":
        """Construct and validate; endpoints must be nodes."""
        snap = cls(frozenset(nodes), frozenset(make_edge(a, b) for a, b in edges), as_of)
        for a, b in snap.edges:
            if a not in snap.nodes or b not in snap.nodes:
                raise ValueError(f"edge ({a},{b}) has an endpoint outside the node set")
        return snap

    def __eq__(self, other):
        if not isinstance(other, Snapshot):
            return NotImplemented
        return self.as_of == other.as_of and self.nodes == other.nodes and self.edges == other.edges

    def __hash__(self):
        return hash((self.as_of, self.nodes, self.edges))

    def same_graph(self, other: "Snapshot") -> bool:
        """Equality ignoring ``as_of``."""
        return self.nodes == other.nodes and self.edges == other.edges

    def at(self, as_of: int) -> "Snapshot":
        return Snapshot(self.nodes, self.edges, as_of)

    @cached_property
    def adjacency(self) -> Mapping[int, frozenset]:
        adj: dict[int, set] = {v: set() for v in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return {v: frozenset(n) for v, n in adj.items()}

    def neighbors(self, v: int) -> frozenset:
        try:
            return self.adjacency[v]
        except KeyError:
            raise NodeAbsent(v) from None

    def has_node(self, v: int) -> bool:
        return v in self.nodes

    def has_edge(self, a: int, b: int) -> bool:
        return a != b and make_edge(a, b) in self.edges

    def restrict(self, keep: Iterable[int]) -> "Snapshot":
        """Induced subgraph on ``keep`` (nodes outside the snapshot are ignored)."""
        keep = frozenset(keep) & self.nodes
        edges = frozenset(e for e in self.edges if e[0] in keep and e[1] in keep)
        return Snapshot(keep, edges, self.as_of)

    def __repr__(self) -> str:
        return f"Snapshot(as_of={self.as_of}, |V|={len(self.nodes)}, |E|={len(self.edges)})"


class MutableGraph:
    """Adjacency-set working graph used while replaying operations."""

    __slots__ = ("adj", "n_edges")

    def __init__(self, adj: Optional[dict[int, set]] = None):
        self.adj: dict[int, set] = adj if adj is not None else {}
        self.n_edges = sum(len(n) for n in self.adj.values()) // 2

    @classmethod
    def from_snapshot(cls, snap: Snapshot) -> "MutableGraph":
        g = cls({v: set(n) for v, n in snap.adjacency.items()})
        return g

    def copy(self) -> "MutableGraph":
        return MutableGraph({v: set(n) for v, n in self.adj.items()})

    def freeze(self, as_of: int) -> Snapshot:
        edges = frozenset((a, b) for a, nbrs in self.adj.items() for b in nbrs if a < b)
        return Snapshot(frozenset(self.adj), edges, as_of)

    def has_node(self, v: int) -> bool:
        return v in self.adj

    def has_edge(self, a: int, b: int) -> bool:
        nbrs = self.adj.get(a)
        return nbrs is not None and b in nbrs

    def neighbors(self, v: int) -> set:
        try:
            return self.adj[v]
        except KeyError:
            raise NodeAbsent(v) from None

    def check(self, op: GraphOp) -> None:
        """Raise PreconditionViolated if ``op`` does not apply."""
        kind, u, v = op.kind, op.u, op.v
        adj = self.adj
        if kind is OpKind.ADD_NODE:
            if u in adj:
                raise PreconditionViolated(op, "node already present")
        elif kind is OpKind.REM_NODE:
            if u not in adj:
                raise PreconditionViolated(op, "node not present")
        elif kind is OpKind.ADD_EDGE:
            if u not in adj or v not in adj:
                raise PreconditionViolated(op, "endpoint not present")
            if v in adj[u]:
                raise PreconditionViolated(op, "edge already present")
        else:
            if u not in adj or v not in adj[u]:
                raise PreconditionViolated(op, "edge not present")

    def apply(self, op: GraphOp) -> None:
        self.check(op)
        kind, u, v = op.kind, op.u, op.v
        adj = self.adj
        if kind is OpKind.ADD_NODE:
            adj[u] = set()
        elif kind is OpKind.REM_NODE:
            for x in adj.pop(u):
                adj[x].discard(u)
                self.n_edges -= 1
        elif kind is OpKind.ADD_EDGE:
            adj[u].add(v)
            adj[v].add(u)
            self.n_edges += 1
        else:
            adj[u].discard(v)
            adj[v].discard(u)
            self.n_edges -= 1


GraphLike = Union[Snapshot, MutableGraph]


def check_op(g: GraphLike, op: GraphOp) -> None:
    """Precondition check against either graph representation."""
    if isinstance(g, MutableGraph):
        g.check(op)
        return
    kind = op.kind
    if kind is OpKind.ADD_NODE:
        if g.has_node(op.u):
            raise PreconditionViolated(op, "node already present")
    elif kind is OpKind.REM_NODE:
        if not g.has_node(op.u):
            raise PreconditionViolated(op, "node not present")
    elif kind is OpKind.ADD_EDGE:
        if not (g.has_node(op.u) and g.has_node(op.v)):
            raise PreconditionViolated(op, "endpoint not present")
        if g.has_edge(op.u, op.v):
            raise PreconditionViolated(op, "edge already present")
    elif not g.has_edge(op.u, op.v):
        raise PreconditionViolated(op, "edge not present")


def apply_op(s: Snapshot, op: GraphOp) -> Snapshot:
    """Return a new snapshot with ``op`` applied. ``s`` is left untouched."""
    g = MutableGraph.from_snapshot(s)
    g.apply(op)
    return g.freeze(s.as_of)


def apply_ops(s: Snapshot, ops: Iterable[GraphOp]) -> Snapshot:
    g = MutableGraph.from_snapshot(s)
    for op in ops:
        g.apply(op)
    return g.freeze(s.as_of)


_DIFF_ORDER = {OpKind.REM_EDGE: 0, OpKind.REM_NODE: 1, OpKind.ADD_NODE: 2, OpKind.ADD_EDGE: 3}


def order_delta(ops: Iterable[GraphOp]) -> list[GraphOp]:
    """Order a set delta so it applies cleanly: edge removals, node removals, node adds, edge adds."""
    return sorted(ops, key=lambda op: (_DIFF_ORDER[op.kind], op.u, op.v if op.v is not None else -1))


def diff(s_k: Snapshot, s_l: Snapshot) -> set[GraphOp]:
    """The unique minimal operation set turning ``s_k`` into ``s_l``.

    Edges lost because an endpoint disappears are covered by that endpoint's
    RemNode, so they get no RemEdge of their own.
    """
    ops: set[GraphOp] = set()
    for v in s_l.nodes - s_k.nodes:
        ops.add(GraphOp.add_node(v))
    for v in s_k.nodes - s_l.nodes:
        ops.add(GraphOp.rem_node(v))
    for a, b in s_l.edges - s_k.edges:
        ops.add(GraphOp(OpKind.ADD_EDGE, a, b))
    surviving = s_l.nodes
    for a, b in s_k.edges - s_l.edges:
        if a in surviving and b in surviving:
            ops.add(GraphOp(OpKind.REM_EDGE, a, b))
    return ops


def apply_delta(s: Snapshot, ops: Iterable[GraphOp], as_of: Optional[int] = None) -> Snapshot:
    out = apply_ops(s, order_delta(ops))
    return out if as_of is None else out.at(as_of)


def degree(s: GraphLike, v: int) -> int:
    return len(s.neighbors(v))


def induced_subgraph(s: Snapshot, v: int) -> Snapshot:
    """Subgraph on ``v`` and its neighbors, with every edge of ``s`` among them."""
    return s.restrict(s.neighbors(v) | {v})


def avg_degree(s: Snapshot) -> Fraction:
    if not s.nodes:
        raise EmptyGraph("average degree of an empty graph")
    return Fraction(2 * len(s.edges), len(s.nodes))


def _bfs_depths(adj: Mapping[int, Iterable[int]], src: int) -> dict[int, int]:
    depth = {src: 0}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        d = depth[x] + 1
        for y in adj[x]:
            if y not in depth:
                depth[y] = d
                queue.append(y)
    return depth


def diameter(s: Snapshot) -> Union[int, float]:
    """Exact diameter by BFS from every node; ``INFINITE`` if disconnected. O(V(V+E))."""
    if not s.nodes:
        raise EmptyGraph("diameter of an empty graph")
    adj = s.adjacency
    n = len(adj)
    best = 0
    for src in adj:
        depth = _bfs_depths(adj, src)
        if len(depth) < n:
            return INFINITE
        best = max(best, max(depth.values()))
    return best


def component_count(s: Snapshot) -> int:
    adj = s.adjacency
    seen: set[int] = set()
    count = 0
    for v in adj:
        if v in seen:
            continue
        count += 1
        seen.update(_bfs_depths(adj, v))
    return count


# -- snapshot file format ----------------------------------------------------


def format_snapshot(s: Snapshot) -> str:
    lines = [f"SNAP {s.as_of}"]
    lines.extend(f"N {v}" for v in sorted(s.nodes))
    lines.extend(f"E {a} {b}" for a, b in sorted(s.edges))
    return "\n".join(lines) + "\n"


def parse_snapshot(text: str) -> Snapshot:
    lines = text.split("\n")
    if not lines or lines[-1] != "":
        raise ParseError(len(lines), "missing final newline")
    lines.pop()
    if not lines:
        raise ParseError(1, "empty file")
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != "SNAP":
        raise ParseError(1, f"bad header {lines[0]!r}")
    as_of = _parse_uint(head[1], 1)
    nodes: list[int] = []
    edges: list[Edge] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if parts[0] == "N" and len(parts) == 2:
            if edges:
                raise ParseError(lineno, "node line after edge lines")
            nodes.append(_parse_uint(parts[1], lineno))
        elif parts[0] == "E" and len(parts) == 3:
            a, b = _parse_uint(parts[1], lineno), _parse_uint(parts[2], lineno)
            if a >= b:
                raise ParseError(lineno, "edge endpoints must satisfy a < b")
            edges.append((a, b))
        else:
            raise ParseError(lineno, f"unrecognized line {line!r}")
    if nodes != sorted(set(nodes)):
        raise ParseError(2, "node lines must be strictly ascending")
    if edges != sorted(set(edges)):
        raise ParseError(len(nodes) + 2, "edge lines must be strictly ascending")
    try:
        return Snapshot.build(nodes, edges, as_of)
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def _parse_uint(token: str, lineno: int) -> int:
    if not token.isdigit() or (len(token) > 1 and token[0] == "0"):
        raise ParseError(lineno, f"expected an unsigned integer, got {token!r}")
    return int(token)


def write_snapshot(path: Union[str, Path], s: Snapshot) -> None:
    Path(path).write_bytes(format_snapshot(s).encode("ascii"))


def read_snapshot(path: Union[str, Path]) -> Snapshot:
    return parse_snapshot(Path(path).read_bytes().decode("ascii"))
