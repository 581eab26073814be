"""Synthetic evolving scale-free graphs as tick-stamped operation streams.

Tick ``i`` (1-based) adds node ``i - 1`` and attaches it to up to
``m_attach`` distinct existing nodes chosen with probability proportional to
their degree. After each attachment edge, with probability ``p_remove`` one existing
edge is removed in the same tick: a uniformly random node that has edges,
then a uniformly random edge of that node. No node is ever removed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

from .deltalog import TimedOp
from .errors import InvalidParams
from .graph import GraphOp, OpKind, make_edge


@dataclass(frozen=True)
class GenParams:
    n_nodes: int
    m_attach: int = 1
    p_remove: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_nodes < 0:
            raise InvalidParams("n_nodes must be non-negative")
        if self.m_attach < 1:
            raise InvalidParams("m_attach must be at least 1")
        if not 0.0 <= self.p_remove < 1.0:
            raise InvalidParams("p_remove must lie in [0, 1)")


@dataclass(frozen=True)
class StreamStats:
    inserted_nodes: int = 0
    inserted_edges: int = 0
    removed_edges: int = 0
    removed_nodes: int = 0
    total_ops: int = 0

    def line(self) -> str:
        return (
            f"inserted_nodes={self.inserted_nodes} inserted_edges={self.inserted_edges} "
            f"removed_edges={self.removed_edges} total_ops={self.total_ops}"
        )


class _IndexedSet:
    """Set with O(1) add, remove and uniform sampling."""

    def __init__(self):
        self.items: list = []
        self.pos: dict = {}

    def __len__(self):
        return len(self.items)

    def __contains__(self, x):
        return x in self.pos

    def add(self, x) -> None:
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def remove(self, x) -> None:
        i = self.pos.pop(x)
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def sample(self, rng: random.Random):
        return self.items[rng.randrange(len(self.items))]


def _pick_targets(rng: random.Random, new: int, k: int, edges: _IndexedSet, n_existing: int) -> list[int]:
    # A uniform edge endpoint is a degree-proportional node. Falls back to
    # uniform choice when the degree mass is exhausted.
    chosen: list[int] = []
    seen = {new}
    tries = 0
    while len(chosen) < k and edges and tries < 20 * k:
        tries += 1
        a, b = edges.sample(rng)
        x = a if rng.random() < 0.5 else b
        if x not in seen:
            seen.add(x)
            chosen.append(x)
    if len(chosen) < k:
        rest = [x for x in range(n_existing) if x not in seen]
        chosen.extend(rng.sample(rest, k - len(chosen)))
    return chosen


def generate(p: GenParams) -> list[TimedOp]:
    p.validate()
    rng = random.Random(p.seed)
    edges = _IndexedSet()
    nbrs: dict[int, _IndexedSet] = {}
    active = _IndexedSet()  # nodes with at least one edge
    out: list[TimedOp] = []

    def emit(op: GraphOp, t: int) -> None:
        out.append(TimedOp(op, t, len(out)))

    def link(a: int, b: int) -> None:
        edges.add(make_edge(a, b))
        for x, y in ((a, b), (b, a)):
            nbrs[x].add(y)
            active.add(x)

    def unlink(a: int, b: int) -> None:
        edges.remove(make_edge(a, b))
        for x, y in ((a, b), (b, a)):
            nbrs[x].remove(y)
            if not nbrs[x]:
                active.remove(x)

    for node in range(p.n_nodes):
        t = node + 1
        nbrs[node] = _IndexedSet()
        emit(GraphOp.add_node(node), t)
        k = min(p.m_attach, node)
        for target in (_pick_targets(rng, node, k, edges, node) if k else ()):
            link(node, target)
            emit(GraphOp.add_edge(node, target), t)
            if p.p_remove and rng.random() < p.p_remove:
                # node-uniform churn: hubs keep their preferential growth
                x = active.sample(rng)
                y = nbrs[x].sample(rng)
                unlink(x, y)
                emit(GraphOp.rem_edge(x, y), t)
    return out


def stats(stream: Iterable[TimedOp]) -> StreamStats:
    counts = {k: 0 for k in OpKind}
    total = 0
    for rec in stream:
        counts[rec.op.kind] += 1
        total += 1
    return StreamStats(
        inserted_nodes=counts[OpKind.ADD_NODE],
        inserted_edges=counts[OpKind.ADD_EDGE],
        removed_edges=counts[OpKind.REM_EDGE],
        removed_nodes=counts[OpKind.REM_NODE],
        total_ops=total,
    )


# Roughly the op mix of the reference synthetic dataset (5063 nodes, 64410 ops).
REFERENCE_PARAMS = GenParams(n_nodes=5063, m_attach=8, p_remove=0.45, seed=2012)
