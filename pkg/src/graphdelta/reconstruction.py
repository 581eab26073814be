"""Forward, backward and partial snapshot reconstruction.

Forward replay walks the log in ascending seq; backward replay applies the
inverse of each record in descending seq. The descending order is what
makes a RemEdge...RemEdge, RemNode group at one tick invert cleanly.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional, Sequence

from .catalog import CatalogEntry, SelectionPolicy, select_base
from .deltalog import DeltaLog, TimedOp
from .errors import PreconditionViolated, SeedAbsentAtTarget, TargetOutOfRange
from .graph import MutableGraph, OpKind, Snapshot, make_edge
from .index import NodeIndex


def replay_forward(g: MutableGraph, records: Iterable[TimedOp]) -> None:
    for rec in records:
        g.apply(rec.op)


def replay_backward(g: MutableGraph, records: Iterable[TimedOp]) -> None:
    """Apply inverses; ``records`` must already be in descending seq order."""
    for rec in records:
        g.apply(rec.op.inverse())


def for_rec(base: Snapshot, log: DeltaLog, t_target: int) -> Snapshot:
    if not base.as_of <= t_target <= log.t_cur:
        raise TargetOutOfRange(f"forward target {t_target} outside [{base.as_of}, {log.t_cur}]")
    if t_target == base.as_of:
        return base
    g = MutableGraph.from_snapshot(base)
    replay_forward(g, log.slice(base.as_of, t_target, "forward"))
    return g.freeze(t_target)


def back_rec(base: Snapshot, log: DeltaLog, t_target: int) -> Snapshot:
    if not log.t0 <= t_target <= base.as_of:
        raise TargetOutOfRange(f"backward target {t_target} outside [{log.t0}, {base.as_of}]")
    if t_target == base.as_of:
        return base
    g = MutableGraph.from_snapshot(base)
    replay_backward(g, log.slice(t_target, base.as_of, "backward"))
    return g.freeze(t_target)


def _touching_backward(log: DeltaLog, nodes: set, t_a: int, t_b: int, node_index: Optional[NodeIndex]):
    if node_index is not None:
        return reversed(node_index.ops_for_nodes(nodes, t_a, t_b))
    return (r for r in log.slice(t_a, t_b, "backward") if r.op.u in nodes or r.op.v in nodes)


def _partial_pass(base: Snapshot, log: DeltaLog, t_target: int, relevant: set, node_index):
    """State at ``t_target`` of the nodes in ``relevant`` and of every edge touching them."""
    present = {u: u in base.nodes for u in relevant}
    adj = base.adjacency
    edges = set()
    for u in relevant:
        if present[u]:
            for x in adj[u]:
                edges.add(make_edge(u, x))
    for rec in _touching_backward(log, relevant, t_target, base.as_of, node_index):
        op = rec.op
        kind = op.kind
        if kind is OpKind.ADD_NODE:
            if not present[op.u]:
                raise PreconditionViolated(op.inverse(), "node not present")
            present[op.u] = False
        elif kind is OpKind.REM_NODE:
            if present[op.u]:
                raise PreconditionViolated(op.inverse(), "node already present")
            present[op.u] = True
        elif kind is OpKind.ADD_EDGE:
            if op.edge not in edges:
                raise PreconditionViolated(op.inverse(), "edge not present")
            edges.remove(op.edge)
        else:
            if op.edge in edges:
                raise PreconditionViolated(op.inverse(), "edge already present")
            edges.add(op.edge)
    return present, edges


def partial_back_rec(
    base: Snapshot,
    log: DeltaLog,
    t_target: int,
    seeds: Iterable[int],
    hops: int,
    node_index: Optional[NodeIndex] = None,
) -> Snapshot:
    """Backward reconstruction of only the ``hops``-neighborhood of ``seeds``.

    Each pass replays just the records touching the current relevant set. The
    relevant set grows to the neighborhood found at ``t_target`` until it stops
    changing, which takes at most ``hops + 1`` passes. The result equals
    ``back_rec`` followed by restriction to that neighborhood.
    """
    if not log.t0 <= t_target <= base.as_of:
        raise TargetOutOfRange(f"backward target {t_target} outside [{log.t0}, {base.as_of}]")
    if hops < 0:
        raise ValueError("hops must be non-negative")
    seeds = set(seeds)
    relevant = set(seeds)
    for _ in range(hops + 2):
        present, edges = _partial_pass(base, log, t_target, relevant, node_index)
        for s in seeds:
            if not present[s]:
                raise SeedAbsentAtTarget(s, t_target)
        nbrs: dict[int, list[int]] = {}
        for a, b in edges:
            nbrs.setdefault(a, []).append(b)
            nbrs.setdefault(b, []).append(a)
        depth = {s: 0 for s in seeds}
        queue = deque(seeds)
        while queue:
            x = queue.popleft()
            if depth[x] == hops or x not in relevant:
                continue
            for y in nbrs.get(x, ()):
                if y not in depth:
                    depth[y] = depth[x] + 1
                    queue.append(y)
        ball = set(depth)
        if ball <= relevant:
            kept = frozenset(e for e in edges if e[0] in ball and e[1] in ball)
            return Snapshot(frozenset(ball), kept, t_target)
        relevant |= ball
    raise RuntimeError("partial reconstruction did not converge")


def reconstruct(
    catalog: Sequence[CatalogEntry],
    log: DeltaLog,
    t_target: int,
    policy: SelectionPolicy = SelectionPolicy.OPERATION_BASED,
) -> Snapshot:
    if not log.t0 <= t_target <= log.t_cur:
        raise TargetOutOfRange(f"target {t_target} outside [{log.t0}, {log.t_cur}]")
    entry = select_base(catalog, log, t_target, policy)
    base = entry.snapshot
    if base.as_of < t_target:
        return for_rec(base, log, t_target)
    if base.as_of > t_target:
        return back_rec(base, log, t_target)
    return base
