import random

import pytest

from graphdelta.deltalog import DeltaLog
from graphdelta.graph import GraphOp, MutableGraph, OpKind


# -- brute-force oracle: plain sets, no library code -------------------------


def oracle_replay(records, t):
    """Snapshot at tick t by replaying every record with tick <= t from empty."""
    nodes, edges = set(), set()
    for rec in records:
        if rec.t > t:
            break
        op = rec.op
        if op.kind is OpKind.ADD_NODE:
            assert op.u not in nodes
            nodes.add(op.u)
        elif op.kind is OpKind.REM_NODE:
            nodes.remove(op.u)
            edges = {e for e in edges if op.u not in e}
        elif op.kind is OpKind.ADD_EDGE:
            assert op.u in nodes and op.v in nodes and (op.u, op.v) not in edges
            edges.add((op.u, op.v))
        else:
            edges.remove((op.u, op.v))
    return nodes, edges


def as_sets(snap):
    return set(snap.nodes), set(snap.edges)


# -- random valid streams ----------------------------------------------------


def random_stream(rng, n_ticks, ops_per_tick, p_rem_node=0.08, start_tick=1):
    """High-level ops ``(t, GraphOp)`` that are valid in order; node ids never reused."""
    nodes, edges = set(), set()
    next_id = 0
    out = []
    for t in range(start_tick, start_tick + n_ticks):
        for _ in range(rng.randint(0, 2 * ops_per_tick)):
            r = rng.random()
            if r < 0.25 or len(nodes) < 2:
                op = GraphOp.add_node(next_id)
                nodes.add(next_id)
                next_id += 1
            elif r < 0.25 + p_rem_node:
                v = rng.choice(sorted(nodes))
                op = GraphOp.rem_node(v)
                nodes.discard(v)
                edges = {e for e in edges if v not in e}
            elif r < 0.75 or not edges:
                a, b = rng.sample(sorted(nodes), 2)
                e = (min(a, b), max(a, b))
                if e in edges:
                    op = GraphOp.rem_edge(*e)
                    edges.discard(e)
                else:
                    op = GraphOp.add_edge(*e)
                    edges.add(e)
            else:
                e = rng.choice(sorted(edges))
                op = GraphOp.rem_edge(*e)
                edges.discard(e)
            out.append((t, op))
    return out


def build_log(stream, t_end=None, t0=0):
    """DeltaLog through append(), tracking the live graph alongside."""
    log = DeltaLog(t0=t0)
    live = MutableGraph()
    for t, op in stream:
        for rec in log.append(op, t, live):
            live.apply(rec.op)
    if t_end is not None:
        log.advance(t_end)
    return log, live.freeze(log.t_cur)


def random_log(seed, n_ticks=60, ops_per_tick=4, **kw):
    rng = random.Random(seed)
    return build_log(random_stream(rng, n_ticks, ops_per_tick, **kw), t_end=n_ticks + 2)


@pytest.fixture
def rng():
    return random.Random(12345)


# -- the small log used by several query examples ----------------------------


@pytest.fixture
def small_stream():
    return [
        (1, GraphOp.add_node(1)),
        (1, GraphOp.add_node(2)),
        (1, GraphOp.add_node(3)),
        (3, GraphOp.add_edge(1, 2)),
        (4, GraphOp.add_edge(1, 3)),
        (6, GraphOp.rem_edge(1, 2)),
    ]


# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, detail in sorted(ACCEPTANCE):
        line = f"[{'PASS' if ok else 'FAIL'}] {n}. {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
