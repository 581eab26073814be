"""Historical queries and the three execution plans.

A query is a point, differential or mean query over one measure. Which plans
may run it:

=====================  =========  ==========  ======
query                  two-phase  delta-only  hybrid
=====================  =========  ==========  ======
point, node-centric    yes                    yes
point, global          yes
diff, node-centric     yes        yes         yes
diff, global           yes
mean, node-centric     yes                    yes
mean, global           yes
=====================  =========  ==========  ======

Delta-only is implemented for the degree measure only.

Results are exact: integers and means are :class:`fractions.Fraction`, and
a disconnected graph's diameter is ``INFINITE``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Optional, Union

from .errors import (
    AllTicksAbsent,
    InapplicablePlan,
    InvalidRange,
    NodeAbsentAtTick,
    SeedAbsentAtTarget,
    TargetOutOfRange,
)
from .graph import (
    INFINITE,
    MutableGraph,
    OpKind,
    Snapshot,
    avg_degree,
    component_count,
    degree,
    diameter,
    induced_subgraph,
)
from .reconstruction import back_rec, partial_back_rec, replay_backward

if TYPE_CHECKING:
    from .deltalog import TimedOp
    from .store import SnapshotStore

Value = Union[Fraction, float]


class Measure(enum.Enum):
    DEGREE = "degree"
    INDUCED_AVG_DEGREE = "iavg"
    DIAMETER = "diameter"
    COMPONENTS = "components"

    @property
    def node_centric(self) -> bool:
        return self in (Measure.DEGREE, Measure.INDUCED_AVG_DEGREE)

    @property
    def hops(self) -> int:
        """Neighborhood radius partial reconstruction needs for this measure."""
        return {Measure.DEGREE: 1, Measure.INDUCED_AVG_DEGREE: 2}[self]


class Mode(enum.Enum):
    VALUE = "value"
    DIFF = "diff"
    MEAN = "mean"


@dataclass(frozen=True)
class Query:
    measure: Measure
    t_k: int
    t_l: int
    mode: Mode = Mode.VALUE
    node: Optional[int] = None

    def __post_init__(self):
        if self.t_k > self.t_l:
            raise InvalidRange(f"range [{self.t_k}, {self.t_l}] is empty")
        if self.mode is Mode.VALUE and self.t_k != self.t_l:
            raise ValueError("value queries take a single tick")
        if self.measure.node_centric and self.node is None:
            raise ValueError(f"{self.measure.value} needs a node")
        if not self.measure.node_centric and self.node is not None:
            raise ValueError(f"{self.measure.value} is a global measure")

    @classmethod
    def point(cls, measure: Measure, t: int, node: Optional[int] = None) -> "Query":
        return cls(measure, t, t, Mode.VALUE, node)

    @classmethod
    def differential(cls, measure: Measure, t_k: int, t_l: int, node: Optional[int] = None) -> "Query":
        return cls(measure, t_k, t_l, Mode.DIFF, node)

    @classmethod
    def mean(cls, measure: Measure, t_k: int, t_l: int, node: Optional[int] = None) -> "Query":
        return cls(measure, t_k, t_l, Mode.MEAN, node)

    @property
    def node_centric(self) -> bool:
        return self.measure.node_centric


class PlanKind(enum.Enum):
    TWO_PHASE = "two-phase"
    DELTA_ONLY = "delta-only"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class Plan:
    kind: PlanKind
    use_node_index: bool = False
    use_partial: bool = False


@dataclass
class QueryResult:
    value: Value
    plan: Plan
    # per-tick measure for mean queries; absent ticks are left out
    series: Optional[dict[int, Value]] = field(default=None, repr=False)

    def format(self) -> str:
        return format_value(self.value)


def format_value(value: Value) -> str:
    if value == INFINITE:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value))


def applicable(q: Query) -> list[PlanKind]:
    """Plans that may evaluate ``q``, cheapest first."""
    kinds = []
    if q.node_centric and q.mode is Mode.DIFF and q.measure is Measure.DEGREE:
        kinds.append(PlanKind.DELTA_ONLY)
    if q.node_centric:
        kinds.append(PlanKind.HYBRID)
    kinds.append(PlanKind.TWO_PHASE)
    return kinds


def plan(
    q: Query,
    force: Optional[PlanKind] = None,
    use_node_index: bool = False,
    use_partial: bool = False,
) -> Plan:
    kinds = applicable(q)
    if force is None:
        return Plan(kinds[0], use_node_index, use_partial)
    if force not in kinds:
        raise InapplicablePlan(f"{force.value} cannot evaluate a {q.mode.value} {q.measure.value} query")
    return Plan(force, use_node_index, use_partial)


def execute(q: Query, store: "SnapshotStore", p: Optional[Plan] = None) -> QueryResult:
    if p is None:
        p = plan(q)
    elif p.kind not in applicable(q):
        raise InapplicablePlan(f"{p.kind.value} cannot evaluate a {q.mode.value} {q.measure.value} query")
    if p.kind is PlanKind.TWO_PHASE:
        return exec_two_phase(q, store, use_node_index=p.use_node_index, use_partial=p.use_partial)
    if p.kind is PlanKind.DELTA_ONLY:
        return exec_delta_only(q, store, use_node_index=p.use_node_index)
    return exec_hybrid(q, store, use_node_index=p.use_node_index)


# -- helpers -----------------------------------------------------------------


def _check_range(q: Query, store: "SnapshotStore") -> None:
    if q.t_k < store.t0 or q.t_l > store.t_cur:
        raise TargetOutOfRange(f"[{q.t_k}, {q.t_l}] is outside [{store.t0}, {store.t_cur}]")


def _abs_diff(a: Value, b: Value) -> Value:
    if a == INFINITE or b == INFINITE:
        return Fraction(0) if a == b else INFINITE
    return abs(a - b)


def _mean(q: Query, series: dict[int, Value]) -> Value:
    if not series:
        raise AllTicksAbsent(q.node, q.t_k, q.t_l)
    values = list(series.values())
    if any(v == INFINITE for v in values):
        return INFINITE
    return sum(values, Fraction(0)) / len(values)


def _combine(q: Query, series: dict[int, Value], p: Plan) -> QueryResult:
    if q.mode is Mode.VALUE:
        if q.t_k not in series:
            raise NodeAbsentAtTick(q.node, q.t_k)
        return QueryResult(series[q.t_k], p)
    if q.mode is Mode.DIFF:
        for t in (q.t_k, q.t_l):
            if t not in series:
                raise NodeAbsentAtTick(q.node, t)
        return QueryResult(_abs_diff(series[q.t_k], series[q.t_l]), p)
    return QueryResult(_mean(q, series), p, series)


def _ticks(q: Query) -> list[int]:
    """Ticks the query must evaluate, latest first."""
    if q.mode is Mode.MEAN:
        return list(range(q.t_l, q.t_k - 1, -1))
    return [q.t_l, q.t_k] if q.t_l != q.t_k else [q.t_k]


def evaluate(measure: Measure, snap: Snapshot, node: Optional[int] = None) -> Optional[Value]:
    """Measure on a snapshot; None when a node-centric measure's node is absent."""
    if measure.node_centric and node not in snap.nodes:
        return None
    if measure is Measure.DEGREE:
        return Fraction(degree(snap, node))
    if measure is Measure.INDUCED_AVG_DEGREE:
        return avg_degree(induced_subgraph(snap, node))
    if measure is Measure.DIAMETER:
        d = diameter(snap)
        return d if d == INFINITE else Fraction(d)
    return Fraction(component_count(snap))


def _touching(store: "SnapshotStore", nodes, t_a: int, t_b: int, use_node_index: bool) -> list["TimedOp"]:
    """Records touching any of ``nodes`` with ``t_a < t <= t_b``, ascending seq."""
    if use_node_index:
        return store.node_index.ops_for_nodes(nodes, t_a, t_b)
    nodes = set(nodes)
    return [r for r in store.log.slice(t_a, t_b) if r.op.u in nodes or r.op.v in nodes]


# -- two-phase -----------------------------------------------------------------


def exec_two_phase(
    q: Query,
    store: "SnapshotStore",
    use_node_index: bool = False,
    use_partial: bool = False,
) -> QueryResult:
    """Reconstruct the snapshots the query needs, then evaluate the measure on each."""
    _check_range(q, store)
    p = Plan(PlanKind.TWO_PHASE, use_node_index, use_partial)
    series: dict[int, Value] = {}
    if use_partial and q.node_centric:
        for t in _ticks(q):
            base = store.backward_base(t)
            try:
                snap = partial_back_rec(
                    base, store.log, t, {q.node}, q.measure.hops,
                    store.node_index if use_node_index else None,
                )
            except SeedAbsentAtTarget:
                continue
            series[t] = evaluate(q.measure, snap, q.node)
        return _combine(q, series, p)

    ticks = _ticks(q)
    # latest snapshot via catalog selection, every earlier one from the previous
    snap = store.reconstruct(ticks[0])
    if len(ticks) == 1 or q.mode is Mode.DIFF:
        for t in ticks:
            snap = back_rec(snap, store.log, t)
            value = evaluate(q.measure, snap, q.node)
            if value is not None:
                series[t] = value
        return _combine(q, series, p)

    g = MutableGraph.from_snapshot(snap)
    prev = ticks[0]
    for t in ticks:
        if t != prev:
            replay_backward(g, store.log.slice(t, prev, "backward"))
            snap = g.freeze(t)
            prev = t
        value = evaluate(q.measure, snap, q.node)
        if value is not None:
            series[t] = value
    return _combine(q, series, p)


# -- delta-only ----------------------------------------------------------------


def _exists_from_log(store: "SnapshotStore", v: int, t: int, use_node_index: bool) -> bool:
    # the log starts from an empty graph at t0, so the last node op decides
    for rec in reversed(_touching(store, (v,), store.t0, t, use_node_index)):
        if rec.op.kind is OpKind.ADD_NODE:
            return True
        if rec.op.kind is OpKind.REM_NODE:
            return False
    return False


def exec_delta_only(q: Query, store: "SnapshotStore", use_node_index: bool = False) -> QueryResult:
    """Degree change over the range from the log alone: net edge additions touching the node."""
    if PlanKind.DELTA_ONLY not in applicable(q):
        raise InapplicablePlan("delta-only evaluates degree differential queries only")
    _check_range(q, store)
    v = q.node
    for t in (q.t_k, q.t_l):
        if not _exists_from_log(store, v, t, use_node_index):
            raise NodeAbsentAtTick(v, t)
    net = 0
    for rec in _touching(store, (v,), q.t_k, q.t_l, use_node_index):
        kind = rec.op.kind
        if kind is OpKind.ADD_EDGE:
            net += 1
        elif kind is OpKind.REM_EDGE:
            net -= 1
    return QueryResult(Fraction(abs(net)), Plan(PlanKind.DELTA_ONLY, use_node_index))


# -- hybrid --------------------------------------------------------------------


def _walk_back(ops: list["TimedOp"], ticks: list[int]) -> Iterator[tuple[int, list["TimedOp"]]]:
    """For each tick (descending), the records to undo to reach it from the previous one."""
    i = len(ops) - 1
    for t in ticks:
        undo = []
        while i >= 0 and ops[i].t > t:
            undo.append(ops[i])
            i -= 1
        yield t, undo


def node_exists_at(store: "SnapshotStore", v: int, t: int, use_node_index: bool = False) -> bool:
    if not store.t0 <= t <= store.t_cur:
        raise TargetOutOfRange(f"tick {t} is outside [{store.t0}, {store.t_cur}]")
    base = store.backward_base(t)
    present = v in base.nodes
    # the earliest node op after t tells what the node was at t
    for rec in _touching(store, (v,), t, base.as_of, use_node_index):
        if rec.op.kind is OpKind.ADD_NODE:
            return False
        if rec.op.kind is OpKind.REM_NODE:
            return True
    return present


def _hybrid_degree_series(q: Query, store: "SnapshotStore", ticks: list[int], use_node_index: bool):
    v = q.node
    base = store.backward_base(ticks[0])
    present = v in base.nodes
    deg = len(base.adjacency.get(v, ()))
    ops = _touching(store, (v,), ticks[-1], base.as_of, use_node_index)
    series: dict[int, Value] = {}
    for t, undo in _walk_back(ops, ticks):
        for rec in undo:
            kind = rec.op.kind
            if kind is OpKind.ADD_EDGE:
                deg -= 1
            elif kind is OpKind.REM_EDGE:
                deg += 1
            elif kind is OpKind.ADD_NODE:
                present = False
            else:
                present = True
        if present:
            series[t] = Fraction(deg)
    return series


def _hybrid_iavg_series(q: Query, store: "SnapshotStore", ticks: list[int], use_node_index: bool):
    v = q.node
    base = store.backward_base(ticks[0])
    t_lo = ticks[-1]

    # pass 1: the node's presence and neighbor set at every tick
    present = v in base.nodes
    nbrs = set(base.adjacency.get(v, ()))
    states: dict[int, tuple[bool, frozenset]] = {}
    union: set[int] = set(nbrs)
    ops = _touching(store, (v,), t_lo, base.as_of, use_node_index)
    for t, undo in _walk_back(ops, ticks):
        for rec in undo:
            op = rec.op
            kind = op.kind
            if kind is OpKind.ADD_EDGE:
                nbrs.discard(op.u if op.v == v else op.v)
            elif kind is OpKind.REM_EDGE:
                nbrs.add(op.u if op.v == v else op.v)
            elif kind is OpKind.ADD_NODE:
                present = False
            else:
                present = True
        states[t] = (present, frozenset(nbrs))
        union |= nbrs

    # pass 2: edges among every node that was ever a neighbor, walked back again
    members = union | {v}
    adj = base.adjacency
    edges = set()
    for u in members:
        for x in adj.get(u, ()):
            if x in members and u < x:
                edges.add((u, x))
    ops = [r for r in _touching(store, members, t_lo, base.as_of, use_node_index)
           if r.op.v is not None and r.op.u in members and r.op.v in members]
    series: dict[int, Value] = {}
    for t, undo in _walk_back(ops, ticks):
        for rec in undo:
            if rec.op.kind is OpKind.ADD_EDGE:
                edges.discard(rec.op.edge)
            else:
                edges.add(rec.op.edge)
        present, around = states[t]
        if not present:
            continue
        group = around | {v}
        inside = sum(1 for a, b in edges if a in group and b in group)
        series[t] = Fraction(2 * inside, len(group))
    return series


def exec_hybrid(q: Query, store: "SnapshotStore", use_node_index: bool = False) -> QueryResult:
    """Node-centric queries from a stored snapshot adjusted by the log, with no reconstruction."""
    if not q.node_centric:
        raise InapplicablePlan("hybrid plans evaluate node-centric queries only")
    _check_range(q, store)
    p = Plan(PlanKind.HYBRID, use_node_index)
    series_fn = _hybrid_degree_series if q.measure is Measure.DEGREE else _hybrid_iavg_series
    if q.mode is Mode.MEAN:
        return _combine(q, series_fn(q, store, _ticks(q), use_node_index), p)
    series: dict[int, Value] = {}
    for t in _ticks(q):
        series.update(series_fn(q, store, [t], use_node_index))
    return _combine(q, series, p)
