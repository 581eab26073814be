"""The evolving system state: current snapshot, delta log, materialized snapshots.

Updates are staged for the open tick and become visible only when the tick
closes; a closed tick is never modified again.

On disk a store directory holds::

    delta.log        the full delta in delta-file format
    delta.log.cur    sidecar "<t_cur> <record_count>"
    manifest         CATALOG header, then "<tick> <snapshot-file>" lines
    snap_<tick>.snap one file per materialized snapshot
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .catalog import CatalogEntry, SelectionPolicy, read_manifest, select_base, write_manifest
from .deltalog import DeltaLog, LogAppender, expand, read_log
from .errors import NonMonotonicTime
from .graph import Edge, GraphOp, MutableGraph, Snapshot, diff, read_snapshot, write_snapshot
from .index import NodeIndex
from . import reconstruction

log = logging.getLogger(__name__)

LOG_NAME = "delta.log"
MANIFEST_NAME = "manifest"


@dataclass(frozen=True)
class Periodic:
    period: int

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")


@dataclass(frozen=True)
class OpCount:
    threshold: int

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


@dataclass(frozen=True)
class Similarity:
    threshold: int

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")


MaterializationPolicy = Union[Periodic, OpCount, Similarity]


def parse_policy(text: str) -> MaterializationPolicy:
    """Parse ``periodic:P``, ``ops:K`` or ``sim:T``."""
    name, _, value = text.partition(":")
    try:
        n = int(value)
    except ValueError:
        raise ValueError(f"bad materialization policy {text!r}") from None
    kinds = {"periodic": Periodic, "ops": OpCount, "sim": Similarity}
    if name not in kinds:
        raise ValueError(f"unknown materialization policy {name!r}")
    return kinds[name](n)


def similarity(s_a: Snapshot, s_b: Snapshot) -> int:
    """Size of the minimal delta between two snapshots (0 means identical graphs)."""
    return len(diff(s_a, s_b))


def snapshot_filename(tick: int) -> str:
    return f"snap_{tick}.snap"


class SnapshotStore:
    def __init__(
        self,
        directory: Union[str, Path, None] = None,
        materialization: Optional[MaterializationPolicy] = None,
        selection: SelectionPolicy = SelectionPolicy.OPERATION_BASED,
        t0: int = 0,
        *,
        _log: Optional[DeltaLog] = None,
    ):
        self.materialization = materialization
        self.selection = selection
        self.log = _log if _log is not None else DeltaLog(t0=t0)
        self.node_index = NodeIndex.build(self.log.records)
        self.log.subscribe(self.node_index.on_append)
        self.directory = Path(directory) if directory is not None else None
        self.materialized: list[CatalogEntry] = []
        # when False, reconstruction ignores materialized snapshots
        self.use_materialized = True
        self._live = MutableGraph()
        self._staged: list[GraphOp] = []
        self._current: Optional[Snapshot] = Snapshot.empty(self.log.t0)
        # change tracking since the last materialization
        self._baseline = Snapshot.empty(self.log.t0)
        self._ops_since = 0
        self._touched_nodes: set[int] = set()
        self._touched_edges: set[Edge] = set()
        self._appender: Optional[LogAppender] = None
        if self.directory is not None and _log is None:
            self.directory.mkdir(parents=True, exist_ok=True)
            if (self.directory / LOG_NAME).exists():
                raise FileExistsError(f"{self.directory} already holds a store; use SnapshotStore.open")
            self._appender = LogAppender(self.directory / LOG_NAME, self.log)
            self._write_manifest(self.materialized)

    # -- state -----------------------------------------------------------

    @property
    def t0(self) -> int:
        return self.log.t0

    @property
    def t_cur(self) -> int:
        return self.log.t_cur

    @property
    def current(self) -> Snapshot:
        """Snapshot at ``t_cur``; ops staged for the open tick are not included."""
        if self._current is None:
            if self._staged:
                g = self._live.copy()
                for op in reversed(self._staged):
                    g.apply(op.inverse())
            else:
                g = self._live
            self._current = g.freeze(self.t_cur)
        return self._current

    @property
    def catalog(self) -> list[CatalogEntry]:
        """Materialized snapshots plus the current one as the last entry."""
        entries = list(self.materialized) if self.use_materialized else []
        if not entries or entries[-1].tick != self.t_cur:
            entries.append(CatalogEntry(self.t_cur, self.current))
        return entries

    @property
    def staged(self) -> list[GraphOp]:
        return list(self._staged)

    # -- updates ---------------------------------------------------------

    def record(self, op: GraphOp) -> list[GraphOp]:
        """Stage ``op`` for tick ``t_cur + 1``; returns the staged records (RemNode expands)."""
        ops = expand(op, self._live)
        for x in ops:
            self._live.apply(x)
        self._staged.extend(ops)
        return ops

    def record_at(self, op: GraphOp, t: int) -> list[GraphOp]:
        """Stage ``op`` for tick ``t``, closing any ticks in between."""
        if t <= self.t_cur:
            raise NonMonotonicTime(f"tick {t} is already closed (t_cur={self.t_cur})")
        while self.t_cur + 1 < t:
            self.close_tick()
        return self.record(op)

    def close_tick(self) -> int:
        t = self.t_cur + 1
        staged, self._staged = self._staged, []
        for op in staged:
            self.log.push(op, t)
            if op.v is None:
                self._touched_nodes.add(op.u)
            else:
                self._touched_edges.add(op.edge)
        self._ops_since += len(staged)
        self.log.advance(t)
        if staged:
            self._current = None
        elif self._current is not None:
            self._current = self._current.at(t)
        if self._should_materialize(t):
            self.materialize()
        if self._appender is not None:
            self._appender.flush()
        return t

    def advance_to(self, t: int) -> None:
        """Close ticks until ``t_cur == t``."""
        while self.t_cur < t:
            self.close_tick()

    def ingest(self, records: Iterable[tuple[int, GraphOp]], t_end: Optional[int] = None) -> None:
        """Replay ``(tick, op)`` pairs tick by tick and close the last tick."""
        for t, op in records:
            self.record_at(op, t)
        if self._staged:
            self.close_tick()
        if t_end is not None:
            self.advance_to(t_end)

    @classmethod
    def from_stream(cls, records: Iterable, t_end: Optional[int] = None, **kwargs) -> "SnapshotStore":
        """Build a store from ``(tick, op)`` pairs or TimedOps."""
        store = cls(**kwargs)
        store.ingest(((r.t, r.op) if hasattr(r, "op") else r for r in records), t_end)
        return store

    # -- materialization -------------------------------------------------

    def _diff_size_since_baseline(self) -> int:
        base = self._baseline
        live = self._live
        n = 0
        for v in self._touched_nodes:
            if (v in base.nodes) != live.has_node(v):
                n += 1
        for a, b in self._touched_edges:
            was = (a, b) in base.edges
            now = live.has_edge(a, b)
            if now and not was:
                n += 1
            elif was and not now and live.has_node(a) and live.has_node(b):
                n += 1
        return n

    def _should_materialize(self, t: int) -> bool:
        policy = self.materialization
        if policy is None:
            return False
        if isinstance(policy, Periodic):
            return t % policy.period == 0
        if isinstance(policy, OpCount):
            return self._ops_since >= policy.threshold
        return self._diff_size_since_baseline() >= policy.threshold

    def materialize(self) -> CatalogEntry:
        """Add the current snapshot to the catalog (persisting it if the store has a directory)."""
        snap = self.current
        if self.materialized and self.materialized[-1].tick == snap.as_of:
            return self.materialized[-1]
        name = snapshot_filename(snap.as_of)
        entry = CatalogEntry(snap.as_of, snap, name)
        if self.directory is not None:
            write_snapshot(self.directory / name, snap)
        self.materialized.append(entry)
        self._write_manifest(self.materialized)
        self._baseline = snap
        self._ops_since = 0
        self._touched_nodes.clear()
        self._touched_edges.clear()
        log.debug("materialized snapshot at tick %d", snap.as_of)
        return entry

    def _write_manifest(self, entries: list[CatalogEntry]) -> None:
        if self.directory is None:
            return
        write_manifest(self.directory / MANIFEST_NAME, [(e.tick, e.filename) for e in entries])

    # -- reconstruction --------------------------------------------------

    def select_base(self, t_target: int, policy: Optional[SelectionPolicy] = None) -> CatalogEntry:
        return select_base(self.catalog, self.log, t_target, policy or self.selection)

    def reconstruct(self, t_target: int, policy: Optional[SelectionPolicy] = None) -> Snapshot:
        return reconstruction.reconstruct(self.catalog, self.log, t_target, policy or self.selection)

    def backward_base(self, t_target: int) -> Snapshot:
        """Cheapest catalog snapshot at or after ``t_target`` (for backward-only plans)."""
        later = [e for e in self.catalog if e.tick >= t_target]
        return select_base(later, self.log, t_target, self.selection).snapshot

    # -- persistence -----------------------------------------------------

    def save(self) -> None:
        """Persist the current snapshot and list it as the newest manifest entry."""
        if self.directory is None:
            raise ValueError("store has no directory")
        snap = self.current
        name = snapshot_filename(snap.as_of)
        write_snapshot(self.directory / name, snap)
        entries = [e for e in self.materialized if e.tick != snap.as_of]
        entries.append(CatalogEntry(snap.as_of, snap, name))
        self._write_manifest(entries)
        if self._appender is not None:
            self._appender.flush()

    @classmethod
    def open(
        cls,
        directory: Union[str, Path],
        materialization: Optional[MaterializationPolicy] = None,
        selection: SelectionPolicy = SelectionPolicy.OPERATION_BASED,
    ) -> "SnapshotStore":
        directory = Path(directory)
        dlog = read_log(directory / LOG_NAME)
        store = cls(directory, materialization, selection, _log=dlog)
        manifest = directory / MANIFEST_NAME
        entries = read_manifest(manifest) if manifest.exists() else []
        for tick, name in entries:
            snap = read_snapshot(directory / name)
            if snap.as_of != tick:
                raise ValueError(f"{name} holds tick {snap.as_of}, manifest says {tick}")
            store.materialized.append(CatalogEntry(tick, snap, name))
        if store.materialized:
            base = store.materialized[-1].snapshot
        else:
            base = Snapshot.empty(dlog.t0)
        if base.as_of > dlog.t_cur:
            raise ValueError("manifest is ahead of the delta log")
        current = reconstruction.for_rec(base, dlog, dlog.t_cur)
        store._current = current
        store._live = MutableGraph.from_snapshot(current)
        store._baseline = base
        store._ops_since = dlog.count_ops(base.as_of, dlog.t_cur)
        for rec in dlog.slice(base.as_of, dlog.t_cur):
            if rec.op.v is None:
                store._touched_nodes.add(rec.op.u)
            else:
                store._touched_edges.add(rec.op.edge)
        store._appender = LogAppender(directory / LOG_NAME, dlog)
        return store
