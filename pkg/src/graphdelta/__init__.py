"""Temporal graph store with delta logs and historical queries."""

from .errors import (
    AllTicksAbsent,
    EmptyCatalog,
    EmptyGraph,
    GraphDeltaError,
    InapplicablePlan,
    InvalidParams,
    InvalidRange,
    NodeAbsent,
    NodeAbsentAtTick,
    NonMonotonicTime,
    ParseError,
    PreconditionViolated,
    SeedAbsentAtTarget,
    TargetOutOfRange,
)
from .graph import INFINITE, GraphOp, MutableGraph, OpKind, Snapshot
from .deltalog import DeltaLog, TimedOp
from .store import OpCount, Periodic, SelectionPolicy, Similarity, SnapshotStore
from .query import Measure, Mode, Plan, PlanKind, Query, QueryResult, execute

__all__ = [
    "AllTicksAbsent",
    "DeltaLog",
    "EmptyCatalog",
    "EmptyGraph",
    "GraphDeltaError",
    "GraphOp",
    "INFINITE",
    "InapplicablePlan",
    "InvalidParams",
    "InvalidRange",
    "Measure",
    "Mode",
    "MutableGraph",
    "NodeAbsent",
    "NodeAbsentAtTick",
    "NonMonotonicTime",
    "OpCount",
    "OpKind",
    "ParseError",
    "Periodic",
    "Plan",
    "PlanKind",
    "PreconditionViolated",
    "Query",
    "QueryResult",
    "SeedAbsentAtTarget",
    "SelectionPolicy",
    "Similarity",
    "Snapshot",
    "SnapshotStore",
    "TargetOutOfRange",
    "TimedOp",
    "execute",
]
