"""Materialized-snapshot catalog, base selection, and the manifest file."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .deltalog import DeltaLog
from .errors import EmptyCatalog, ParseError
from .graph import Snapshot


class SelectionPolicy(enum.Enum):
    TIME_BASED = "time"
    OPERATION_BASED = "ops"


@dataclass(frozen=True)
class CatalogEntry:
    tick: int
    snapshot: Snapshot
    filename: Optional[str] = None


def selection_cost(entry: CatalogEntry, log: DeltaLog, t_target: int, policy: SelectionPolicy) -> int:
    if policy is SelectionPolicy.TIME_BASED:
        return abs(t_target - entry.tick)
    lo, hi = sorted((entry.tick, t_target))
    return log.count_ops(lo, hi)


def select_base(
    catalog: Sequence[CatalogEntry],
    log: DeltaLog,
    t_target: int,
    policy: SelectionPolicy = SelectionPolicy.OPERATION_BASED,
) -> CatalogEntry:
    """Entry with the lowest reconstruction cost for ``t_target``; ties go to the later entry."""
    if not catalog:
        raise EmptyCatalog("no materialized snapshot to reconstruct from")
    best = None
    best_cost = None
    for entry in catalog:
        cost = selection_cost(entry, log, t_target, policy)
        if best_cost is None or cost < best_cost or (cost == best_cost and entry.tick > best.tick):
            best, best_cost = entry, cost
    return best


# -- manifest ----------------------------------------------------------------


def format_manifest(entries: Sequence[tuple[int, str]]) -> str:
    lines = ["CATALOG"]
    lines.extend(f"{tick} {name}" for tick, name in entries)
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> list[tuple[int, str]]:
    lines = text.split("\n")
    if lines[-1] != "":
        raise ParseError(len(lines), "missing final newline")
    lines.pop()
    if not lines or lines[0] != "CATALOG":
        raise ParseError(1, "expected CATALOG header")
    out: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 2 or not parts[0].isdigit() or not parts[1]:
            raise ParseError(lineno, f"bad manifest line {line!r}")
        if len(parts[0]) > 1 and parts[0][0] == "0":
            raise ParseError(lineno, "leading zero in tick")
        tick = int(parts[0])
        if out and tick <= out[-1][0]:
            raise ParseError(lineno, "ticks must be strictly increasing")
        out.append((tick, parts[1]))
    return out


def write_manifest(path: Union[str, Path], entries: Sequence[tuple[int, str]]) -> None:
    Path(path).write_bytes(format_manifest(entries).encode("ascii"))


def read_manifest(path: Union[str, Path]) -> list[tuple[int, str]]:
    return parse_manifest(Path(path).read_bytes().decode("ascii"))
