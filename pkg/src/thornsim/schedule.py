"""Schedule tree construction.

Each schedule bin (and each named schedule group such as ``MoL_CalcRHS``)
holds an ordered list of routine calls.  Within a container the order is a
topological sort of the declared before/after constraints; among
simultaneously available routines the lexicographically least
``thorn::routine`` key runs first, which makes the order reproducible across
runs and platforms.

before/after constraints name plain routine identifiers and must resolve
inside the same bin or group; a reference to a routine scheduled elsewhere
(or nowhere) is an error.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .ccl import SCHEDULE_BINS, ThornManifest
from .errors import CycleDetected, UnknownRoutineRef


@dataclass(frozen=True)
class ScheduledCall:
    """One routine invocation slot in the tree."""

    thorn: str
    routine: str
    reads: tuple[str, ...] = ()
    writes: tuple[str, ...] = ()
    sync: tuple[str, ...] = ()
    description: str = ""

    @property
    def key(self) -> str:
        return f"{self.thorn}::{self.routine}"


@dataclass(frozen=True)
class ScheduleTree:
    """Ordered calls per bin and per named schedule group."""

    bins: dict[str, tuple[ScheduledCall, ...]] = field(default_factory=dict)
    groups: dict[str, tuple[ScheduledCall, ...]] = field(default_factory=dict)

    def container(self, name: str) -> tuple[ScheduledCall, ...]:
        if name in self.bins:
            return self.bins[name]
        return self.groups.get(name, ())


def order_calls(
    where: str,
    calls: list[ScheduledCall],
    constraints: list[tuple[str, str]],
) -> tuple[ScheduledCall, ...]:
    """Topologically order ``calls`` under (earlier_key, later_key) constraints.

    Ties broken by picking the lexicographically least available
    ``thorn::routine`` key.  Raises CycleDetected listing one cycle.
    """
    by_key = {c.key: c for c in calls}
    succ: dict[str, set[str]] = {k: set() for k in by_key}
    indeg: dict[str, int] = {k: 0 for k in by_key}
    for earlier, later in constraints:
        if later not in succ[earlier]:
            succ[earlier].add(later)
            indeg[later] += 1

    ready = [k for k, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    out: list[ScheduledCall] = []
    while ready:
        k = heapq.heappop(ready)
        out.append(by_key[k])
        for nxt in succ[k]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(ready, nxt)

    if len(out) != len(calls):
        remaining = {k for k, d in indeg.items() if d > 0}
        cycle = _extract_cycle(remaining, succ)
        raise CycleDetected(where, cycle)
    return tuple(out)


def _extract_cycle(remaining: set[str], succ: dict[str, set[str]]) -> list[str]:
    """Find one cycle among the unprocessed nodes, listed in execution order.

    Every remaining node kept an unprocessed predecessor, so walking
    predecessors from any remaining node must revisit one.
    """
    pred: dict[str, set[str]] = {k: set() for k in remaining}
    for k in remaining:
        for s in succ[k]:
            if s in remaining:
                pred[s].add(k)
    path: list[str] = []
    seen: dict[str, int] = {}
    node = min(remaining)
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = min(pred[node])
    cycle = path[seen[node] :] + [node]
    cycle.reverse()
    return cycle


def build_schedule_tree(manifests: list[ThornManifest]) -> ScheduleTree:
    """Assemble and order the full tree from active manifests."""
    containers: dict[str, list[tuple[str, object]]] = {}
    locations: dict[str, set[str]] = {}  # routine identifier -> containers it appears in

    for m in manifests:
        for item in m.schedule_items:
            containers.setdefault(item.location, []).append((m.thorn_name, item))
            locations.setdefault(item.routine, set()).add(item.location)

    bins: dict[str, tuple[ScheduledCall, ...]] = {}
    groups: dict[str, tuple[ScheduledCall, ...]] = {}

    for where in sorted(containers):
        entries = containers[where]
        calls = []
        key_of: dict[str, list[str]] = {}  # routine identifier -> keys in this container
        for thorn, item in entries:
            call = ScheduledCall(
                thorn=thorn,
                routine=item.routine,
                reads=item.reads,
                writes=item.writes,
                sync=item.sync,
                description=item.description,
            )
            calls.append(call)
            key_of.setdefault(item.routine, []).append(call.key)

        constraints: list[tuple[str, str]] = []
        for thorn, item in entries:
            this_key = f"{thorn}::{item.routine}"
            for name, flip in [(n, False) for n in item.before] + [(n, True) for n in item.after]:
                targets = key_of.get(name)
                if not targets:
                    elsewhere = locations.get(name, set()) - {where}
                    hint = (
                        f" (scheduled in {', '.join(sorted(elsewhere))}; "
                        "constraints cannot cross bins or groups)"
                        if elsewhere
                        else ""
                    )
                    raise UnknownRoutineRef(
                        f"{this_key}: {'after' if flip else 'before'} {name!r} "
                        f"names no routine scheduled in {where}{hint}"
                    )
                for t in targets:
                    constraints.append((t, this_key) if flip else (this_key, t))

        ordered = order_calls(where, calls, constraints)
        if where in SCHEDULE_BINS:
            bins[where] = ordered
        else:
            groups[where] = ordered

    for b in SCHEDULE_BINS:
        bins.setdefault(b, ())
    return ScheduleTree(bins=bins, groups=groups)


def render_schedule(tree: ScheduleTree) -> str:
    """Human-readable dump used by the CLI's --dry-run."""
    lines: list[str] = []
    for b in SCHEDULE_BINS:
        lines.append(f"{b}:")
        for call in tree.bins.get(b, ()):
            suffix = f"  [sync: {', '.join(call.sync)}]" if call.sync else ""
            lines.append(f"  {call.key}{suffix}")
    for g in sorted(tree.groups):
        lines.append(f"group {g}:")
        for call in tree.groups[g]:
            suffix = f"  [sync: {', '.join(call.sync)}]" if call.sync else ""
            lines.append(f"  {call.key}{suffix}")
    return "\n".join(lines) + "\n"


__all__ = [
    "ScheduledCall",
    "ScheduleTree",
    "order_calls",
    "build_schedule_tree",
    "render_schedule",
]
