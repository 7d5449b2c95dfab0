"""Architecture view extraction and non-conformance detection.

A view is the normalized (nodes, directed edges) pair obtained from either
model kind. Detection tags each node/edge of the union by presence and
emits one non-conformance per item that is not present in both views:

* static non-conformance — observed at runtime, missing from the static
  model (item tagged DynamicOnly);
* dynamic non-conformance — declared statically, never observed at
  runtime (item tagged StaticOnly).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .automaton import StateMachine
from .errors import MalformedSymbol
from .events import parse_symbol
from .static_model import StaticModel


class PresenceTag(Enum):
    Both = "both"
    StaticOnly = "static-only"
    DynamicOnly = "dynamic-only"


class NcKind(Enum):
    Static = "static"
    Dynamic = "dynamic"


@dataclass(frozen=True)
class ArchView:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        for sender, receiver in self.edges:
            if sender not in self.nodes or receiver not in self.nodes:
                raise ValueError(f"edge ({sender}, {receiver}) has endpoint outside nodes")


@dataclass(frozen=True)
class TaggedView:
    nodes: dict[str, PresenceTag]
    edges: dict[tuple[str, str], PresenceTag]


@dataclass(frozen=True)
class NonConformance:
    kind: NcKind
    subject_type: str  # "node" | "edge"
    names: tuple[str, ...]

    @property
    def id(self) -> str:
        # names never contain "--" (normalization collapses runs), so the
        # double-hyphen joiner is unambiguous
        return f"{self.kind.value}-{self.subject_type}-" + "--".join(self.names)

    @property
    def involved(self) -> list[str]:
        return list(self.names)

    def sort_key(self) -> tuple:
        return (
            0 if self.kind is NcKind.Static else 1,
            0 if self.subject_type == "node" else 1,
            self.names,
        )


def extract_static_view(model: StaticModel, include_externals: bool = False) -> ArchView:
    """Nodes and edges of the dataflow diagram."""
    nodes = {s.name for s in model.services}
    if include_externals:
        nodes |= {e.name for e in model.external_entities}
    edges = {
        (f.sender, f.receiver)
        for f in model.flows
        if f.sender in nodes and f.receiver in nodes
    }
    return ArchView(frozenset(nodes), frozenset(edges))


def extract_dynamic_view(machines: list[StateMachine]) -> ArchView:
    """Union of the communication pairs appearing in transition symbols."""
    nodes: set[str] = set()
    edges: set[tuple[str, str]] = set()
    for sm in machines:
        for (_src, symbol), _target in sm.transitions.items():
            try:
                a, b, _method, _path = parse_symbol(symbol)
            except ValueError as exc:
                raise MalformedSymbol(sm.name or "<unnamed>", symbol) from exc
            nodes.add(a)
            nodes.add(b)
            edges.add((a, b))
    return ArchView(frozenset(nodes), frozenset(edges))


def detect(static_view: ArchView, dynamic_view: ArchView) -> tuple[TaggedView, list[NonConformance]]:
    """Tag the union of both views and list every non-Both item."""

    def tag(in_static: bool, in_dynamic: bool) -> PresenceTag:
        if in_static and in_dynamic:
            return PresenceTag.Both
        return PresenceTag.StaticOnly if in_static else PresenceTag.DynamicOnly

    nodes = {
        name: tag(name in static_view.nodes, name in dynamic_view.nodes)
        for name in sorted(static_view.nodes | dynamic_view.nodes)
    }
    edges = {
        edge: tag(edge in static_view.edges, edge in dynamic_view.edges)
        for edge in sorted(static_view.edges | dynamic_view.edges)
    }

    ncs: list[NonConformance] = []
    for name, t in nodes.items():
        if t is PresenceTag.DynamicOnly:
            ncs.append(NonConformance(NcKind.Static, "node", (name,)))
        elif t is PresenceTag.StaticOnly:
            ncs.append(NonConformance(NcKind.Dynamic, "node", (name,)))
    for edge, t in edges.items():
        if t is PresenceTag.DynamicOnly:
            ncs.append(NonConformance(NcKind.Static, "edge", edge))
        elif t is PresenceTag.StaticOnly:
            ncs.append(NonConformance(NcKind.Dynamic, "edge", edge))
    ncs.sort(key=NonConformance.sort_key)
    return TaggedView(nodes=nodes, edges=edges), ncs
