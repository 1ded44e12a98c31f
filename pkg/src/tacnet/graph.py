"""Directed connection multigraph, path queries and the hierarchy tree.

Every bidirectional connection contributes two opposing arcs, so the graph
is a directed multigraph with no loops.  Graphs are immutable snapshots of a
model and are safe to share once built.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotFoundError
from .model import Model, ModelObject, ObjectKind, ROOT_ID


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    via: str
    source_iface: str
    target_iface: str


@dataclass(frozen=True)
class Path:
    vertices: tuple[str, ...]
    arcs: tuple[Arc, ...]

    def hops(self) -> int:
        return len(self.arcs)


class ConnectionGraph:
    """Snapshot of a model's connections as paired directed arcs."""

    def __init__(
        self,
        vertices: list[str],
        arcs: list[Arc],
        vertex_names: dict[str, str],
        iface_names: dict[str, str],
    ):
        self.vertices = tuple(vertices)
        self.arcs = tuple(arcs)
        self.vertex_names = dict(vertex_names)
        self.iface_names = dict(iface_names)
        self._out: dict[str, list[Arc]] = {v: [] for v in self.vertices}
        for arc in self.arcs:
            self._out[arc.source].append(arc)

    def out_arcs(self, vertex: str) -> list[Arc]:
        try:
            return self._out[vertex]
        except KeyError:
            raise NotFoundError(f"no vertex {vertex!r} in graph") from None

    def name(self, vertex: str) -> str:
        return self.vertex_names.get(vertex, vertex)


def build_connection_graph(model: Model) -> ConnectionGraph:
    """Vertices are all non-root objects (isolated ones included); arcs come in
    opposing pairs, one pair per connection, in creation order."""
    vertices = list(model.objects)
    vertex_names = {oid: obj.name for oid, obj in model.objects.items()}
    iface_names = {}
    for obj in model.objects.values():
        for iface in obj.interfaces:
            iface_names[iface.id] = iface.name
    arcs: list[Arc] = []
    for conn in model.connections.values():
        a = model.interface(conn.endpoint_a)
        b = model.interface(conn.endpoint_b)
        arcs.append(Arc(a.owner, b.owner, conn.id, a.id, b.id))
        arcs.append(Arc(b.owner, a.owner, conn.id, b.id, a.id))
    return ConnectionGraph(vertices, arcs, vertex_names, iface_names)


def all_paths(graph: ConnectionGraph, src: str, dst: str) -> list[Path]:
    """All simple paths src -> dst by depth-first search, visiting arcs in
    creation order.  src == dst yields the single zero-arc path."""
    _require_vertex(graph, src)
    _require_vertex(graph, dst)
    if src == dst:
        return [Path((src,), ())]
    found: list[Path] = []
    vertex_trail = [src]
    arc_trail: list[Arc] = []
    on_trail = {src}

    def descend(vertex: str) -> None:
        for arc in graph.out_arcs(vertex):
            if arc.target in on_trail:
                continue
            vertex_trail.append(arc.target)
            arc_trail.append(arc)
            if arc.target == dst:
                found.append(Path(tuple(vertex_trail), tuple(arc_trail)))
            else:
                on_trail.add(arc.target)
                descend(arc.target)
                on_trail.discard(arc.target)
            vertex_trail.pop()
            arc_trail.pop()

    descend(src)
    return found


def shortest_path(graph: ConnectionGraph, src: str, dst: str) -> Path | None:
    """Minimum-hop path by breadth-first search, or None if unreachable.

    Ties between equal-hop paths are broken by the lexicographically smallest
    sequence of vertex names (then vertex ids); parallel arcs between a vertex
    pair collapse to the arc with the smallest interface-name pair.
    """
    _require_vertex(graph, src)
    _require_vertex(graph, dst)
    if src == dst:
        return Path((src,), ())

    # Hop counts to dst.  Arcs always come in opposing pairs, so searching
    # forward from dst reaches exactly the vertices that can reach it.
    dist = {dst: 0}
    frontier = [dst]
    while frontier:
        upcoming: list[str] = []
        for v in frontier:
            for arc in graph.out_arcs(v):
                if arc.target not in dist:
                    dist[arc.target] = dist[v] + 1
                    upcoming.append(arc.target)
        frontier = upcoming
    if src not in dist:
        return None

    # Walk from src, always stepping to the smallest-named neighbour that is
    # one hop closer to dst; greedy choice at each step yields the smallest
    # name sequence overall because all candidate paths have equal length.
    vertices = [src]
    arcs: list[Arc] = []
    current = src
    while current != dst:
        nexts = {
            arc.target
            for arc in graph.out_arcs(current)
            if dist.get(arc.target) == dist[current] - 1
        }
        step = min(nexts, key=lambda v: (graph.name(v), v))
        arcs.append(_canonical_arc(graph, current, step))
        vertices.append(step)
        current = step
    return Path(tuple(vertices), tuple(arcs))


def _canonical_arc(graph: ConnectionGraph, source: str, target: str) -> Arc:
    parallel = [arc for arc in graph.out_arcs(source) if arc.target == target]
    return min(
        parallel,
        key=lambda arc: (
            graph.iface_names.get(arc.source_iface, ""),
            graph.iface_names.get(arc.target_iface, ""),
            arc.source_iface,
            arc.target_iface,
        ),
    )


def _require_vertex(graph: ConnectionGraph, vertex: str) -> None:
    if vertex not in graph._out:
        raise NotFoundError(f"no vertex {vertex!r} in graph")


@dataclass
class TreeNode:
    id: str
    name: str
    kind: ObjectKind | None
    children: list["TreeNode"] = field(default_factory=list)


def hierarchy_tree(model: Model) -> TreeNode:
    """The parent/child tree for display and export; the root node carries the
    model name and no kind."""

    def build(obj: ModelObject) -> TreeNode:
        node = TreeNode(obj.id, obj.name, obj.kind)
        for child_id in obj.children:
            node.children.append(build(model.objects[child_id]))
        return node

    root = TreeNode(ROOT_ID, model.name, None)
    for child_id in model.root.children:
        root.children.append(build(model.objects[child_id]))
    return root


def to_dot(graph: ConnectionGraph) -> str:
    """Graphviz text export: one vertex line and one arc line each, in
    creation order (grammar documented in docs/graph-format.md)."""
    lines = ["digraph model {"]
    for v in graph.vertices:
        lines.append(f'  "{v}" [label="{graph.name(v)}"];')
    for arc in graph.arcs:
        lines.append(f'  "{arc.source}" -> "{arc.target}" [connection="{arc.via}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
