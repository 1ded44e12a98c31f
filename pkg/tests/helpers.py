"""Shared fixtures and independent oracles used across the test modules."""
from __future__ import annotations

import random
from types import SimpleNamespace

from tacnet import (
    Arc,
    ConnectionGraph,
    MessageTaskSpec,
    Model,
    ObjectKind,
    ResourceSpec,
    ScenarioSpec,
    ServiceSpec,
    attach_scenario,
)


def build_company() -> SimpleNamespace:
    """The worked single-platoon example: an area network plus a platoon
    holding one vehicle (data radio, router, terminal); three connections."""
    m = Model("Company Model")
    data_network = m.add_object("root", ObjectKind.AREA_NETWORK, "DataNetwork")
    platoon = m.add_object("root", ObjectKind.COMPOSITE, "Platoon")
    afv = m.add_object(platoon.id, ObjectKind.COMPOSITE, "AFV")
    data_radio = m.add_object(afv.id, ObjectKind.NETWORK, "Data Radio")
    router = m.add_object(afv.id, ObjectKind.NETWORK, "Router")
    terminal = m.add_object(afv.id, ObjectKind.NETWORK, "Terminal")
    m.connect(router.interface().id, data_radio.interface().id)
    m.connect(router.interface().id, terminal.interface().id)
    m.connect(data_radio.interface().id, data_network.interface().id)
    return SimpleNamespace(
        m=m,
        data_network=data_network,
        platoon=platoon,
        afv=afv,
        data_radio=data_radio,
        router=router,
        terminal=terminal,
    )


def model_structure(model: Model):
    """Comparable structural digest of a model: the hierarchy walked in
    child order, plus connections and scenarios; ids included."""
    objects = []
    for top in model.root.children:
        for o in model.iter_subtree(top):
            objects.append(
                (o.id, o.kind, o.name, o.parent, tuple(o.children),
                 tuple((i.id, i.name) for i in o.interfaces))
            )
    return (
        model.name,
        objects,
        [(c.id, c.endpoint_a, c.endpoint_b) for c in model.connections.values()],
        dict(model.scenarios),
    )


# -- random graphs with an independent path oracle ---------------------------------


def random_connected_graph(rng: random.Random) -> tuple[ConnectionGraph, dict[str, set[str]]]:
    """A random connected multihop graph (no parallel edges) plus its plain
    undirected adjacency for brute-force comparison."""
    n = rng.randint(2, 10)
    vertices = [f"v{i}" for i in range(n)]
    names = {v: rng.choice("abcdef") for v in vertices}
    edges: list[tuple[str, str]] = []
    seen: set[frozenset[str]] = set()
    for i in range(1, n):
        j = rng.randrange(i)
        edges.append((vertices[i], vertices[j]))
        seen.add(frozenset((vertices[i], vertices[j])))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(vertices, 2)
        if frozenset((a, b)) not in seen:
            seen.add(frozenset((a, b)))
            edges.append((a, b))
    arcs = []
    iface_names = {}
    for k, (a, b) in enumerate(edges):
        fa, fb = f"e{k}a", f"e{k}b"
        iface_names[fa] = iface_names[fb] = "default"
        arcs.append(Arc(a, b, f"e{k}", fa, fb))
        arcs.append(Arc(b, a, f"e{k}", fb, fa))
    adjacency: dict[str, set[str]] = {v: set() for v in vertices}
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    graph = ConnectionGraph(vertices, arcs, names, iface_names)
    return graph, adjacency


def enumerate_simple_paths(
    adjacency: dict[str, set[str]], src: str, dst: str
) -> list[tuple[str, ...]]:
    """Exhaustive simple-path enumeration by recursion over neighbour sets."""
    if src == dst:
        return [(src,)]
    found: list[tuple[str, ...]] = []

    def walk(vertex: str, trail: list[str], seen: set[str]) -> None:
        for neighbour in adjacency[vertex]:
            if neighbour in seen:
                continue
            if neighbour == dst:
                found.append(tuple(trail + [neighbour]))
                continue
            seen.add(neighbour)
            walk(neighbour, trail + [neighbour], seen)
            seen.discard(neighbour)

    walk(src, [src], {src})
    return found


def min_hop_winner(
    paths: list[tuple[str, ...]], names: dict[str, str]
) -> tuple[str, ...] | None:
    """Expected shortest-path outcome: fewest hops, then smallest name
    sequence, then smallest id sequence."""
    if not paths:
        return None
    best_len = min(len(p) for p in paths)
    shortest = [p for p in paths if len(p) == best_len]
    return min(shortest, key=lambda p: (tuple(names[v] for v in p), p))


# -- randomized rule-respecting models ----------------------------------------------


NAME_POOL = ["alpha", "bravo", "charlie", "node", "net", "hq"]


def random_model(rng: random.Random) -> Model:
    """A random model obeying every construction rule, with one random
    scenario attached; used for round-trip and invariant testing."""
    m = Model(rng.choice(["Exercise", "Plan B", "Sandbox"]))
    kinds = [ObjectKind.NETWORK, ObjectKind.COMPOSITE, ObjectKind.AREA_NETWORK]
    for _ in range(rng.randint(2, 14)):
        parents = ["root"] + [o.id for o in m.objects.values() if o.kind is ObjectKind.COMPOSITE]
        parent = rng.choice(parents)
        kind = rng.choices(kinds, weights=[5, 3, 2])[0]
        obj = m.add_object(parent, kind, rng.choice(NAME_POOL))
        if rng.random() < 0.3:
            m.add_interface(obj.id, f"aux{rng.randint(1, 3)}")

    interfaces = [i for o in m.objects.values() for i in o.interfaces]
    for _ in range(rng.randint(0, 12)):
        a, b = rng.choice(interfaces), rng.choice(interfaces)
        if a.owner != b.owner and m.connection_allowed(a.owner, b.owner):
            m.connect(a.id, b.id)

    objects = list(m.objects)
    spec = ScenarioSpec(
        name="drill",
        duration=rng.choice([60.0, 600.0, 3600.0]),
        seed=rng.randint(0, 2**63 - 1),
    )
    for oid in rng.sample(objects, min(len(objects), rng.randint(0, 3))):
        spec.resources.append(
            ResourceSpec(object=oid, capacity=rng.randint(1, 4), delay=rng.choice([0.0, 0.5, 2.0]))
        )
    for oid in rng.sample(objects, min(len(objects), rng.randint(0, 2))):
        spec.services.append(ServiceSpec(object=oid, per_message_delay=rng.choice([0.0, 1.0])))
    if len(objects) >= 2:
        for _ in range(rng.randint(0, 3)):
            src, dst = rng.sample(objects, 2)
            spec.tasks.append(
                MessageTaskSpec(
                    source=src,
                    destination=dst,
                    label=rng.choice(["position", "orders"]),
                    start=rng.choice([0.0, 5.0]),
                    repeats=rng.randint(0, 5),
                    interval_mean=rng.choice([10.0, 60.0]),
                    interval_sigma=rng.choice([0.0, 1.5]),
                    routed=rng.random() < 0.8,
                    request_ack=rng.random() < 0.4,
                )
            )
    attach_scenario(m, spec)
    return m
