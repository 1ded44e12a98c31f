"""Hierarchical network model: objects, interfaces and legal connections.

The model is a tree of named objects hung off an implicit root.  Composite
objects (and only those, plus the root) may parent children.  Every object
carries one or more named interfaces; connections join two interfaces of
*different* objects and are only legal between siblings, between a composite
and its direct child, or when an area-network object is involved.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .errors import (
    DuplicateNameError,
    IllegalConnectionError,
    IllegalParentError,
    IntegrityError,
    InvalidArgumentError,
    LoopError,
    NotFoundError,
)

ROOT_ID = "root"
DEFAULT_INTERFACE = "default"


class ObjectKind(Enum):
    NETWORK = "network"
    COMPOSITE = "composite"
    AREA_NETWORK = "area-network"


@dataclass
class Interface:
    id: str
    owner: str
    name: str


@dataclass
class ModelObject:
    id: str
    kind: ObjectKind
    name: str
    parent: str | None
    children: list[str] = field(default_factory=list)
    interfaces: list[Interface] = field(default_factory=list)

    def interface(self, name: str = DEFAULT_INTERFACE) -> Interface:
        for iface in self.interfaces:
            if iface.name == name:
                return iface
        raise NotFoundError(f"object {self.name!r} has no interface {name!r}")


@dataclass
class Connection:
    id: str
    endpoint_a: str
    endpoint_b: str

    def endpoints(self) -> tuple[str, str]:
        return (self.endpoint_a, self.endpoint_b)


class Model:
    """Mutable model instance.  Single writer at a time; reads may be shared."""

    def __init__(self, name: str):
        if not name:
            raise InvalidArgumentError("model name must be non-empty")
        self.name = name
        self.root = ModelObject(id=ROOT_ID, kind=ObjectKind.COMPOSITE, name=name, parent=None)
        self.objects: dict[str, ModelObject] = {}
        self.connections: dict[str, Connection] = {}
        # Scenario specs attached to this model, keyed by scenario name.  Stored
        # values only need a `with_copied_objects(id_map)` method; the scenario
        # module provides the concrete type.
        self.scenarios: dict[str, object] = {}
        self._interfaces: dict[str, Interface] = {}
        self._next_object = 1
        self._next_interface = 1
        self._next_connection = 1

    # -- lookup ------------------------------------------------------------

    def object(self, object_id: str) -> ModelObject:
        if object_id == ROOT_ID:
            return self.root
        try:
            return self.objects[object_id]
        except KeyError:
            raise NotFoundError(f"no object with id {object_id!r}") from None

    def interface(self, interface_id: str) -> Interface:
        try:
            return self._interfaces[interface_id]
        except KeyError:
            raise NotFoundError(f"no interface with id {interface_id!r}") from None

    def find_object(self, path: list[str]) -> ModelObject | None:
        """Resolve a root-to-object name path; [] resolves to the root."""
        node = self.root
        for name in path:
            match = None
            for child_id in node.children:
                child = self.objects[child_id]
                if child.name == name:
                    match = child
                    break
            if match is None:
                return None
            node = match
        return node

    def connections_of(self, object_id: str) -> list[Connection]:
        """Connections touching any interface of the object, in creation order."""
        owned = {iface.id for iface in self.object(object_id).interfaces}
        return [c for c in self.connections.values() if owned & set(c.endpoints())]

    def iter_subtree(self, object_id: str) -> Iterator[ModelObject]:
        """Depth-first pre-order walk of the object and its descendants."""
        obj = self.object(object_id)
        yield obj
        for child_id in obj.children:
            yield from self.iter_subtree(child_id)

    # -- construction --------------------------------------------------------

    def add_object(self, parent_id: str, kind: ObjectKind, name: str) -> ModelObject:
        parent = self.object(parent_id)
        if parent is not self.root and parent.kind is not ObjectKind.COMPOSITE:
            raise IllegalParentError(
                f"{parent.name!r} is a {parent.kind.value} object and cannot parent children"
            )
        if not name:
            raise InvalidArgumentError("object name must be non-empty")
        assigned = self._unique_sibling_name(parent, name)
        obj = ModelObject(
            id=self._new_object_id(), kind=kind, name=assigned, parent=parent.id
        )
        self.objects[obj.id] = obj
        parent.children.append(obj.id)
        self._new_interface(obj, DEFAULT_INTERFACE)
        return obj

    def add_interface(self, object_id: str, name: str) -> Interface:
        if object_id == ROOT_ID:
            raise InvalidArgumentError("the model root cannot own interfaces")
        obj = self.object(object_id)
        if not name:
            raise InvalidArgumentError("interface name must be non-empty")
        if any(iface.name == name for iface in obj.interfaces):
            raise DuplicateNameError(f"object {obj.name!r} already has interface {name!r}")
        return self._new_interface(obj, name)

    def connect(self, interface_a: str, interface_b: str) -> Connection:
        iface_a = self.interface(interface_a)
        iface_b = self.interface(interface_b)
        owner_a = self.objects[iface_a.owner]
        owner_b = self.objects[iface_b.owner]
        if owner_a.id == owner_b.id:
            raise LoopError(f"cannot connect {owner_a.name!r} to itself")
        if not self.connection_allowed(owner_a.id, owner_b.id):
            raise IllegalConnectionError(
                f"{owner_a.name!r} and {owner_b.name!r} are neither siblings nor "
                "parent/child, and neither is an area network"
            )
        conn = Connection(
            id=self._new_connection_id(), endpoint_a=iface_a.id, endpoint_b=iface_b.id
        )
        self.connections[conn.id] = conn
        return conn

    def connection_allowed(self, object_a: str, object_b: str) -> bool:
        """The legality predicate: siblings, direct parent/child, or area network."""
        a = self.object(object_a)
        b = self.object(object_b)
        if a.id == b.id:
            return False
        if a.kind is ObjectKind.AREA_NETWORK or b.kind is ObjectKind.AREA_NETWORK:
            return True
        if a.parent == b.parent:
            return True
        return a.parent == b.id or b.parent == a.id

    # -- duplication and removal ---------------------------------------------

    def copy_subtree(self, object_id: str) -> ModelObject:
        """Deep-copy an object and its descendants under the same parent.

        The copy is auto-renamed like any new sibling; names inside the copy
        are preserved verbatim.  Connections internal to the subtree are
        duplicated onto the corresponding new interfaces; connections leaving
        the subtree are re-created only when the far end is an area network,
        and dropped otherwise.  Scenario specs attached to copied objects are
        duplicated along with them.
        """
        if object_id == ROOT_ID:
            raise InvalidArgumentError("the model root cannot be copied")
        source = self.object(object_id)
        parent = self.object(source.parent)

        object_map: dict[str, str] = {}
        interface_map: dict[str, str] = {}
        assigned = self._unique_sibling_name(parent, source.name)
        for original in self.iter_subtree(source.id):
            clone = ModelObject(
                id=self._new_object_id(),
                kind=original.kind,
                name=assigned if original.id == source.id else original.name,
                parent=parent.id if original.id == source.id else object_map[original.parent],
            )
            object_map[original.id] = clone.id
            self.objects[clone.id] = clone
            if original.id == source.id:
                parent.children.append(clone.id)
            else:
                self.objects[clone.parent].children.append(clone.id)
            for iface in original.interfaces:
                new_iface = self._new_interface(clone, iface.name)
                interface_map[iface.id] = new_iface.id

        copied = set(object_map)
        for conn in list(self.connections.values()):
            iface_a = self._interfaces[conn.endpoint_a]
            iface_b = self._interfaces[conn.endpoint_b]
            a_in = iface_a.owner in copied
            b_in = iface_b.owner in copied
            if a_in and b_in:
                self.connect(interface_map[iface_a.id], interface_map[iface_b.id])
            elif a_in or b_in:
                inside, outside = (iface_a, iface_b) if a_in else (iface_b, iface_a)
                if self.objects[outside.owner].kind is ObjectKind.AREA_NETWORK:
                    self.connect(interface_map[inside.id], outside.id)

        for name, spec in self.scenarios.items():
            duplicate = getattr(spec, "with_copied_objects", None)
            if duplicate is not None:
                self.scenarios[name] = duplicate(object_map)

        return self.objects[object_map[source.id]]

    def remove_object(self, object_id: str) -> None:
        if object_id == ROOT_ID:
            raise InvalidArgumentError("the model root cannot be removed")
        doomed = list(self.iter_subtree(object_id))
        doomed_ifaces = {iface.id for obj in doomed for iface in obj.interfaces}
        for conn_id in [
            c.id for c in self.connections.values() if doomed_ifaces & set(c.endpoints())
        ]:
            del self.connections[conn_id]
        parent = self.object(doomed[0].parent)
        parent.children.remove(object_id)
        for obj in doomed:
            for iface in obj.interfaces:
                del self._interfaces[iface.id]
            del self.objects[obj.id]

    # -- validation ------------------------------------------------------------

    def validate(self) -> None:
        """Re-check every structural invariant; raises IntegrityError if any fail."""
        problems: list[str] = []
        reachable: set[str] = set()
        for top in self.root.children:
            if top not in self.objects:
                problems.append(f"root lists unknown child {top!r}")
                continue
            for obj in self.iter_subtree(top):
                reachable.add(obj.id)
        if reachable != set(self.objects):
            stray = set(self.objects) - reachable
            problems.append(f"objects unreachable from root: {sorted(stray)}")

        for obj in self.objects.values():
            parent = self.objects.get(obj.parent) if obj.parent != ROOT_ID else self.root
            if parent is None:
                problems.append(f"object {obj.id} has unknown parent {obj.parent!r}")
            elif obj.id not in parent.children:
                problems.append(f"object {obj.id} missing from children of {obj.parent}")
            if obj.children and obj.kind is not ObjectKind.COMPOSITE:
                problems.append(f"{obj.kind.value} object {obj.name!r} has children")
            if not obj.interfaces:
                problems.append(f"object {obj.name!r} has no interface")
            iface_names = [iface.name for iface in obj.interfaces]
            if len(set(iface_names)) != len(iface_names):
                problems.append(f"object {obj.name!r} has duplicate interface names")

        for holder in [self.root, *self.objects.values()]:
            names = []
            for child_id in holder.children:
                child = self.objects.get(child_id)
                if child is not None:
                    names.append(child.name)
            if len(set(names)) != len(names):
                problems.append(f"duplicate sibling names under {holder.name!r}")

        for conn in self.connections.values():
            ends = []
            for iface_id in conn.endpoints():
                iface = self._interfaces.get(iface_id)
                if iface is None:
                    problems.append(f"connection {conn.id} references unknown interface {iface_id!r}")
                else:
                    ends.append(iface)
            if len(ends) != 2:
                continue
            a, b = ends
            if a.owner == b.owner:
                problems.append(f"connection {conn.id} loops on object {a.owner}")
            elif not self.connection_allowed(a.owner, b.owner):
                problems.append(f"connection {conn.id} violates the connection rule")

        if problems:
            raise IntegrityError(*problems)

    # -- restore hooks used by the persistence layer ----------------------------

    def restore_object(self, object_id: str, kind: ObjectKind, name: str, parent_id: str) -> ModelObject:
        """Insert an object with a persisted id; invariants are checked later."""
        if object_id in self.objects or object_id == ROOT_ID:
            raise IntegrityError(f"duplicate object id {object_id!r}")
        parent = self.object(parent_id)
        obj = ModelObject(id=object_id, kind=kind, name=name, parent=parent_id)
        self.objects[object_id] = obj
        parent.children.append(object_id)
        self._bump_counter("o", object_id)
        return obj

    def restore_interface(self, object_id: str, interface_id: str, name: str) -> Interface:
        if interface_id in self._interfaces:
            raise IntegrityError(f"duplicate interface id {interface_id!r}")
        obj = self.object(object_id)
        iface = Interface(id=interface_id, owner=object_id, name=name)
        obj.interfaces.append(iface)
        self._interfaces[iface.id] = iface
        self._bump_counter("i", interface_id)
        return iface

    def restore_connection(self, connection_id: str, interface_a: str, interface_b: str) -> Connection:
        if connection_id in self.connections:
            raise IntegrityError(f"duplicate connection id {connection_id!r}")
        conn = Connection(id=connection_id, endpoint_a=interface_a, endpoint_b=interface_b)
        self.connections[connection_id] = conn
        self._bump_counter("c", connection_id)
        return conn

    # -- internals ---------------------------------------------------------------

    def _unique_sibling_name(self, parent: ModelObject, requested: str) -> str:
        taken = {self.objects[cid].name for cid in parent.children if cid in self.objects}
        if requested not in taken:
            return requested
        k = 1
        while f"{requested}.{k}" in taken:
            k += 1
        return f"{requested}.{k}"

    def _new_interface(self, obj: ModelObject, name: str) -> Interface:
        iface = Interface(id=f"i{self._next_interface}", owner=obj.id, name=name)
        self._next_interface += 1
        obj.interfaces.append(iface)
        self._interfaces[iface.id] = iface
        return iface

    def _new_object_id(self) -> str:
        object_id = f"o{self._next_object}"
        self._next_object += 1
        return object_id

    def _new_connection_id(self) -> str:
        connection_id = f"c{self._next_connection}"
        self._next_connection += 1
        return connection_id

    def _bump_counter(self, prefix: str, restored_id: str) -> None:
        # Keep generated ids clear of persisted ones that follow our pattern.
        if restored_id.startswith(prefix) and restored_id[len(prefix):].isdigit():
            n = int(restored_id[len(prefix):]) + 1
            if prefix == "o":
                self._next_object = max(self._next_object, n)
            elif prefix == "i":
                self._next_interface = max(self._next_interface, n)
            else:
                self._next_connection = max(self._next_connection, n)
