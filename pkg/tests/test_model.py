import random

import pytest

from tacnet import (
    DuplicateNameError,
    IllegalConnectionError,
    IllegalParentError,
    IntegrityError,
    InvalidArgumentError,
    LoopError,
    Model,
    NotFoundError,
    ObjectKind,
)
from helpers import random_model


def test_create_model_is_empty():
    m = Model("Company Model")
    assert m.name == "Company Model"
    assert m.objects == {}
    assert m.connections == {}


def test_create_model_rejects_empty_name():
    with pytest.raises(InvalidArgumentError):
        Model("")


class TestAddObject:
    def test_assigns_requested_name_when_free(self, company):
        assert company.afv.name == "AFV"
        assert company.afv.parent == company.platoon.id

    def test_auto_renames_on_collision(self, company):
        dup = company.m.add_object(company.platoon.id, ObjectKind.COMPOSITE, "AFV")
        assert dup.name == "AFV.1"

    def test_successive_collisions_count_up(self):
        m = Model("X")
        names = [m.add_object("root", ObjectKind.NETWORK, "Node").name for _ in range(5)]
        assert names == ["Node", "Node.1", "Node.2", "Node.3", "Node.4"]

    def test_fills_smallest_free_suffix(self):
        m = Model("X")
        m.add_object("root", ObjectKind.NETWORK, "Node")
        second = m.add_object("root", ObjectKind.NETWORK, "Node")
        m.remove_object(second.id)
        assert m.add_object("root", ObjectKind.NETWORK, "Node").name == "Node.1"

    def test_rejects_network_parent(self, company):
        with pytest.raises(IllegalParentError):
            company.m.add_object(company.data_radio.id, ObjectKind.NETWORK, "X")

    def test_rejects_area_network_parent(self, company):
        with pytest.raises(IllegalParentError):
            company.m.add_object(company.data_network.id, ObjectKind.NETWORK, "X")

    def test_rejects_unknown_parent(self, company):
        with pytest.raises(NotFoundError):
            company.m.add_object("o999", ObjectKind.NETWORK, "X")

    def test_creates_default_interface(self, company):
        assert [i.name for i in company.router.interfaces] == ["default"]


class TestAddInterface:
    def test_appends_second_interface(self, company):
        radio2 = company.m.add_interface(company.router.id, "radio2")
        assert [i.name for i in company.router.interfaces] == ["default", "radio2"]
        assert radio2.owner == company.router.id

    def test_rejects_duplicate_name(self, company):
        with pytest.raises(DuplicateNameError):
            company.m.add_interface(company.router.id, "default")

    def test_root_cannot_own_interfaces(self, company):
        with pytest.raises(InvalidArgumentError):
            company.m.add_interface("root", "uplink")


class TestConnect:
    def test_siblings_allowed(self, company):
        # router-terminal among the AFV children was already made in the fixture
        conns = company.m.connections_of(company.terminal.id)
        assert len(conns) == 1

    def test_area_network_allowed_across_levels(self, company):
        # data radio sits two levels below the area network's parent
        conns = company.m.connections_of(company.data_network.id)
        assert len(conns) == 1

    def test_parent_child_allowed(self, company):
        conn = company.m.connect(
            company.afv.interface().id, company.router.interface().id
        )
        assert conn.id in company.m.connections

    def test_grandparent_rejected(self, company):
        with pytest.raises(IllegalConnectionError):
            company.m.connect(
                company.terminal.interface().id, company.platoon.interface().id
            )

    def test_cousins_rejected(self, company):
        afv2 = company.m.add_object(company.platoon.id, ObjectKind.COMPOSITE, "AFV")
        other = company.m.add_object(afv2.id, ObjectKind.NETWORK, "Terminal")
        with pytest.raises(IllegalConnectionError):
            company.m.connect(
                company.terminal.interface().id, other.interface().id
            )

    def test_loop_rejected(self, company):
        second = company.m.add_interface(company.router.id, "lan")
        with pytest.raises(LoopError):
            company.m.connect(company.router.interface().id, second.id)

    def test_reported_from_both_endpoints(self, company):
        a = company.m.connections_of(company.router.id)
        b = company.m.connections_of(company.data_radio.id)
        shared = {c.id for c in a} & {c.id for c in b}
        assert len(shared) == 1

    def test_unknown_interface(self, company):
        with pytest.raises(NotFoundError):
            company.m.connect("i999", company.router.interface().id)


class TestCopySubtree:
    def test_copy_is_renamed_and_children_kept_verbatim(self, company):
        clone = company.m.copy_subtree(company.afv.id)
        assert clone.name == "AFV.1"
        names = [company.m.objects[c].name for c in clone.children]
        assert names == ["Data Radio", "Router", "Terminal"]

    def test_connection_totals(self, company):
        # by hand: 2 subtree-internal connections duplicated, the radio-to-net
        # link re-created onto the same area network, externals dropped: 3 + 3
        company.m.copy_subtree(company.afv.id)
        assert len(company.m.connections) == 6

    def test_copy_gets_own_area_network_link(self, company):
        clone = company.m.copy_subtree(company.afv.id)
        new_radio = next(
            company.m.objects[c]
            for c in clone.children
            if company.m.objects[c].name == "Data Radio"
        )
        conns = company.m.connections_of(new_radio.id)
        owners = set()
        for conn in conns:
            for iface_id in conn.endpoints():
                owners.add(company.m.interface(iface_id).owner)
        assert company.data_network.id in owners

    def test_structure_preserving(self, company):
        clone = company.m.copy_subtree(company.afv.id)
        src = list(company.m.iter_subtree(company.afv.id))
        dst = list(company.m.iter_subtree(clone.id))
        assert [o.kind for o in src] == [o.kind for o in dst]
        assert [[i.name for i in o.interfaces] for o in src] == [
            [i.name for i in o.interfaces] for o in dst
        ]
        assert [o.name for o in src[1:]] == [o.name for o in dst[1:]]

    def test_plain_external_connection_dropped(self, company):
        spare = company.m.add_object(company.platoon.id, ObjectKind.NETWORK, "Spare")
        company.m.connect(spare.interface().id, company.afv.interface().id)
        clone = company.m.copy_subtree(company.afv.id)
        spare_conns = company.m.connections_of(spare.id)
        assert len(spare_conns) == 1  # still only the original link
        assert not any(
            company.m.interface(e).owner == clone.id
            for c in spare_conns
            for e in c.endpoints()
        )

    def test_internal_area_network_is_reinstanced(self):
        m = Model("X")
        unit = m.add_object("root", ObjectKind.COMPOSITE, "Unit")
        net = m.add_object(unit.id, ObjectKind.AREA_NETWORK, "Net")
        radio = m.add_object(unit.id, ObjectKind.NETWORK, "Radio")
        m.connect(radio.interface().id, net.interface().id)
        clone = m.copy_subtree(unit.id)
        new_net = next(
            m.objects[c] for c in clone.children if m.objects[c].kind is ObjectKind.AREA_NETWORK
        )
        assert new_net.id != net.id
        assert len(m.connections_of(new_net.id)) == 1
        assert len(m.connections_of(net.id)) == 1

    def test_leaf_copy_creates_no_connections(self):
        m = Model("X")
        leaf = m.add_object("root", ObjectKind.NETWORK, "Lone")
        clone = m.copy_subtree(leaf.id)
        assert clone.name == "Lone.1"
        assert m.connections == {}

    def test_root_copy_rejected(self, company):
        with pytest.raises(InvalidArgumentError):
            company.m.copy_subtree("root")

    def test_copies_never_violate_rules(self, company):
        company.m.copy_subtree(company.afv.id)
        company.m.copy_subtree(company.platoon.id)
        company.m.validate()


class TestRemoveObject:
    def test_removes_subtree_and_connections(self, company):
        company.m.remove_object(company.afv.id)
        assert {o.name for o in company.m.objects.values()} == {"DataNetwork", "Platoon"}
        assert company.m.connections == {}

    def test_remove_root_rejected(self, company):
        with pytest.raises(InvalidArgumentError):
            company.m.remove_object("root")

    def test_lookup_after_remove(self, company):
        company.m.remove_object(company.afv.id)
        with pytest.raises(NotFoundError):
            company.m.object(company.afv.id)

    def test_no_dangling_endpoints(self, company):
        company.m.remove_object(company.data_radio.id)
        company.m.validate()
        assert len(company.m.connections) == 1  # router-terminal survives


class TestFindObject:
    def test_resolves_name_path(self, company):
        found = company.m.find_object(["Platoon", "AFV", "Router"])
        assert found is company.router

    def test_empty_path_is_root(self, company):
        assert company.m.find_object([]) is company.m.root

    def test_absent_is_none(self, company):
        assert company.m.find_object(["Nope"]) is None


class TestValidate:
    def test_fixture_is_valid(self, company):
        company.m.validate()

    def test_detects_dangling_connection(self, company):
        conn = next(iter(company.m.connections.values()))
        conn.endpoint_b = "i999"
        with pytest.raises(IntegrityError) as err:
            company.m.validate()
        assert conn.id in str(err.value)

    def test_detects_illegal_connection(self, company):
        # rewire the terminal link onto the grandparent platoon
        conn = company.m.connections["c2"]
        conn.endpoint_b = company.platoon.interface().id
        with pytest.raises(IntegrityError):
            company.m.validate()

    def test_detects_duplicate_sibling_names(self, company):
        company.router.name = "Terminal"
        with pytest.raises(IntegrityError):
            company.m.validate()


def test_random_models_always_satisfy_invariants():
    for seed in range(40):
        m = random_model(random.Random(seed))
        m.validate()
        for obj in m.objects.values():
            siblings = [m.objects[c].name for c in m.object(obj.parent).children]
            assert siblings.count(obj.name) == 1
