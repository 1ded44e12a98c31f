"""Ready-made example models: a single-platoon company net and a battlegroup.

Both are built through the ordinary model API and double as test fixtures.
The battlegroup model exercises the intended workflow: build one company in
full, attach its traffic scenario, then duplicate the company so structure,
connections to the shared nets and attached specs all come along.
"""
from __future__ import annotations

import random
from dataclasses import replace

from .model import Model, ModelObject, ObjectKind
from .scenario import (
    MessageTaskSpec,
    ResourceSpec,
    ScenarioSpec,
    ServiceSpec,
    attach_scenario,
)

POSITION_LABEL = "position-report"
REPORTS_LABEL = "reports-and-returns"


def company_model() -> Model:
    """One platoon with a single armoured vehicle on a shared data network:
    six objects, three connections."""
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
    return m


def _add_afv(m: Model, platoon: ModelObject, coy_net: ModelObject) -> ModelObject:
    afv = m.add_object(platoon.id, ObjectKind.COMPOSITE, "AFV")
    data_radio = m.add_object(afv.id, ObjectKind.NETWORK, "Data Radio")
    router = m.add_object(afv.id, ObjectKind.NETWORK, "Router")
    terminal = m.add_object(afv.id, ObjectKind.NETWORK, "Terminal")
    m.connect(router.interface().id, data_radio.interface().id)
    m.connect(router.interface().id, terminal.interface().id)
    m.connect(data_radio.interface().id, coy_net.interface().id)
    return afv


ROUTER_DELAY = 0.5
NET_DELAY = 2.5
DEFAULT_DURATION = 3600.0
POSITION_INTERVAL = 60.0
POSITION_SIGMA = 2.0
REPORT_INTERVAL = 300.0
REPORT_SIGMA = 5.0


def battlegroup_model(
    *,
    duration: float = DEFAULT_DURATION,
    seed: int = 1,
    include_reports: bool = True,
) -> Model:
    """Three companies of three platoons of three AFVs, each company HQ
    uplinked from its second radio to the battlegroup data network.

    Attaches two scenarios: "position-only" (cross-company position reports)
    and, when include_reports is set, "with-reports" which adds the
    acknowledged in-company reports-and-returns traffic.  All capacities
    start at 1; use scenario.replace_resource for what-if variants.
    """
    m = Model("Battlegroup Model")
    bg_net = m.add_object("root", ObjectKind.AREA_NETWORK, "BGDataNetwork")

    company = m.add_object("root", ObjectKind.COMPOSITE, "Company")
    coy_net = m.add_object(company.id, ObjectKind.AREA_NETWORK, "CoyDataNetwork")
    platoon = m.add_object(company.id, ObjectKind.COMPOSITE, "Platoon")
    afv = _add_afv(m, platoon, coy_net)
    m.copy_subtree(afv.id)
    m.copy_subtree(afv.id)
    m.copy_subtree(platoon.id)
    m.copy_subtree(platoon.id)
    coy_hq = m.add_object(company.id, ObjectKind.NETWORK, "Coy HQ")
    radio2 = m.add_interface(coy_hq.id, "radio2")
    m.connect(coy_hq.interface().id, coy_net.interface().id)
    m.connect(radio2.id, bg_net.interface().id)

    # Attach the first company's traffic before duplicating it, so the copies
    # carry their own resources, services and report tasks.
    position_only = ScenarioSpec(name="position-only", duration=duration, seed=seed)
    with_reports = ScenarioSpec(name="with-reports", duration=duration, seed=seed)
    company_resources = list(_company_resources(m, company, coy_net))
    company_services = list(_company_services(m, company, coy_hq))
    for spec in (position_only, with_reports):
        spec.resources.extend(company_resources)
        spec.services.extend(company_services)
    with_reports.tasks.extend(_company_report_tasks(m, company, coy_hq, duration))
    attach_scenario(m, position_only)
    if include_reports:
        attach_scenario(m, with_reports)

    m.copy_subtree(company.id)
    m.copy_subtree(company.id)

    bg_hq = m.add_object("root", ObjectKind.NETWORK, "BG HQ")
    m.connect(bg_hq.interface().id, bg_net.interface().id)

    bg_resource = ResourceSpec(object=bg_net.id, capacity=1, delay=NET_DELAY)
    for name in list(m.scenarios):
        spec = m.scenarios[name]
        spec.resources.append(bg_resource)
        spec.tasks.extend(_position_tasks(m, duration))
        m.scenarios[name] = spec
    return m


def _company_terminals(m: Model, company: ModelObject) -> list[ModelObject]:
    return [
        obj
        for obj in m.iter_subtree(company.id)
        if obj.kind is ObjectKind.NETWORK and obj.name == "Terminal"
    ]


def _company_resources(m, company, coy_net):
    yield ResourceSpec(object=coy_net.id, capacity=1, delay=NET_DELAY)
    for obj in m.iter_subtree(company.id):
        if obj.name == "Router":
            yield ResourceSpec(object=obj.id, capacity=1, delay=ROUTER_DELAY)


def _company_services(m, company, coy_hq):
    yield ServiceSpec(object=coy_hq.id, per_message_delay=0.0)
    for terminal in _company_terminals(m, company):
        yield ServiceSpec(object=terminal.id, per_message_delay=0.0)


def _company_report_tasks(m, company, coy_hq, duration):
    repeats = max(0, int(duration // REPORT_INTERVAL) - 1)
    for terminal in _company_terminals(m, company):
        yield MessageTaskSpec(
            source=terminal.id,
            destination=coy_hq.id,
            label=REPORTS_LABEL,
            start=0.0,
            repeats=repeats,
            interval_mean=REPORT_INTERVAL,
            interval_sigma=REPORT_SIGMA,
            routed=True,
            request_ack=True,
        )


def _position_tasks(m: Model, duration: float) -> list[MessageTaskSpec]:
    """Two reporting vehicles per company, each addressing the matching
    vehicle in the next company round-robin."""
    companies = [
        m.objects[cid]
        for cid in m.root.children
        if m.objects[cid].kind is ObjectKind.COMPOSITE
    ]
    picks: list[list[ModelObject]] = []
    for company in companies:
        terminals = _company_terminals(m, company)
        picks.append([terminals[0], terminals[3]])
    repeats = max(0, int(duration // POSITION_INTERVAL) - 1)
    tasks = []
    for i, pair in enumerate(picks):
        for j, src in enumerate(pair):
            dst = picks[(i + 1) % len(picks)][j]
            tasks.append(
                MessageTaskSpec(
                    source=src.id,
                    destination=dst.id,
                    label=POSITION_LABEL,
                    start=0.0,
                    repeats=repeats,
                    interval_mean=POSITION_INTERVAL,
                    interval_sigma=POSITION_SIGMA,
                    routed=True,
                    request_ack=False,
                )
            )
    return tasks


def offset_task_starts(
    spec: ScenarioSpec, label: str, seed: int, spread: float = 30.0
) -> ScenarioSpec:
    """Shift every task of a label by a uniform random start offset in
    [0, spread] seconds; offsets are drawn deterministically from the seed."""
    rng = random.Random(f"offsets/{seed}")
    tasks = []
    for task in spec.tasks:
        if task.label == label:
            task = replace(task, start=task.start + rng.uniform(0.0, spread))
        tasks.append(task)
    return replace(spec, tasks=tasks)
