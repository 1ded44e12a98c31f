"""Message-traffic scenarios over a model: resources, tasks and services.

A scenario attaches capacity/delay resources, repeating message tasks and
acknowledgement services to model objects, then executes on the event kernel.
Routed messages walk the minimum-hop path and acquire every resource-bearing
vertex in turn (endpoints included); non-routed messages pay capacity and
delay only at the destination.  Every hop, delivery and drop is logged with
its simulation time.
"""
from __future__ import annotations

import itertools
import random
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum

from . import des
from .errors import ConflictError, InvalidArgumentError, NotFoundError
from .graph import ConnectionGraph, build_connection_graph, shortest_path
from .model import Model

# Gaussian repeat jitter is truncated below at this interval so a sampled
# interval can never be zero or negative.
MIN_INTERVAL = 0.001


@dataclass(frozen=True)
class ResourceSpec:
    object: str
    capacity: int = 1
    delay: float = 0.0


@dataclass(frozen=True)
class MessageTaskSpec:
    source: str
    destination: str
    label: str
    start: float = 0.0
    repeats: int = 0
    interval_mean: float = 0.0
    interval_sigma: float = 0.0
    routed: bool = True
    request_ack: bool = False


class ServiceKind(Enum):
    ACK_RESPONDER = "ack-responder"


@dataclass(frozen=True)
class ServiceSpec:
    object: str
    per_message_delay: float = 0.0
    kind: ServiceKind = ServiceKind.ACK_RESPONDER


@dataclass
class ScenarioSpec:
    name: str
    duration: float
    seed: int = 0
    resources: list[ResourceSpec] = field(default_factory=list)
    tasks: list[MessageTaskSpec] = field(default_factory=list)
    services: list[ServiceSpec] = field(default_factory=list)

    def with_copied_objects(self, id_map: dict[str, str]) -> "ScenarioSpec":
        """Duplicate specs attached to copied objects, remapping ids.

        Resources and services follow the object they sit on; a task follows
        its source object, and its destination is remapped only when the
        destination was copied too.
        """
        resources = list(self.resources)
        for spec in self.resources:
            if spec.object in id_map:
                resources.append(replace(spec, object=id_map[spec.object]))
        services = list(self.services)
        for spec in self.services:
            if spec.object in id_map:
                services.append(replace(spec, object=id_map[spec.object]))
        tasks = list(self.tasks)
        for task in self.tasks:
            if task.source in id_map:
                tasks.append(
                    replace(
                        task,
                        source=id_map[task.source],
                        destination=id_map.get(task.destination, task.destination),
                    )
                )
        return ScenarioSpec(
            name=self.name,
            duration=self.duration,
            seed=self.seed,
            resources=resources,
            tasks=tasks,
            services=services,
        )


def attach_scenario(model: Model, spec: ScenarioSpec) -> None:
    """Attach a scenario to the model so copies and saves carry it along."""
    _validate(model, spec)
    model.scenarios[spec.name] = spec


def replace_resource(
    spec: ScenarioSpec, object_id: str, *, capacity: int | None = None, delay: float | None = None
) -> ScenarioSpec:
    """Return a copy of the scenario with one object's resource re-parameterised."""
    resources = []
    found = False
    for res in spec.resources:
        if res.object == object_id:
            found = True
            res = replace(
                res,
                capacity=res.capacity if capacity is None else capacity,
                delay=res.delay if delay is None else delay,
            )
        resources.append(res)
    if not found:
        raise NotFoundError(f"no resource attached to object {object_id!r}")
    return replace(spec, resources=resources)


class RecordKind(Enum):
    SENT = "sent"
    HOP_ACQUIRED = "hop-acquired"
    HOP_RELEASED = "hop-released"
    DELIVERED = "delivered"
    ACK_SENT = "ack-sent"
    ACK_DELIVERED = "ack-delivered"
    DROPPED = "dropped"


@dataclass(frozen=True)
class LogRecord:
    time: float
    kind: RecordKind
    message_id: int
    task_label: str
    object: str
    hop_index: int | None = None
    detail: str = ""


@dataclass
class SimLog:
    scenario: str
    seed: int
    duration: float
    records: list[LogRecord] = field(default_factory=list)


@dataclass(frozen=True)
class BoundScenario:
    """A scenario validated against a model and ready to run."""

    model: Model
    spec: ScenarioSpec


def bind(model: Model, spec: ScenarioSpec) -> BoundScenario:
    _validate(model, spec)
    return BoundScenario(model=model, spec=spec)


def _validate(model: Model, spec: ScenarioSpec) -> None:
    if spec.duration < 0:
        raise InvalidArgumentError("scenario duration must be >= 0")
    seen_resources: set[str] = set()
    for res in spec.resources:
        _require_object(model, res.object, "resource")
        if res.object in seen_resources:
            raise ConflictError(f"object {res.object!r} already carries a resource")
        seen_resources.add(res.object)
        if res.capacity < 1:
            raise InvalidArgumentError("resource capacity must be >= 1")
        if res.delay < 0:
            raise InvalidArgumentError("resource delay must be >= 0")
    seen_services: set[str] = set()
    for svc in spec.services:
        _require_object(model, svc.object, "service")
        if svc.object in seen_services:
            raise ConflictError(f"object {svc.object!r} already carries a service")
        seen_services.add(svc.object)
        if svc.per_message_delay < 0:
            raise InvalidArgumentError("service delay must be >= 0")
    for task in spec.tasks:
        _require_object(model, task.source, "task source")
        _require_object(model, task.destination, "task destination")
        if task.source == task.destination:
            raise InvalidArgumentError("task source and destination must differ")
        if task.start < 0:
            raise InvalidArgumentError("task start must be >= 0")
        if task.repeats < 0:
            raise InvalidArgumentError("task repeats must be >= 0")
        if task.repeats > 0 and task.interval_mean <= 0:
            raise InvalidArgumentError("repeating task needs interval_mean > 0")
        if task.interval_sigma < 0:
            raise InvalidArgumentError("interval_sigma must be >= 0")


def _require_object(model: Model, object_id: str, what: str) -> None:
    if object_id not in model.objects:
        raise NotFoundError(f"{what} references unknown object {object_id!r}")


def occurrence_times(task: MessageTaskSpec, task_index: int, seed: int) -> list[float]:
    """Send times for every occurrence of a task (1 + repeats entries).

    Each repeat interval is max(MIN_INTERVAL, Normal(mean, sigma)) drawn from
    a generator keyed by (seed, task index, occurrence index), so edits to one
    task never perturb another task's samples.
    """
    times = [task.start]
    for occurrence in range(1, task.repeats + 1):
        if task.interval_sigma == 0:
            interval = task.interval_mean
        else:
            rng = random.Random(f"{seed}/{task_index}/{occurrence}")
            interval = rng.gauss(task.interval_mean, task.interval_sigma)
        times.append(times[-1] + max(MIN_INTERVAL, interval))
    return times


class _Runner:
    def __init__(self, bound: BoundScenario):
        self.spec = bound.spec
        self.graph: ConnectionGraph = build_connection_graph(bound.model)
        self.sim = des.Simulation()
        self.log: list[LogRecord] = []
        self.message_ids = itertools.count(1)
        self.resources: dict[str, tuple[des.Resource, float]] = {
            res.object: (des.Resource(self.sim, res.capacity), res.delay)
            for res in self.spec.resources
        }
        self.services: dict[str, des.Queue] = {}
        self._route_cache: dict[tuple[str, str], object] = {}

    def record(self, kind: RecordKind, message_id: int, label: str, obj: str,
               hop_index: int | None = None, detail: str = "") -> None:
        self.log.append(
            LogRecord(self.sim.now, kind, message_id, label, obj, hop_index, detail)
        )

    def route(self, src: str, dst: str):
        key = (src, dst)
        if key not in self._route_cache:
            self._route_cache[key] = shortest_path(self.graph, src, dst)
        return self._route_cache[key]

    def run(self) -> SimLog:
        for svc in self.spec.services:
            if svc.kind is ServiceKind.ACK_RESPONDER:
                queue = self.sim.queue()
                self.services[svc.object] = queue
                self.sim.schedule(0.0, self._ack_responder(svc, queue))
        for index, task in enumerate(self.spec.tasks):
            for at in occurrence_times(task, index, self.spec.seed):
                if at > self.spec.duration:
                    break
                self.sim.schedule(at, self._message(task))
        self.sim.run_until(self.spec.duration)
        return SimLog(
            scenario=self.spec.name,
            seed=self.spec.seed,
            duration=self.spec.duration,
            records=self.log,
        )

    def _message(self, task: MessageTaskSpec):
        message_id = next(self.message_ids)
        self.record(RecordKind.SENT, message_id, task.label, task.source,
                    detail=f"to={task.destination}")
        if task.routed:
            path = self.route(task.source, task.destination)
            if path is None:
                self.record(RecordKind.DROPPED, message_id, task.label, task.source,
                            detail="unreachable")
                return
            yield from self._traverse(path.vertices, message_id, task.label)
        else:
            # Non-routed: capacity and delay apply at the receiving node only.
            yield from self._occupy(task.destination, message_id, task.label, None)
        self.record(RecordKind.DELIVERED, message_id, task.label, task.destination,
                    detail=f"from={task.source}")
        if task.request_ack and task.destination in self.services:
            self.services[task.destination].put((message_id, task))

    def _traverse(self, vertices: tuple[str, ...], message_id: int, label: str):
        for hop_index, vertex in enumerate(vertices):
            yield from self._occupy(vertex, message_id, label, hop_index)

    def _occupy(self, vertex: str, message_id: int, label: str, hop_index: int | None):
        entry = self.resources.get(vertex)
        if entry is None:
            return
        resource, delay = entry
        yield resource.acquire()
        self.record(RecordKind.HOP_ACQUIRED, message_id, label, vertex, hop_index)
        if delay > 0:
            yield self.sim.timeout(delay)
        yield resource.release()
        self.record(RecordKind.HOP_RELEASED, message_id, label, vertex, hop_index)

    def _ack_responder(self, svc: ServiceSpec, queue: des.Queue):
        while True:
            message_id, task = yield queue.get()
            if svc.per_message_delay > 0:
                yield self.sim.timeout(svc.per_message_delay)
            ack_id = next(self.message_ids)
            self.record(RecordKind.ACK_SENT, ack_id, task.label, svc.object,
                        detail=f"ack-of={message_id}")
            path = self.route(svc.object, task.source)
            if path is None:
                self.record(RecordKind.DROPPED, ack_id, task.label, svc.object,
                            detail="unreachable")
                continue
            yield from self._traverse(path.vertices, ack_id, task.label)
            self.record(RecordKind.ACK_DELIVERED, ack_id, task.label, task.source,
                        detail=f"ack-of={message_id}")


def run(bound: BoundScenario) -> SimLog:
    """Execute the scenario and return the time-stamped log."""
    return _Runner(bound).run()


def delivery_times(log: SimLog, task_label: str) -> list[tuple[float, float]]:
    """(send_time, delivery_seconds) per delivered message of the label,
    ordered by send time; undelivered messages are excluded."""
    sent: dict[int, float] = {}
    out: list[tuple[int, float, float]] = []
    for rec in log.records:
        if rec.task_label != task_label:
            continue
        if rec.kind is RecordKind.SENT:
            sent[rec.message_id] = rec.time
        elif rec.kind is RecordKind.DELIVERED and rec.message_id in sent:
            send_time = sent[rec.message_id]
            out.append((rec.message_id, send_time, rec.time - send_time))
    out.sort(key=lambda item: (item[1], item[0]))
    return [(send_time, delta) for _, send_time, delta in out]


@dataclass
class LabelStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    acks_sent: int = 0
    acks_delivered: int = 0
    min_delivery: float | None = None
    mean_delivery: float | None = None
    max_delivery: float | None = None


@dataclass
class ResourceStats:
    peak_in_use: int = 0
    busy_time: float = 0.0


@dataclass
class RunSummary:
    scenario: str
    seed: int
    duration: float
    total_records: int
    messages_sent: int
    labels: dict[str, LabelStats]
    resources: dict[str, ResourceStats]


def summarize(log: SimLog) -> RunSummary:
    """Per-label counts and delivery stats plus per-resource usage.

    A resource's busy time sums slot-holding time per grant; holds still open
    at the horizon are counted up to the horizon.
    """
    labels: dict[str, LabelStats] = {}
    deliveries: dict[str, list[float]] = {}
    sent_at: dict[int, float] = {}
    open_holds: dict[tuple[int, str], float] = {}
    resources: dict[str, ResourceStats] = {}
    in_use: dict[str, int] = {}
    messages_sent = 0

    for rec in log.records:
        stats = labels.setdefault(rec.task_label, LabelStats())
        if rec.kind is RecordKind.SENT:
            stats.sent += 1
            messages_sent += 1
            sent_at[rec.message_id] = rec.time
        elif rec.kind is RecordKind.DELIVERED:
            stats.delivered += 1
            if rec.message_id in sent_at:
                deliveries.setdefault(rec.task_label, []).append(
                    rec.time - sent_at[rec.message_id]
                )
        elif rec.kind is RecordKind.DROPPED:
            stats.dropped += 1
        elif rec.kind is RecordKind.ACK_SENT:
            stats.acks_sent += 1
            messages_sent += 1
        elif rec.kind is RecordKind.ACK_DELIVERED:
            stats.acks_delivered += 1
        elif rec.kind is RecordKind.HOP_ACQUIRED:
            res = resources.setdefault(rec.object, ResourceStats())
            in_use[rec.object] = in_use.get(rec.object, 0) + 1
            res.peak_in_use = max(res.peak_in_use, in_use[rec.object])
            open_holds[(rec.message_id, rec.object)] = rec.time
        elif rec.kind is RecordKind.HOP_RELEASED:
            in_use[rec.object] -= 1
            start = open_holds.pop((rec.message_id, rec.object), None)
            if start is not None:
                resources[rec.object].busy_time += rec.time - start

    for (_, obj), start in open_holds.items():
        resources[obj].busy_time += log.duration - start
    for label, values in deliveries.items():
        stats = labels[label]
        stats.min_delivery = min(values)
        stats.mean_delivery = statistics.fmean(values)
        stats.max_delivery = max(values)

    return RunSummary(
        scenario=log.scenario,
        seed=log.seed,
        duration=log.duration,
        total_records=len(log.records),
        messages_sent=messages_sent,
        labels=labels,
        resources=resources,
    )
