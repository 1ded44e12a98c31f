"""Minimal deterministic process-oriented discrete-event kernel.

Processes are generators that yield commands back to the kernel:

    yield sim.timeout(duration)      # suspend for simulated time
    yield resource.acquire()         # block until a slot is granted (FIFO)
    yield resource.release()         # free the slot, hand off to the next waiter
    item = yield queue.get()         # block until an item is available

``queue.put(item)`` is an ordinary call and never blocks.  Events fire in
(time, scheduling sequence) order, so equal-time events run first-in
first-out and identical schedules replay identically.
"""
from __future__ import annotations

import heapq
import inspect
from collections import deque
from typing import Generator, Any

from .errors import CausalityError, InvalidArgumentError, ProtocolError

Process = Generator[Any, Any, None]


class _Timeout:
    __slots__ = ("duration",)

    def __init__(self, duration: float):
        self.duration = duration


class _Acquire:
    __slots__ = ("resource",)

    def __init__(self, resource: "Resource"):
        self.resource = resource


class _Release:
    __slots__ = ("resource",)

    def __init__(self, resource: "Resource"):
        self.resource = resource


class _Get:
    __slots__ = ("queue",)

    def __init__(self, queue: "Queue"):
        self.queue = queue


class Resource:
    """Capacity-limited resource with strictly FIFO grants.

    A freed slot is handed to the head waiter at the same simulation instant,
    so later arrivals can never overtake the queue.
    """

    def __init__(self, sim: "Simulation", capacity: int):
        if capacity < 1:
            raise InvalidArgumentError("resource capacity must be >= 1")
        self.capacity = capacity
        self.in_use = 0
        self._sim = sim
        self._waiters: deque[Process] = deque()
        self._holds: dict[Process, int] = {}

    def acquire(self) -> _Acquire:
        return _Acquire(self)

    def release(self) -> _Release:
        return _Release(self)

    @property
    def queue_length(self) -> int:
        return len(self._waiters)


class Queue:
    """Unbounded FIFO message queue; getters block until an item arrives."""

    def __init__(self, sim: "Simulation"):
        self._sim = sim
        self._items: deque[Any] = deque()
        self._getters: deque[Process] = deque()

    def put(self, item: Any) -> None:
        if self._getters:
            self._sim._post(self._getters.popleft(), item)
        else:
            self._items.append(item)

    def get(self) -> _Get:
        return _Get(self)

    def __len__(self) -> int:
        return len(self._items)


class Simulation:
    """Event calendar plus clock; strictly single-threaded during run."""

    def __init__(self):
        self._now = 0.0
        self._seq = 0
        self._heap: list[tuple[float, int, Process, Any]] = []

    @property
    def now(self) -> float:
        return self._now

    def timeout(self, duration: float) -> _Timeout:
        if duration < 0:
            raise InvalidArgumentError("timeout duration must be >= 0")
        return _Timeout(duration)

    def resource(self, capacity: int) -> Resource:
        return Resource(self, capacity)

    def queue(self) -> Queue:
        return Queue(self)

    def schedule(self, at: float, process: Process) -> None:
        """Start a process at simulated time `at`, after events already
        scheduled for that time."""
        if not inspect.isgenerator(process):
            raise InvalidArgumentError("a process must be a generator")
        if at < self._now:
            raise CausalityError(f"cannot schedule at {at} before now {self._now}")
        self._post(process, None, at=at)

    def run_until(self, horizon: float) -> None:
        """Process every event with time <= horizon, then set now = horizon."""
        if horizon < self._now:
            raise CausalityError(f"horizon {horizon} precedes now {self._now}")
        while self._heap and self._heap[0][0] <= horizon:
            at, _, process, value = heapq.heappop(self._heap)
            self._now = at
            self._step(process, value)
        self._now = horizon

    # -- internals -----------------------------------------------------------

    def _post(self, process: Process, value: Any, at: float | None = None) -> None:
        heapq.heappush(self._heap, (self._now if at is None else at, self._seq, process, value))
        self._seq += 1

    def _step(self, process: Process, value: Any) -> None:
        # Drive the generator until it parks (timeout, contended acquire,
        # empty-queue get) or finishes.  Uncontended acquires, releases and
        # buffered gets continue synchronously within the same instant.
        while True:
            try:
                command = process.send(value)
            except StopIteration:
                return
            value = None
            if isinstance(command, _Timeout):
                self._post(process, None, at=self._now + command.duration)
                return
            if isinstance(command, _Acquire):
                res = command.resource
                if res.in_use < res.capacity:
                    res.in_use += 1
                    res._holds[process] = res._holds.get(process, 0) + 1
                    continue
                res._waiters.append(process)
                return
            if isinstance(command, _Release):
                res = command.resource
                held = res._holds.get(process, 0)
                if held == 0:
                    raise ProtocolError("release without a matching acquire")
                if held == 1:
                    del res._holds[process]
                else:
                    res._holds[process] = held - 1
                if res._waiters:
                    # Zero-time handoff: the slot transfers immediately, the
                    # waiter resumes at the current instant.
                    waiter = res._waiters.popleft()
                    res._holds[waiter] = res._holds.get(waiter, 0) + 1
                    self._post(waiter, None)
                else:
                    res.in_use -= 1
                continue
            if isinstance(command, _Get):
                q = command.queue
                if q._items:
                    value = q._items.popleft()
                    continue
                q._getters.append(process)
                return
            raise ProtocolError(f"process yielded unknown command {command!r}")
