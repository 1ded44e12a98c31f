"""HTTP facade over model editing and scenario execution.

One model per process.  Mutations are serialized behind a lock and carry an
optimistic version token (If-Match header; stale token yields 409).  Runs
execute on a small worker pool against a deep snapshot of the model, so
editing never blocks on a running simulation.  Completed run logs live in a
bounded LRU; evicted logs answer 410.
"""
from __future__ import annotations

import copy
import itertools
import json
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, replace

from fastapi import FastAPI, Header, Query, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import persistence, scenario
from .errors import (
    IntegrityError,
    InvalidArgumentError,
    NotFoundError,
    TacnetError,
)
from .model import Model, ModelObject, ObjectKind, ROOT_ID


class ObjectCreate(BaseModel):
    parent: str
    kind: str
    name: str


class ConnectionCreate(BaseModel):
    a_interface: str
    b_interface: str


class RunCreate(BaseModel):
    scenario: str
    seed: int | None = None
    duration: float | None = None


# -- JSON projection of the model ------------------------------------------------


def model_to_json(model: Model) -> dict:
    """Two-way JSON projection mirroring the XML document."""
    objects = []
    for obj in model.objects.values():
        objects.append(
            {
                "id": obj.id,
                "kind": obj.kind.value,
                "name": obj.name,
                "parent": obj.parent,
                "children": list(obj.children),
                "interfaces": [{"id": i.id, "name": i.name} for i in obj.interfaces],
            }
        )
    connections = [
        {"id": c.id, "a_interface": c.endpoint_a, "b_interface": c.endpoint_b}
        for c in model.connections.values()
    ]
    scenarios = [_scenario_to_json(spec) for spec in model.scenarios.values()]
    return {
        "name": model.name,
        "objects": objects,
        "connections": connections,
        "scenarios": scenarios,
    }


def _scenario_to_json(spec: scenario.ScenarioSpec) -> dict:
    return {
        "name": spec.name,
        "duration": spec.duration,
        "seed": spec.seed,
        "resources": [
            {"object": r.object, "capacity": r.capacity, "delay": r.delay}
            for r in spec.resources
        ],
        "tasks": [
            {
                "source": t.source,
                "destination": t.destination,
                "label": t.label,
                "start": t.start,
                "repeats": t.repeats,
                "interval_mean": t.interval_mean,
                "interval_sigma": t.interval_sigma,
                "routed": t.routed,
                "request_ack": t.request_ack,
            }
            for t in spec.tasks
        ],
        "services": [
            {"object": s.object, "kind": s.kind.value, "per_message_delay": s.per_message_delay}
            for s in spec.services
        ],
    }


def model_from_json(data: dict) -> Model:
    """Rebuild a model from the projection; objects must list parents before
    children.  Every rule is re-validated, exactly as for XML load."""
    try:
        model = Model(str(data["name"]))
        for obj in data.get("objects", []):
            kind_text = obj["kind"]
            try:
                kind = ObjectKind(kind_text)
            except ValueError:
                raise IntegrityError(f"unknown object kind {kind_text!r}") from None
            parent = obj.get("parent") or ROOT_ID
            if parent != ROOT_ID and parent not in model.objects:
                raise IntegrityError(f"object {obj['id']!r} listed before its parent {parent!r}")
            model.restore_object(obj["id"], kind, obj["name"], parent)
            for iface in obj.get("interfaces", []):
                model.restore_interface(obj["id"], iface["id"], iface["name"])
        for conn in data.get("connections", []):
            model.restore_connection(conn["id"], conn["a_interface"], conn["b_interface"])
    except (KeyError, TypeError) as exc:
        raise IntegrityError(f"malformed model projection: {exc!r}") from None
    model.validate()
    for spec_data in data.get("scenarios", []):
        spec = _scenario_from_json(spec_data)
        scenario.attach_scenario(model, spec)
    return model


def _scenario_from_json(data: dict) -> scenario.ScenarioSpec:
    try:
        return scenario.ScenarioSpec(
            name=data["name"],
            duration=float(data["duration"]),
            seed=int(data.get("seed", 0)),
            resources=[
                scenario.ResourceSpec(
                    object=r["object"],
                    capacity=int(r.get("capacity", 1)),
                    delay=float(r.get("delay", 0.0)),
                )
                for r in data.get("resources", [])
            ],
            tasks=[
                scenario.MessageTaskSpec(
                    source=t["source"],
                    destination=t["destination"],
                    label=t["label"],
                    start=float(t.get("start", 0.0)),
                    repeats=int(t.get("repeats", 0)),
                    interval_mean=float(t.get("interval_mean", 0.0)),
                    interval_sigma=float(t.get("interval_sigma", 0.0)),
                    routed=bool(t.get("routed", True)),
                    request_ack=bool(t.get("request_ack", False)),
                )
                for t in data.get("tasks", [])
            ],
            services=[
                scenario.ServiceSpec(
                    object=s["object"],
                    per_message_delay=float(s.get("per_message_delay", 0.0)),
                    kind=scenario.ServiceKind(s.get("kind", "ack-responder")),
                )
                for s in data.get("services", [])
            ],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed scenario projection: {exc!r}") from None


# -- run registry ------------------------------------------------------------------


class _Run:
    def __init__(self, run_id: str, scenario_name: str, seed: int):
        self.run_id = run_id
        self.status = "pending"
        self.scenario = scenario_name
        self.seed = seed
        self.created_at = time.time()
        self.log: scenario.SimLog | None = None
        self.error: str | None = None
        self.evicted = False

    def handle(self) -> dict:
        return {
            "run_id": self.run_id,
            "status": self.status,
            "scenario": self.scenario,
            "seed": self.seed,
            "created_at": self.created_at,
            "error": self.error,
        }


def create_app(
    model: Model,
    *,
    max_kept_logs: int = 16,
    workers: int = 2,
    ui_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="tacnet model service", version="1.0")
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    lock = threading.RLock()
    state = {"model": model, "version": 0}
    runs: dict[str, _Run] = {}
    completed: list[str] = []  # oldest first, for LRU eviction of logs
    run_ids = itertools.count(1)
    executor = ThreadPoolExecutor(max_workers=workers)

    @app.exception_handler(TacnetError)
    async def tacnet_error(_request: Request, exc: TacnetError):
        status = 404 if isinstance(exc, NotFoundError) else 422
        body = {"error": exc.code, "detail": str(exc)}
        if isinstance(exc, IntegrityError):
            body["violations"] = exc.problems
        return JSONResponse(status_code=status, content=body)

    def check_version(if_match: str | None) -> Response | None:
        if if_match is not None and if_match != str(state["version"]):
            return JSONResponse(
                status_code=409,
                content={
                    "error": "conflict",
                    "detail": f"model version is {state['version']}, request expected {if_match}",
                },
            )
        return None

    # -- model -----------------------------------------------------------------

    @app.get("/model")
    def get_model(request: Request):
        with lock:
            current: Model = state["model"]
            version = state["version"]
            if "application/xml" in request.headers.get("accept", ""):
                return Response(
                    content=persistence.save(current),
                    media_type="application/xml",
                    headers={"ETag": str(version)},
                )
            body = model_to_json(current)
            body["version"] = version
            return JSONResponse(content=body, headers={"ETag": str(version)})

    @app.put("/model")
    async def put_model(request: Request, if_match: str | None = Header(default=None)):
        raw = await request.body()
        content_type = request.headers.get("content-type", "")
        with lock:
            stale = check_version(if_match)
            if stale:
                return stale
            if "json" in content_type:
                replacement = model_from_json(json.loads(raw))
            else:
                replacement, _ = persistence.load(raw)
            state["model"] = replacement
            state["version"] += 1
            return JSONResponse({"version": state["version"]})

    # -- editing ----------------------------------------------------------------

    @app.post("/objects", status_code=201)
    def post_object(body: ObjectCreate, if_match: str | None = Header(default=None)):
        try:
            kind = ObjectKind(body.kind)
        except ValueError:
            raise InvalidArgumentError(f"unknown object kind {body.kind!r}") from None
        with lock:
            stale = check_version(if_match)
            if stale:
                return stale
            obj = state["model"].add_object(body.parent, kind, body.name)
            state["version"] += 1
            return _object_json(obj)

    @app.post("/connections", status_code=201)
    def post_connection(body: ConnectionCreate, if_match: str | None = Header(default=None)):
        with lock:
            stale = check_version(if_match)
            if stale:
                return stale
            conn = state["model"].connect(body.a_interface, body.b_interface)
            state["version"] += 1
            return {"id": conn.id, "a_interface": conn.endpoint_a, "b_interface": conn.endpoint_b}

    @app.post("/objects/{object_id}/copy", status_code=201)
    def post_copy(object_id: str, if_match: str | None = Header(default=None)):
        with lock:
            stale = check_version(if_match)
            if stale:
                return stale
            current: Model = state["model"]
            connections_before = len(current.connections)
            clone = current.copy_subtree(object_id)
            state["version"] += 1
            subtree = list(current.iter_subtree(clone.id))
            return {
                "id": clone.id,
                "name": clone.name,
                "objects": len(subtree),
                "connections": len(current.connections) - connections_before,
            }

    @app.delete("/objects/{object_id}", status_code=204)
    def delete_object(object_id: str, if_match: str | None = Header(default=None)):
        with lock:
            stale = check_version(if_match)
            if stale:
                return stale
            state["model"].remove_object(object_id)
            state["version"] += 1
            return Response(status_code=204)

    # -- runs ----------------------------------------------------------------------

    def execute(run: _Run, snapshot: Model, spec: scenario.ScenarioSpec) -> None:
        run.status = "running"
        try:
            run.log = scenario.run(scenario.bind(snapshot, spec))
            run.status = "done"
        except Exception as exc:  # pragma: no cover - defensive
            run.status = "failed"
            run.error = str(exc)
        with lock:
            completed.append(run.run_id)
            while len(completed) > max_kept_logs:
                evicted = runs[completed.pop(0)]
                evicted.log = None
                evicted.evicted = True

    @app.post("/runs", status_code=202)
    def post_run(body: RunCreate):
        with lock:
            current: Model = state["model"]
            if body.scenario not in current.scenarios:
                raise NotFoundError(f"no scenario {body.scenario!r} attached to the model")
            spec: scenario.ScenarioSpec = current.scenarios[body.scenario]
            if body.seed is not None:
                spec = replace(spec, seed=body.seed)
            if body.duration is not None:
                spec = replace(spec, duration=body.duration)
            snapshot = copy.deepcopy(current)
            run = _Run(f"run-{next(run_ids)}", body.scenario, spec.seed)
            runs[run.run_id] = run
        executor.submit(execute, run, snapshot, spec)
        return run.handle()

    def _find_run(run_id: str) -> _Run:
        run = runs.get(run_id)
        if run is None:
            raise NotFoundError(f"no run {run_id!r}")
        return run

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        return _find_run(run_id).handle()

    @app.get("/runs/{run_id}/summary")
    def get_run_summary(run_id: str):
        run = _find_run(run_id)
        gone = _gone_or_pending(run)
        if gone:
            return gone
        summary = scenario.summarize(run.log)
        body = asdict(summary)
        return body

    @app.get("/runs/{run_id}/log")
    def get_run_log(run_id: str, format: str = Query(default="jsonl")):
        run = _find_run(run_id)
        gone = _gone_or_pending(run)
        if gone:
            return gone
        text = persistence.log_to_text(run.log, format)
        media = "text/csv" if format == "csv" else "application/x-ndjson"
        return PlainTextResponse(text, media_type=media)

    def _gone_or_pending(run: _Run):
        if run.evicted:
            return JSONResponse(
                status_code=410,
                content={"error": "gone", "detail": f"log of {run.run_id} was evicted"},
            )
        if run.log is None:
            return JSONResponse(
                status_code=409,
                content={"error": "conflict", "detail": f"run {run.run_id} is {run.status}"},
            )
        return None

    return app


def _object_json(obj: ModelObject) -> dict:
    return {
        "id": obj.id,
        "name": obj.name,
        "kind": obj.kind.value,
        "parent": obj.parent,
        "interfaces": [{"id": i.id, "name": i.name} for i in obj.interfaces],
    }
