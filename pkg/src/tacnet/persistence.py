"""XML save/load for models with embedded scenarios, and log export.

The on-disk document (root element ``tnm-model``, format-version 1) nests
``object`` elements to mirror the hierarchy, lists connections flat, and
embeds one ``scenario`` element per attached scenario.  Serialization is
deterministic: element order is creation order and saving the same model
twice yields identical bytes.  The schema is documented in
docs/model-schema.xsd; log formats in docs/log-formats.md.
"""
from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from typing import Iterable, TextIO

from .errors import IntegrityError, InvalidArgumentError, ParseError
from .model import Model, ModelObject, ObjectKind, ROOT_ID
from .scenario import (
    LogRecord,
    MessageTaskSpec,
    RecordKind,
    ResourceSpec,
    ScenarioSpec,
    ServiceKind,
    ServiceSpec,
    SimLog,
)

FORMAT_VERSION = "1"

LOG_FIELDS = ("time", "kind", "message_id", "task_label", "object", "hop_index", "detail")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# -- save ---------------------------------------------------------------------


def save(model: Model, scenarios: Iterable[ScenarioSpec] | None = None) -> bytes:
    """Serialize the model and its scenarios; byte-deterministic."""
    if scenarios is None:
        scenarios = list(model.scenarios.values())
    root = ET.Element("tnm-model", {"name": model.name, "format-version": FORMAT_VERSION})
    for child_id in model.root.children:
        _save_object(model, model.objects[child_id], root)
    connections = ET.SubElement(root, "connections")
    for conn in model.connections.values():
        ET.SubElement(
            connections,
            "connection",
            {"id": conn.id, "a-interface": conn.endpoint_a, "b-interface": conn.endpoint_b},
        )
    for spec in scenarios:
        _save_scenario(spec, root)
    tree = ET.ElementTree(root)
    ET.indent(tree, space="  ")
    buffer = io.BytesIO()
    tree.write(buffer, encoding="utf-8", xml_declaration=True)
    buffer.write(b"\n")
    return buffer.getvalue()


def _save_object(model: Model, obj: ModelObject, parent_elem: ET.Element) -> None:
    elem = ET.SubElement(
        parent_elem, "object", {"id": obj.id, "kind": obj.kind.value, "name": obj.name}
    )
    for iface in obj.interfaces:
        ET.SubElement(elem, "interface", {"id": iface.id, "name": iface.name})
    for child_id in obj.children:
        _save_object(model, model.objects[child_id], elem)


def _save_scenario(spec: ScenarioSpec, root: ET.Element) -> None:
    elem = ET.SubElement(
        root,
        "scenario",
        {"name": spec.name, "duration": _fmt(spec.duration), "seed": str(spec.seed)},
    )
    for res in spec.resources:
        ET.SubElement(
            elem,
            "resource",
            {"object": res.object, "capacity": str(res.capacity), "delay": _fmt(res.delay)},
        )
    for task in spec.tasks:
        ET.SubElement(
            elem,
            "task",
            {
                "source": task.source,
                "destination": task.destination,
                "label": task.label,
                "start": _fmt(task.start),
                "repeats": str(task.repeats),
                "interval-mean": _fmt(task.interval_mean),
                "interval-sigma": _fmt(task.interval_sigma),
                "routed": _fmt(task.routed),
                "request-ack": _fmt(task.request_ack),
            },
        )
    for svc in spec.services:
        ET.SubElement(
            elem,
            "service",
            {
                "object": svc.object,
                "kind": svc.kind.value,
                "per-message-delay": _fmt(svc.per_message_delay),
            },
        )


# -- load ---------------------------------------------------------------------


def load(data: bytes | str) -> tuple[Model, dict[str, ScenarioSpec]]:
    """Rebuild a model (ids preserved) and its scenarios from document bytes.

    Schema problems raise ParseError with element diagnostics; documents that
    parse but whose references or connection rules do not hold raise
    IntegrityError.  Every model invariant is re-validated, never trusted.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, column = exc.position
        raise ParseError(f"malformed XML at line {line}, column {column}: {exc.msg}") from None
    if root.tag != "tnm-model":
        raise ParseError(f"expected root element 'tnm-model', found {root.tag!r}")
    version = root.get("format-version")
    if version != FORMAT_VERSION:
        raise ParseError(
            f"unsupported format-version {version!r} (this build reads version {FORMAT_VERSION})"
        )
    name = _require_attr(root, "name", "tnm-model")
    try:
        model = Model(name)
    except InvalidArgumentError as exc:
        raise ParseError(f"tnm-model: {exc}") from None

    scenarios: dict[str, ScenarioSpec] = {}
    seen_connections = False
    for index, child in enumerate(root):
        where = f"tnm-model/{child.tag}[{index}]"
        if child.tag == "object":
            _load_object(model, child, ROOT_ID, where)
        elif child.tag == "connections":
            if seen_connections:
                raise ParseError(f"{where}: repeated connections section")
            seen_connections = True
            _load_connections(model, child, where)
        elif child.tag == "scenario":
            spec = _load_scenario(child, where)
            if spec.name in scenarios:
                raise IntegrityError(f"duplicate scenario name {spec.name!r}")
            scenarios[spec.name] = spec
        else:
            raise ParseError(f"{where}: unknown element {child.tag!r}")

    model.validate()
    _check_scenario_refs(model, scenarios.values())
    model.scenarios.update(scenarios)
    return model, scenarios


def _load_object(model: Model, elem: ET.Element, parent_id: str, where: str) -> None:
    object_id = _require_attr(elem, "id", where)
    kind_text = _require_attr(elem, "kind", where)
    name = _require_attr(elem, "name", where)
    try:
        kind = ObjectKind(kind_text)
    except ValueError:
        raise ParseError(f"{where}: unknown object kind {kind_text!r}") from None
    obj = model.restore_object(object_id, kind, name, parent_id)
    for index, child in enumerate(elem):
        child_where = f"{where}/{child.tag}[{index}]"
        if child.tag == "interface":
            iface_id = _require_attr(child, "id", child_where)
            iface_name = _require_attr(child, "name", child_where)
            model.restore_interface(obj.id, iface_id, iface_name)
        elif child.tag == "object":
            _load_object(model, child, obj.id, child_where)
        else:
            raise ParseError(f"{child_where}: unknown element {child.tag!r}")


def _load_connections(model: Model, elem: ET.Element, where: str) -> None:
    for index, child in enumerate(elem):
        child_where = f"{where}/connection[{index}]"
        if child.tag != "connection":
            raise ParseError(f"{where}: unknown element {child.tag!r}")
        model.restore_connection(
            _require_attr(child, "id", child_where),
            _require_attr(child, "a-interface", child_where),
            _require_attr(child, "b-interface", child_where),
        )


def _load_scenario(elem: ET.Element, where: str) -> ScenarioSpec:
    spec = ScenarioSpec(
        name=_require_attr(elem, "name", where),
        duration=_float_attr(elem, "duration", where),
        seed=_int_attr(elem, "seed", where),
    )
    for index, child in enumerate(elem):
        child_where = f"{where}/{child.tag}[{index}]"
        if child.tag == "resource":
            spec.resources.append(
                ResourceSpec(
                    object=_require_attr(child, "object", child_where),
                    capacity=_int_attr(child, "capacity", child_where),
                    delay=_float_attr(child, "delay", child_where),
                )
            )
        elif child.tag == "task":
            spec.tasks.append(
                MessageTaskSpec(
                    source=_require_attr(child, "source", child_where),
                    destination=_require_attr(child, "destination", child_where),
                    label=_require_attr(child, "label", child_where),
                    start=_float_attr(child, "start", child_where),
                    repeats=_int_attr(child, "repeats", child_where),
                    interval_mean=_float_attr(child, "interval-mean", child_where),
                    interval_sigma=_float_attr(child, "interval-sigma", child_where),
                    routed=_bool_attr(child, "routed", child_where),
                    request_ack=_bool_attr(child, "request-ack", child_where),
                )
            )
        elif child.tag == "service":
            kind_text = _require_attr(child, "kind", child_where)
            try:
                kind = ServiceKind(kind_text)
            except ValueError:
                raise ParseError(f"{child_where}: unknown service kind {kind_text!r}") from None
            spec.services.append(
                ServiceSpec(
                    object=_require_attr(child, "object", child_where),
                    per_message_delay=_float_attr(child, "per-message-delay", child_where),
                    kind=kind,
                )
            )
        else:
            raise ParseError(f"{child_where}: unknown element {child.tag!r}")
    return spec


def _check_scenario_refs(model: Model, scenarios: Iterable[ScenarioSpec]) -> None:
    problems = []
    for spec in scenarios:
        refs = [res.object for res in spec.resources]
        refs += [svc.object for svc in spec.services]
        refs += [t.source for t in spec.tasks] + [t.destination for t in spec.tasks]
        for ref in refs:
            if ref not in model.objects:
                problems.append(f"scenario {spec.name!r} references unknown object {ref!r}")
    if problems:
        raise IntegrityError(*problems)


def _require_attr(elem: ET.Element, attr: str, where: str) -> str:
    value = elem.get(attr)
    if value is None:
        raise ParseError(f"{where}: missing attribute {attr!r}")
    return value


def _float_attr(elem: ET.Element, attr: str, where: str) -> float:
    raw = _require_attr(elem, attr, where)
    try:
        return float(raw)
    except ValueError:
        raise ParseError(f"{where}: attribute {attr!r} is not a number: {raw!r}") from None


def _int_attr(elem: ET.Element, attr: str, where: str) -> int:
    raw = _require_attr(elem, attr, where)
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{where}: attribute {attr!r} is not an integer: {raw!r}") from None


def _bool_attr(elem: ET.Element, attr: str, where: str) -> bool:
    raw = _require_attr(elem, attr, where)
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ParseError(f"{where}: attribute {attr!r} must be 'true' or 'false': {raw!r}")


# -- log export -----------------------------------------------------------------


def log_to_text(log: SimLog, format: str) -> str:
    """Render the log as CSV (header + one row per record) or JSON lines
    (one object per record); field order is documented in docs/log-formats.md."""
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(LOG_FIELDS)
        for rec in log.records:
            writer.writerow(
                [
                    repr(rec.time),
                    rec.kind.value,
                    rec.message_id,
                    rec.task_label,
                    rec.object,
                    "" if rec.hop_index is None else rec.hop_index,
                    rec.detail,
                ]
            )
        return buffer.getvalue()
    if format == "jsonl":
        lines = []
        for rec in log.records:
            lines.append(
                json.dumps(
                    {
                        "time": rec.time,
                        "kind": rec.kind.value,
                        "message_id": rec.message_id,
                        "task_label": rec.task_label,
                        "object": rec.object,
                        "hop_index": rec.hop_index,
                        "detail": rec.detail,
                    },
                    separators=(",", ":"),
                )
            )
        return "".join(line + "\n" for line in lines)
    raise InvalidArgumentError(f"unknown log format {format!r} (use 'csv' or 'jsonl')")


def export_log(log: SimLog, format: str, sink: str | TextIO) -> None:
    """Write the rendered log to a path or open text file.

    Sink write failures surface as the interpreter's OSError (io-error).
    """
    text = log_to_text(log, format)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _parse_record(fields: dict) -> LogRecord:
    return LogRecord(
        time=float(fields["time"]),
        kind=RecordKind(fields["kind"]),
        message_id=int(fields["message_id"]),
        task_label=fields["task_label"],
        object=fields["object"],
        hop_index=None if fields["hop_index"] in ("", None) else int(fields["hop_index"]),
        detail=fields["detail"],
    )


def read_log_csv(source: str | TextIO) -> list[LogRecord]:
    if hasattr(source, "read"):
        rows = list(csv.DictReader(source))
    else:
        with open(source, "r", encoding="utf-8", newline="") as handle:
            rows = list(csv.DictReader(handle))
    return [_parse_record(row) for row in rows]


def read_log_jsonl(source: str | TextIO) -> list[LogRecord]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as handle:
            text = handle.read()
    return [_parse_record(json.loads(line)) for line in text.splitlines() if line]
