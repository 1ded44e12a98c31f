"""Hierarchical tactical-network modelling and traffic simulation toolkit."""

from .errors import (
    CausalityError,
    ConflictError,
    DuplicateNameError,
    IllegalConnectionError,
    IllegalParentError,
    IntegrityError,
    InvalidArgumentError,
    LoopError,
    NotFoundError,
    ParseError,
    ProtocolError,
    TacnetError,
)
from .graph import (
    Arc,
    ConnectionGraph,
    Path,
    TreeNode,
    all_paths,
    build_connection_graph,
    hierarchy_tree,
    shortest_path,
    to_dot,
)
from .model import (
    DEFAULT_INTERFACE,
    ROOT_ID,
    Connection,
    Interface,
    Model,
    ModelObject,
    ObjectKind,
)
from .scenario import (
    BoundScenario,
    LogRecord,
    MessageTaskSpec,
    RecordKind,
    ResourceSpec,
    RunSummary,
    ScenarioSpec,
    ServiceKind,
    ServiceSpec,
    SimLog,
    attach_scenario,
    bind,
    delivery_times,
    replace_resource,
    run,
    summarize,
)
from .persistence import export_log, load, log_to_text, read_log_csv, read_log_jsonl, save

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "BoundScenario",
    "CausalityError",
    "ConflictError",
    "Connection",
    "ConnectionGraph",
    "DEFAULT_INTERFACE",
    "DuplicateNameError",
    "IllegalConnectionError",
    "IllegalParentError",
    "IntegrityError",
    "Interface",
    "InvalidArgumentError",
    "LogRecord",
    "LoopError",
    "MessageTaskSpec",
    "Model",
    "ModelObject",
    "NotFoundError",
    "ObjectKind",
    "ParseError",
    "Path",
    "ProtocolError",
    "RecordKind",
    "ResourceSpec",
    "ROOT_ID",
    "RunSummary",
    "ScenarioSpec",
    "ServiceKind",
    "ServiceSpec",
    "SimLog",
    "TacnetError",
    "TreeNode",
    "all_paths",
    "attach_scenario",
    "bind",
    "build_connection_graph",
    "delivery_times",
    "export_log",
    "hierarchy_tree",
    "load",
    "log_to_text",
    "read_log_csv",
    "read_log_jsonl",
    "replace_resource",
    "run",
    "save",
    "shortest_path",
    "summarize",
    "to_dot",
]
