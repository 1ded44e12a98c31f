"""Exception hierarchy shared by the model, simulation and persistence layers.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP service can surface the violated rule by name.
"""


class TacnetError(Exception):
    """Base class for all domain errors."""

    code = "error"


class InvalidArgumentError(TacnetError):
    code = "invalid-argument"


class NotFoundError(TacnetError):
    code = "not-found"


class IllegalParentError(TacnetError):
    """Raised when a child is added under a plain network or area-network node."""

    code = "illegal-parent"


class DuplicateNameError(TacnetError):
    code = "duplicate-name"


class LoopError(TacnetError):
    """Both connection endpoints belong to the same object."""

    code = "loop-forbidden"


class IllegalConnectionError(TacnetError):
    """Connection violates the sibling / parent-child / area-network rule."""

    code = "illegal-connection"


class ConflictError(TacnetError):
    code = "conflict"


class CausalityError(TacnetError):
    """An event was scheduled in the simulated past."""

    code = "causality-violation"


class ProtocolError(TacnetError):
    """A simulation process misused a resource (e.g. release without hold)."""

    code = "protocol-violation"


class ParseError(TacnetError):
    """Malformed document; the message carries line/element diagnostics."""

    code = "parse-error"


class IntegrityError(TacnetError):
    """Structurally well-formed document whose references or rules do not hold."""

    code = "integrity-error"

    def __init__(self, *problems: str):
        self.problems = list(problems)
        super().__init__("; ".join(problems))
