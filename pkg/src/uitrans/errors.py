"""Exception types shared across the pipeline."""

from __future__ import annotations


class UITransError(Exception):
    """Base class for all errors raised by uitrans."""


class MalformedXml(UITransError):
    def __init__(self, message: str, file: str | None = None, line: int | None = None, column: int | None = None):
        self.file = file
        self.line = line
        self.column = column
        where = file or "<string>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


class MissingPackage(UITransError):
    pass


class EmptyLayout(UITransError):
    pass


class ManifestNotFound(UITransError):
    pass


class CyclicInclude(UITransError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cyclic include: " + " -> ".join(cycle))


class SchemaViolation(UITransError):
    def __init__(self, path: str, field: str, message: str):
        self.path = path
        self.field = field
        super().__init__(f"{path}: {field}: {message}")


class DuplicateEntry(UITransError):
    pass


class BackendError(UITransError):
    def __init__(self, message: str, status: int | None = None, body: str = ""):
        self.status = status
        self.body = body
        super().__init__(message)


class BackendUnavailable(BackendError):
    pass


class PayloadIncomplete(UITransError):
    def __init__(self, role: str, field: str):
        self.role = role
        self.field = field
        super().__init__(f"payload for role {role!r} is missing field {field!r}")


class MissingUnit(UITransError):
    def __init__(self, unit_id: str):
        self.unit_id = unit_id
        super().__init__(f"slot references missing unit {unit_id}")


class EmptyReference(UITransError):
    pass


class EmptyRecordSet(UITransError):
    pass


class ConfigError(UITransError):
    pass
