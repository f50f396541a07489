"""Exceptions and the non-fatal diagnostic record."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

Severity = Literal["info", "warning", "error"]


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.code}: {self.message}"


def report(sink: list[Diagnostic] | None, severity: Severity, code: str, message: str) -> None:
    if sink is not None:
        sink.append(Diagnostic(severity, code, message))


class SheetDiagramError(Exception):
    """Base class for fatal extraction errors."""


class PackageError(SheetDiagramError):
    pass


class NotAZipError(PackageError):
    pass


class MissingContentTypesError(PackageError):
    pass


class MalformedXmlError(SheetDiagramError):
    pass


class InvalidManifestError(SheetDiagramError):
    pass


class UnsupportedFormatError(SheetDiagramError, ValueError):
    pass


class MissingEntityBlockError(SheetDiagramError):
    pass
