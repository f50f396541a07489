"""Read-only access to an ``.xlsx`` file as an OPC (zip) package.

Only the parts needed for drawing extraction are located: the workbook, its
worksheets in workbook order, the drawing part of each worksheet and the theme.
"""

from __future__ import annotations

import io
import posixpath
import zipfile
from dataclasses import dataclass, field
from os import PathLike
from types import MappingProxyType
from typing import Literal, Mapping
from urllib.parse import unquote
from xml.etree import ElementTree as ET

from .errors import (
    Diagnostic,
    MalformedXmlError,
    MissingContentTypesError,
    NotAZipError,
    report,
)

CONTENT_TYPES = "[Content_Types].xml"

REL_OFFICE_DOCUMENT = "officeDocument"
REL_WORKSHEET = "worksheet"
REL_DRAWING = "drawing"
REL_THEME = "theme"

ZIP_MAGIC = (b"PK\x03\x04", b"PK\x05\x06")

PartKind = Literal["workbook", "worksheet", "drawing", "theme", "rels", "other"]


@dataclass(frozen=True)
class PartRef:
    """A part inside the package.

    ``owner`` names the worksheet part a drawing belongs to and ``sheet_name``
    the worksheet's display name; both are ``None`` for other kinds.
    """

    path: str
    kind: PartKind
    owner: str | None = None
    sheet_name: str | None = None


@dataclass(frozen=True)
class Relationship:
    rel_id: str
    rel_type: str
    target: str
    external: bool = False

    @property
    def short_type(self) -> str:
        return self.rel_type.rsplit("/", 1)[-1]


@dataclass(frozen=True)
class PackageHandle:
    """Immutable in-memory view of every zip entry of a package."""

    source: str
    parts: Mapping[str, bytes]
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    @property
    def part_names(self) -> list[str]:
        return sorted(self.parts)

    def has_part(self, path: str) -> bool:
        return normalize_part_path(path) in self.parts

    def read(self, path: str) -> bytes:
        return self.parts[normalize_part_path(path)]


def normalize_part_path(path: str) -> str:
    """Canonical zip-internal form: ``/`` separators, no leading slash, no dot segments.

    ``..`` segments that would climb above the package root are discarded.
    """
    segments: list[str] = []
    for seg in path.replace("\\", "/").split("/"):
        if seg in ("", "."):
            continue
        if seg == "..":
            if segments:
                segments.pop()
            continue
        segments.append(seg)
    return "/".join(segments)


def rels_path_for(part: str) -> str:
    """``xl/worksheets/sheet1.xml`` -> ``xl/worksheets/_rels/sheet1.xml.rels``."""
    part = normalize_part_path(part)
    directory, name = posixpath.split(part)
    return normalize_part_path(posixpath.join(directory, "_rels", name + ".rels"))


def resolve_target(source_part: str, target: str) -> str:
    """Resolve a relationship target against the part that owns the relationship.

    Relative targets are taken from the directory of ``source_part``; targets
    starting with ``/`` are package-absolute. ``source_part`` of ``""`` denotes
    the package root (``_rels/.rels``).
    """
    target = unquote(target)
    if target.startswith("/"):
        return normalize_part_path(target)
    base = posixpath.dirname(normalize_part_path(source_part))
    return normalize_part_path(f"{base}/{target}" if base else target)


def open_package(
    path: str | PathLike[str] | bytes, diagnostics: list[Diagnostic] | None = None
) -> PackageHandle:
    """Open a package from a filesystem path or raw bytes.

    Raises:
        NotAZipError: the content does not start with a zip signature.
        MissingContentTypesError: no ``[Content_Types].xml`` entry.
        OSError: the file cannot be read.
    """
    if isinstance(path, (bytes, bytearray)):
        data = bytes(path)
        source = "<bytes>"
    else:
        with open(path, "rb") as fh:
            data = fh.read()
        source = str(path)

    if not data.startswith(ZIP_MAGIC):
        raise NotAZipError(f"{source}: not a zip archive")

    local: list[Diagnostic] = []
    parts: dict[str, bytes] = {}
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            for info in zf.infolist():
                if info.is_dir():
                    continue
                name = normalize_part_path(info.filename)
                if name in parts:
                    report(local, "warning", "DuplicateZipEntry", f"duplicate entry {name!r}; last one wins")
                parts[name] = zf.open(info).read()
    except zipfile.BadZipFile as exc:
        raise NotAZipError(f"{source}: {exc}") from exc

    if CONTENT_TYPES not in parts:
        raise MissingContentTypesError(f"{source}: missing {CONTENT_TYPES}")

    if diagnostics is not None:
        diagnostics.extend(local)
    return PackageHandle(source=source, parts=MappingProxyType(parts), diagnostics=tuple(local))


def _parse_xml(data: bytes, where: str) -> ET.Element:
    try:
        return ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"{where}: {exc}") from exc


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def read_relationships(pkg: PackageHandle, source_part: str) -> list[Relationship]:
    """Relationships declared by ``source_part`` in document order (empty if no rels part)."""
    rels_part = "_rels/.rels" if source_part == "" else rels_path_for(source_part)
    if rels_part not in pkg.parts:
        return []
    root = _parse_xml(pkg.parts[rels_part], rels_part)
    rels = []
    for el in root:
        if _local(el.tag) != "Relationship":
            continue
        rels.append(
            Relationship(
                rel_id=el.get("Id", ""),
                rel_type=el.get("Type", ""),
                target=el.get("Target", ""),
                external=el.get("TargetMode") == "External",
            )
        )
    return rels


def _targets(
    pkg: PackageHandle,
    source_part: str,
    short_type: str,
    diagnostics: list[Diagnostic] | None,
) -> list[str]:
    found = []
    for rel in read_relationships(pkg, source_part):
        if rel.external or rel.short_type != short_type:
            continue
        target = resolve_target(source_part, rel.target)
        if target not in pkg.parts:
            report(
                diagnostics,
                "warning",
                "DanglingRelationship",
                f"{source_part or '/'} {rel.rel_id} -> {target} does not exist",
            )
            continue
        found.append(target)
    return found


def workbook_part(pkg: PackageHandle, diagnostics: list[Diagnostic] | None = None) -> str | None:
    targets = _targets(pkg, "", REL_OFFICE_DOCUMENT, diagnostics)
    if targets:
        return targets[0]
    if "xl/workbook.xml" in pkg.parts:
        return "xl/workbook.xml"
    return None


def resolve_worksheets(
    pkg: PackageHandle, diagnostics: list[Diagnostic] | None = None
) -> list[PartRef]:
    """Worksheet parts in workbook (tab) order."""
    wb = workbook_part(pkg, diagnostics)
    if wb is None:
        return []
    by_id = {
        rel.rel_id: rel
        for rel in read_relationships(pkg, wb)
        if rel.short_type == REL_WORKSHEET and not rel.external
    }
    root = _parse_xml(pkg.parts[wb], wb)
    sheets = []
    for el in root.iter():
        if _local(el.tag) != "sheet":
            continue
        rid = next((v for k, v in el.attrib.items() if _local(k) == "id"), None)
        rel = by_id.get(rid or "")
        if rel is None:
            # chartsheets and dialog sheets land here as well
            continue
        target = resolve_target(wb, rel.target)
        if target not in pkg.parts:
            report(diagnostics, "warning", "DanglingRelationship", f"{wb} {rid} -> {target} does not exist")
            continue
        sheets.append(PartRef(target, "worksheet", sheet_name=el.get("name", posixpath.basename(target))))
    return sheets


def resolve_drawing_parts(
    pkg: PackageHandle, diagnostics: list[Diagnostic] | None = None
) -> list[PartRef]:
    """Drawing parts of every worksheet, in worksheet order.

    Relationships pointing at absent parts are skipped with a
    ``DanglingRelationship`` diagnostic.
    """
    drawings = []
    for sheet in resolve_worksheets(pkg, diagnostics):
        for target in _targets(pkg, sheet.path, REL_DRAWING, diagnostics):
            drawings.append(PartRef(target, "drawing", owner=sheet.path, sheet_name=sheet.sheet_name))
    return drawings


def resolve_theme_part(
    pkg: PackageHandle, diagnostics: list[Diagnostic] | None = None
) -> PartRef | None:
    """The workbook theme; the first one by relationship order when several exist."""
    wb = workbook_part(pkg, diagnostics)
    if wb is None:
        return None
    themes = _targets(pkg, wb, REL_THEME, diagnostics)
    return PartRef(themes[0], "theme") if themes else None


def classify_part(path: str) -> PartKind:
    path = normalize_part_path(path)
    if path.endswith(".rels"):
        return "rels"
    if path.startswith("xl/worksheets/"):
        return "worksheet"
    if path.startswith("xl/drawings/") and path.endswith(".xml"):
        return "drawing"
    if path.startswith("xl/theme/"):
        return "theme"
    if path.endswith("workbook.xml"):
        return "workbook"
    return "other"
