"""Parse spreadsheet drawing parts (``xl/drawings/drawingN.xml``) into raw objects.

Nothing here is transformed: offsets stay in EMU, rotations in 1/60000 degree
units and colors as unresolved specs. Elements are matched by local name so
producers that use unusual prefixes still parse; unexpected namespaces are
reported as diagnostics.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Literal, Union
from xml.etree import ElementTree as ET

from .errors import Diagnostic, MalformedXmlError, report
from .units import normalize_rotation

NS_XDR = "http://schemas.openxmlformats.org/drawingml/2006/spreadsheetDrawing"
NS_A = "http://schemas.openxmlformats.org/drawingml/2006/main"
NS_MC = "http://schemas.openxmlformats.org/markup-compatibility/2006"
# ISO/IEC 29500 strict variants
NS_XDR_STRICT = "http://purl.oclc.org/ooxml/drawingml/spreadsheetDrawing"
NS_A_STRICT = "http://purl.oclc.org/ooxml/drawingml/main"

EXPECTED_NS = {NS_XDR, NS_A, NS_XDR_STRICT, NS_A_STRICT, NS_MC}

ANCHOR_KINDS = {"twoCellAnchor": "twoCell", "oneCellAnchor": "oneCell", "absoluteAnchor": "absolute"}
SKIPPED_BODIES = {"pic", "graphicFrame", "contentPart"}
COLOR_TRANSFORMS = ("tint", "shade", "lumMod", "lumOff", "alpha", "satMod")


@dataclass(frozen=True)
class CellMarker:
    col: int
    row: int
    col_off: int = 0
    row_off: int = 0


@dataclass(frozen=True)
class AnchorSpec:
    kind: Literal["twoCell", "oneCell", "absolute"]
    from_cell: CellMarker | None = None
    to_cell: CellMarker | None = None
    ext: tuple[int, int] | None = None
    pos: tuple[int, int] | None = None


@dataclass(frozen=True)
class XfrmSpec:
    off: tuple[int, int] | None = None
    ext: tuple[int, int] | None = None
    rot: int = 0
    flip_h: bool = False
    flip_v: bool = False
    ch_off: tuple[int, int] | None = None
    ch_ext: tuple[int, int] | None = None


@dataclass(frozen=True)
class ColorSpec:
    """An unresolved color.

    ``kind="other"`` stands for gradient, pattern and picture fills, which are
    not resolved to a single color.
    """

    kind: Literal["srgb", "scheme", "system", "none", "other"]
    value: str = ""
    transforms: tuple[tuple[str, int], ...] = ()
    last_color: str | None = None


NO_COLOR = ColorSpec("none")


@dataclass(frozen=True)
class LineSpec:
    color: ColorSpec | None = None
    width: int | None = None
    dash: str | None = None
    head_arrow: bool = False
    tail_arrow: bool = False


@dataclass(frozen=True)
class StyleRefs:
    """Theme colors referenced from ``xdr:style`` (``lnRef``/``fillRef``)."""

    line: ColorSpec | None = None
    fill: ColorSpec | None = None


@dataclass(frozen=True)
class RawShape:
    preset: str | None
    is_text_box: bool = False
    xfrm: XfrmSpec | None = None
    fill: ColorSpec | None = None
    line: LineSpec | None = None
    text: str | None = None
    style: StyleRefs = field(default_factory=StyleRefs)
    name: str = ""


@dataclass(frozen=True)
class RawConnector:
    preset: str
    xfrm: XfrmSpec
    adjustments: tuple[tuple[str, int], ...] = ()
    line: LineSpec | None = None
    head_arrow: bool = False
    tail_arrow: bool = False
    style: StyleRefs = field(default_factory=StyleRefs)
    name: str = ""


@dataclass(frozen=True)
class RawGroup:
    xfrm: XfrmSpec
    children: tuple["RawBody", ...] = ()
    name: str = ""


RawBody = Union[RawShape, RawConnector, RawGroup]


@dataclass(frozen=True)
class RawAnchoredObject:
    anchor: AnchorSpec
    body: RawBody
    doc_order: int


class ObjectKind(str, enum.Enum):
    RECTANGLE = "rectangle"
    ROUND_RECTANGLE = "roundRectangle"
    TEXT_BOX = "textBox"
    STRAIGHT_CONNECTOR = "straightConnector"
    BENT_CONNECTOR = "bentConnector"
    UNSUPPORTED = "unsupported"


STRAIGHT_PRESETS = {"straightConnector1", "line"}
BENT_PRESETS = {"bentConnector2", "bentConnector3", "bentConnector4", "bentConnector5"}


def classify_object(raw: RawShape | RawConnector) -> ObjectKind:
    """Map a parsed body onto one of the supported diagram object kinds.

    The text-box flag takes precedence over the preset geometry for shapes.
    """
    if isinstance(raw, RawShape):
        if raw.is_text_box:
            return ObjectKind.TEXT_BOX
        if raw.preset == "rect":
            return ObjectKind.RECTANGLE
        if raw.preset == "roundRect":
            return ObjectKind.ROUND_RECTANGLE
        if raw.preset in STRAIGHT_PRESETS:
            # a plain line drawn as a shape behaves like a straight connector
            return ObjectKind.STRAIGHT_CONNECTOR
        return ObjectKind.UNSUPPORTED
    if isinstance(raw, RawConnector):
        if raw.preset in STRAIGHT_PRESETS:
            return ObjectKind.STRAIGHT_CONNECTOR
        if raw.preset in BENT_PRESETS:
            return ObjectKind.BENT_CONNECTOR
    return ObjectKind.UNSUPPORTED


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _ns(tag: str) -> str:
    return tag[1:].split("}", 1)[0] if tag.startswith("{") else ""


def _child(el: ET.Element | None, name: str) -> ET.Element | None:
    if el is None:
        return None
    for c in el:
        if _local(c.tag) == name:
            return c
    return None


def _children(el: ET.Element | None, name: str) -> list[ET.Element]:
    if el is None:
        return []
    return [c for c in el if _local(c.tag) == name]


def _int(el: ET.Element | None, attr: str, default: int = 0) -> int:
    if el is None:
        return default
    raw = el.get(attr)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return int(float(raw))


def _bool(el: ET.Element | None, attr: str) -> bool:
    return el is not None and el.get(attr, "0").lower() in ("1", "true")


def _pair(el: ET.Element | None, a: str, b: str) -> tuple[int, int] | None:
    if el is None:
        return None
    return _int(el, a), _int(el, b)


def _text_of(el: ET.Element | None) -> str:
    return (el.text or "").strip() if el is not None else ""


def _marker(el: ET.Element | None) -> CellMarker | None:
    if el is None:
        return None

    def num(name: str) -> int:
        try:
            return int(_text_of(_child(el, name)) or 0)
        except ValueError:
            return 0

    return CellMarker(
        col=max(num("col"), 0),
        row=max(num("row"), 0),
        col_off=max(num("colOff"), 0),
        row_off=max(num("rowOff"), 0),
    )


def parse_anchor(el: ET.Element) -> AnchorSpec:
    kind = ANCHOR_KINDS[_local(el.tag)]
    if kind == "twoCell":
        return AnchorSpec(kind, from_cell=_marker(_child(el, "from")), to_cell=_marker(_child(el, "to")))
    ext = _pair(_child(el, "ext"), "cx", "cy")
    if kind == "oneCell":
        return AnchorSpec(kind, from_cell=_marker(_child(el, "from")), ext=ext)
    return AnchorSpec(kind, pos=_pair(_child(el, "pos"), "x", "y"), ext=ext)


def parse_xfrm(el: ET.Element | None) -> XfrmSpec | None:
    if el is None:
        return None
    ext = _pair(_child(el, "ext"), "cx", "cy")
    ch_ext = _pair(_child(el, "chExt"), "cx", "cy")
    return XfrmSpec(
        off=_pair(_child(el, "off"), "x", "y"),
        ext=(max(ext[0], 0), max(ext[1], 0)) if ext else None,
        rot=normalize_rotation(_int(el, "rot")),
        flip_h=_bool(el, "flipH"),
        flip_v=_bool(el, "flipV"),
        ch_off=_pair(_child(el, "chOff"), "x", "y"),
        ch_ext=(max(ch_ext[0], 0), max(ch_ext[1], 0)) if ch_ext else None,
    )


def parse_color(el: ET.Element | None, diagnostics: list[Diagnostic] | None = None) -> ColorSpec | None:
    """Read the single color-choice child of ``el`` (``srgbClr``, ``schemeClr``, ...)."""
    if el is None:
        return None
    for c in el:
        name = _local(c.tag)
        if name not in ("srgbClr", "schemeClr", "sysClr", "prstClr", "scrgbClr", "hslClr"):
            continue
        transforms = []
        for t in c:
            op = _local(t.tag)
            if op in COLOR_TRANSFORMS:
                transforms.append((op, _int(t, "val")))
            else:
                report(diagnostics, "warning", "UnappliedColorTransform", f"color transform {op!r} is not applied")
        transforms = tuple(transforms)
        if name == "srgbClr":
            return ColorSpec("srgb", c.get("val", "000000").upper(), transforms)
        if name == "schemeClr":
            return ColorSpec("scheme", c.get("val", ""), transforms)
        if name == "sysClr":
            last = c.get("lastClr")
            return ColorSpec("system", c.get("val", ""), transforms, last.upper() if last else None)
        report(diagnostics, "warning", "UnsupportedColor", f"color element {name!r} is not supported")
        return ColorSpec("other", name)
    return None


def parse_fill(sp_pr: ET.Element | None, diagnostics: list[Diagnostic] | None = None) -> ColorSpec | None:
    """Explicit fill of a shape-properties element, ``None`` when it defers to the style."""
    if sp_pr is None:
        return None
    for c in sp_pr:
        name = _local(c.tag)
        if name == "noFill":
            return NO_COLOR
        if name == "solidFill":
            return parse_color(c, diagnostics) or NO_COLOR
        if name in ("gradFill", "pattFill", "blipFill", "grpFill"):
            return ColorSpec("other", name)
    return None


def parse_line(ln: ET.Element | None, diagnostics: list[Diagnostic] | None = None) -> LineSpec | None:
    if ln is None:
        return None
    color = parse_fill(ln, diagnostics)
    width = ln.get("w")
    dash = _child(ln, "prstDash")
    head = _child(ln, "headEnd")
    tail = _child(ln, "tailEnd")
    return LineSpec(
        color=color,
        width=max(int(width), 0) if width is not None else None,
        dash=dash.get("val") if dash is not None else None,
        head_arrow=head is not None and head.get("type", "none") != "none",
        tail_arrow=tail is not None and tail.get("type", "none") != "none",
    )


def parse_style(style: ET.Element | None, diagnostics: list[Diagnostic] | None = None) -> StyleRefs:
    if style is None:
        return StyleRefs()

    def ref(name: str) -> ColorSpec | None:
        el = _child(style, name)
        if el is None or el.get("idx", "0") == "0":
            # idx 0 means "no line" / "no fill" from the theme style matrix
            return None
        return parse_color(el, diagnostics)

    return StyleRefs(line=ref("lnRef"), fill=ref("fillRef"))


def extract_text(tx_body: ET.Element | None) -> str:
    """Plain text of a ``txBody``: runs concatenated, paragraphs joined by newlines."""
    if tx_body is None:
        return ""
    paragraphs = []
    for p in _children(tx_body, "p"):
        parts = []
        for r in p:
            name = _local(r.tag)
            if name in ("r", "fld"):
                t = _child(r, "t")
                parts.append(t.text or "" if t is not None else "")
            elif name == "br":
                parts.append("\n")
        paragraphs.append("".join(parts))
    return "\n".join(paragraphs)


def _preset(sp_pr: ET.Element | None) -> tuple[str | None, tuple[tuple[str, int], ...]]:
    geom = _child(sp_pr, "prstGeom")
    if geom is None:
        return None, ()
    adjustments = []
    for gd in _children(_child(geom, "avLst"), "gd"):
        fmla = gd.get("fmla", "")
        if fmla.startswith("val "):
            try:
                adjustments.append((gd.get("name", ""), int(fmla[4:].strip())))
            except ValueError:
                pass
    return geom.get("prst"), tuple(adjustments)


def _nv_name(nv: ET.Element | None) -> str:
    c_nv = _child(nv, "cNvPr")
    return c_nv.get("name", "") if c_nv is not None else ""


def _parse_shape(el: ET.Element, diagnostics: list[Diagnostic] | None) -> RawShape:
    nv = _child(el, "nvSpPr")
    sp_pr = _child(el, "spPr")
    preset, _ = _preset(sp_pr)
    tx_body = _child(el, "txBody")
    return RawShape(
        preset=preset,
        is_text_box=_bool(_child(nv, "cNvSpPr"), "txBox"),
        xfrm=parse_xfrm(_child(sp_pr, "xfrm")),
        fill=parse_fill(sp_pr, diagnostics),
        line=parse_line(_child(sp_pr, "ln"), diagnostics),
        text=extract_text(tx_body) if tx_body is not None else None,
        style=parse_style(_child(el, "style"), diagnostics),
        name=_nv_name(nv),
    )


def _parse_connector(el: ET.Element, diagnostics: list[Diagnostic] | None) -> RawConnector:
    sp_pr = _child(el, "spPr")
    preset, adjustments = _preset(sp_pr)
    line = parse_line(_child(sp_pr, "ln"), diagnostics)
    return RawConnector(
        preset=preset or "",
        xfrm=parse_xfrm(_child(sp_pr, "xfrm")) or XfrmSpec(),
        adjustments=adjustments,
        line=line,
        head_arrow=bool(line and line.head_arrow),
        tail_arrow=bool(line and line.tail_arrow),
        style=parse_style(_child(el, "style"), diagnostics),
        name=_nv_name(_child(el, "nvCxnSpPr")),
    )


def _parse_group(el: ET.Element, diagnostics: list[Diagnostic] | None) -> RawGroup:
    children = []
    for c in el:
        body = _parse_body(c, diagnostics, nested=True)
        if body is not None:
            children.append(body)
    return RawGroup(
        xfrm=parse_xfrm(_child(_child(el, "grpSpPr"), "xfrm")) or XfrmSpec(),
        children=tuple(children),
        name=_nv_name(_child(el, "nvGrpSpPr")),
    )


def _parse_body(el: ET.Element, diagnostics: list[Diagnostic] | None, nested: bool = False) -> RawBody | None:
    name = _local(el.tag)
    if name == "sp":
        return _parse_shape(el, diagnostics)
    if name == "cxnSp":
        return _parse_connector(el, diagnostics)
    if name == "grpSp":
        return _parse_group(el, diagnostics)
    if name == "AlternateContent":
        branch = _mc_branch(el)
        for c in branch if branch is not None else ():
            body = _parse_body(c, diagnostics, nested)
            if body is not None:
                return body
        return None
    if name in SKIPPED_BODIES:
        report(diagnostics, "info", "SkippedObject", f"{name} objects are not extracted")
        return None
    if nested and name in ("nvGrpSpPr", "grpSpPr"):
        return None
    if name not in ("from", "to", "pos", "ext", "clientData"):
        report(diagnostics, "info", "SkippedObject", f"unsupported drawing element {name!r}")
    return None


def _mc_branch(el: ET.Element) -> ET.Element | None:
    choice = _child(el, "Choice")
    return choice if choice is not None else _child(el, "Fallback")


def _check_namespaces(root: ET.Element, diagnostics: list[Diagnostic] | None) -> None:
    seen = set()
    for el in root.iter():
        ns = _ns(el.tag)
        if ns and ns not in EXPECTED_NS and ns not in seen:
            seen.add(ns)
            report(diagnostics, "warning", "UnexpectedNamespace", f"unexpected namespace {ns!r}")


def _anchors(root: ET.Element, diagnostics: list[Diagnostic] | None):
    for el in root:
        name = _local(el.tag)
        if name in ANCHOR_KINDS:
            yield el
        elif name == "AlternateContent":
            branch = _mc_branch(el)
            if branch is not None:
                yield from _anchors(branch, diagnostics)
        else:
            report(diagnostics, "warning", "UnknownAnchor", f"unknown anchor element {name!r} skipped")


def parse_drawing(xml_bytes: bytes, diagnostics: list[Diagnostic] | None = None) -> list[RawAnchoredObject]:
    """Parse every anchored object of a drawing part.

    Pictures, charts and other unsupported bodies are skipped with a
    diagnostic. ``doc_order`` numbers the returned objects 0..n-1.

    Raises:
        MalformedXmlError: the bytes are not well-formed XML.
    """
    try:
        root = ET.fromstring(xml_bytes)
    except ET.ParseError as exc:
        raise MalformedXmlError(f"drawing part: {exc}") from exc
    _check_namespaces(root, diagnostics)

    objects: list[RawAnchoredObject] = []
    for anchor_el in _anchors(root, diagnostics):
        anchor = parse_anchor(anchor_el)
        for c in anchor_el:
            body = _parse_body(c, diagnostics)
            if body is not None:
                objects.append(RawAnchoredObject(anchor, body, len(objects)))
                break
    return objects
