"""The canonical diagram: rendered-appearance shapes and connectors.

Shapes and connectors are numbered separately, each densely from 0 in drawing
document order (sheets in workbook order). Geometry is in points rounded to two
decimals and colors are resolved ``#RRGGBB[AA]`` strings. Group membership is
deliberately dropped; groups only contribute to geometry.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

from . import opc
from .colors import ThemePalette, effective_style_color, parse_theme, resolve_color
from .drawingml import (
    ColorSpec,
    ObjectKind,
    RawAnchoredObject,
    RawBody,
    RawConnector,
    RawGroup,
    RawShape,
    XfrmSpec,
    classify_object,
    parse_drawing,
)
from .errors import Diagnostic, report
from .geometry import (
    BBox,
    CardinalDirection,
    DegenerateGroupError,
    PtPoint,
    connector_path,
    endpoint_direction,
    flatten_group,
    rendered_bbox,
)
from .metrics import FrameEmu, SheetMetrics, parse_sheet_metrics, resolve_anchor
from .units import DEFAULT_MDW_PX

SCHEMA_VERSION = "1"
COLOR_RE = re.compile(r"^#[0-9A-F]{6}([0-9A-F]{2})?$")

ShapeKind = Literal["rectangle", "roundRectangle", "textBox"]
ConnectorKind = Literal["straight", "bent"]

SHAPE_KINDS = {
    ObjectKind.RECTANGLE: "rectangle",
    ObjectKind.ROUND_RECTANGLE: "roundRectangle",
    ObjectKind.TEXT_BOX: "textBox",
}


@dataclass(frozen=True)
class CanonicalShape:
    id: int
    kind: ShapeKind
    bbox: BBox
    fill_color: str | None
    border_color: str | None
    text: str | None
    sheet: str


@dataclass(frozen=True)
class CanonicalConnector:
    id: int
    kind: ConnectorKind
    start: PtPoint
    end: PtPoint
    bends: tuple[PtPoint, ...]
    start_direction: CardinalDirection
    end_direction: CardinalDirection
    line_color: str | None
    head_arrow: bool
    tail_arrow: bool
    sheet: str

    @property
    def points(self) -> tuple[PtPoint, ...]:
        return (self.start, *self.bends, self.end)


@dataclass(frozen=True)
class CanonicalDiagram:
    source_file: str
    shapes: tuple[CanonicalShape, ...] = ()
    connectors: tuple[CanonicalConnector, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = ()

    def shape(self, shape_id: int) -> CanonicalShape:
        return self.shapes[shape_id]

    def connector(self, connector_id: int) -> CanonicalConnector:
        return self.connectors[connector_id]


@dataclass(frozen=True)
class Violation:
    where: str
    message: str


def _r2(v: float) -> float:
    return round(v, 2) + 0.0


def _round_point(p: tuple[float, float]) -> PtPoint:
    return PtPoint(_r2(p[0]), _r2(p[1]))


def _passes_straight(a: PtPoint, b: PtPoint, c: PtPoint) -> bool:
    # b lies on the segment a-c and the path does not turn there
    ux, uy, vx, vy = b.x - a.x, b.y - a.y, c.x - b.x, c.y - b.y
    return ux * vy - uy * vx == 0 and ux * vx + uy * vy > 0


def _round_bbox(b: BBox) -> BBox:
    return BBox(_r2(b.left), _r2(b.right), _r2(b.top), _r2(b.bottom))


@dataclass
class _Builder:
    palette: ThemePalette
    diagnostics: list[Diagnostic] = field(default_factory=list)
    shapes: list[CanonicalShape] = field(default_factory=list)
    connectors: list[CanonicalConnector] = field(default_factory=list)

    def color(self, spec: ColorSpec, what: str) -> str | None:
        if spec.kind == "none":
            return None
        if spec.kind == "other":
            report(self.diagnostics, "info", "UnresolvedFill", f"{what}: {spec.value or 'non-solid'} fill reported as null")
            return None
        return resolve_color(spec, self.palette, self.diagnostics).to_hex()

    def add_object(self, obj: RawAnchoredObject, metrics: SheetMetrics, sheet: str) -> None:
        frame = resolve_anchor(metrics, obj.anchor, self.diagnostics)
        body = obj.body
        if isinstance(body, RawGroup):
            xfrm = body.xfrm
            placed = XfrmSpec(
                off=(frame.x, frame.y),
                ext=(frame.cx, frame.cy),
                rot=xfrm.rot,
                flip_h=xfrm.flip_h,
                flip_v=xfrm.flip_v,
                ch_off=xfrm.ch_off or xfrm.off or (0, 0),
                ch_ext=xfrm.ch_ext or xfrm.ext or (frame.cx, frame.cy),
            )
            self.add_group(body, [placed], sheet)
            return
        xfrm = body.xfrm or XfrmSpec()
        self.add_leaf(body, frame, xfrm, sheet)

    def add_group(self, group: RawGroup, parents: list[XfrmSpec], sheet: str) -> None:
        for child in group.children:
            if isinstance(child, RawGroup):
                self.add_group(child, [child.xfrm, *parents], sheet)
                continue
            xfrm = child.xfrm
            if xfrm is None or xfrm.off is None or xfrm.ext is None:
                report(self.diagnostics, "warning", "MissingXfrm", f"group child {child.name!r} has no frame; skipped")
                continue
            frame = FrameEmu(*xfrm.off, *xfrm.ext)
            rot, fh, fv = xfrm.rot, xfrm.flip_h, xfrm.flip_v
            try:
                for parent in parents:
                    frame, rot, fh, fv = flatten_group(parent, frame, rot, fh, fv)
            except DegenerateGroupError:
                report(self.diagnostics, "warning", "DegenerateGroup", f"group child {child.name!r} dropped: zero child extent")
                continue
            self.add_leaf(child, frame, XfrmSpec(rot=int(rot), flip_h=fh, flip_v=fv), sheet)

    def add_leaf(self, body: RawBody, frame: FrameEmu, xfrm: XfrmSpec, sheet: str) -> None:
        kind = classify_object(body)
        label = body.name or type(body).__name__
        if kind in SHAPE_KINDS:
            self.add_shape(body, kind, frame, xfrm, sheet)
        elif kind in (ObjectKind.STRAIGHT_CONNECTOR, ObjectKind.BENT_CONNECTOR):
            self.add_connector(body, kind, frame, xfrm, sheet)
        else:
            preset = getattr(body, "preset", None)
            report(self.diagnostics, "info", "UnsupportedObject", f"{label!r} (preset {preset!r}) excluded")

    def add_shape(self, body: RawShape, kind: ObjectKind, frame: FrameEmu, xfrm: XfrmSpec, sheet: str) -> None:
        sid = len(self.shapes)
        text = body.text
        if kind is ObjectKind.TEXT_BOX and text is None:
            text = ""
        line_color = body.line.color if body.line else None
        self.shapes.append(
            CanonicalShape(
                id=sid,
                kind=SHAPE_KINDS[kind],
                bbox=_round_bbox(rendered_bbox(frame, xfrm.rot, xfrm.flip_h, xfrm.flip_v)),
                fill_color=self.color(effective_style_color(body.style.fill, body.fill), f"shape {sid}"),
                border_color=self.color(effective_style_color(body.style.line, line_color), f"shape {sid}"),
                text=text,
                sheet=sheet,
            )
        )

    def add_connector(
        self, body: RawShape | RawConnector, kind: ObjectKind, frame: FrameEmu, xfrm: XfrmSpec, sheet: str
    ) -> None:
        cid = len(self.connectors)
        preset = body.preset or "line"
        adjustments = body.adjustments if isinstance(body, RawConnector) else ()
        local_diag: list[Diagnostic] = []
        path = connector_path(frame, preset, xfrm.rot, xfrm.flip_h, xfrm.flip_v, adjustments, local_diag)

        pts: list[PtPoint] = []
        for p in map(_round_point, path.points):
            if pts and p == pts[-1]:
                continue
            if len(pts) >= 2 and _passes_straight(pts[-2], pts[-1], p):
                pts.pop()
            pts.append(p)
        if len(pts) == 1:
            pts.append(pts[0])
        ckind: ConnectorKind = "bent" if kind is ObjectKind.BENT_CONNECTOR else "straight"
        if ckind == "bent" and len(pts) == 2:
            report(self.diagnostics, "info", "CollapsedBend", f"connector {cid}: bent connector has no visible bend; reported as straight")
            ckind = "straight"
        elif ckind == "straight" and len(pts) > 2:
            pts = [pts[0], pts[-1]]
        for d in local_diag:
            self.diagnostics.append(Diagnostic(d.severity, d.code, f"connector {cid}: {d.message}"))

        line = body.line
        self.connectors.append(
            CanonicalConnector(
                id=cid,
                kind=ckind,
                start=pts[0],
                end=pts[-1],
                bends=tuple(pts[1:-1]),
                start_direction=endpoint_direction(pts, "start"),
                end_direction=endpoint_direction(pts, "end"),
                line_color=self.color(
                    effective_style_color(body.style.line, line.color if line else None), f"connector {cid}"
                ),
                head_arrow=bool(line and line.head_arrow),
                tail_arrow=bool(line and line.tail_arrow),
                sheet=sheet,
            )
        )

    def result(self, source_file: str) -> CanonicalDiagram:
        return CanonicalDiagram(source_file, tuple(self.shapes), tuple(self.connectors), tuple(self.diagnostics))


def build_canonical(
    raw_objects: Iterable[RawAnchoredObject],
    metrics: SheetMetrics | None = None,
    palette: ThemePalette | None = None,
    sheet: str = "Sheet1",
    source_file: str = "",
    diagnostics: Sequence[Diagnostic] = (),
) -> CanonicalDiagram:
    """Assemble the canonical diagram of a single sheet's drawing objects."""
    builder = _Builder(palette or ThemePalette.office(), list(diagnostics))
    metrics = metrics or SheetMetrics()
    for obj in sorted(raw_objects, key=lambda o: o.doc_order):
        builder.add_object(obj, metrics, sheet)
    return builder.result(source_file)


def extract_diagram(
    source: str | os.PathLike[str] | bytes,
    mdw_px: int = DEFAULT_MDW_PX,
    source_name: str | None = None,
) -> CanonicalDiagram:
    """Open an ``.xlsx`` file and build the canonical diagram of every sheet.

    Raises:
        NotAZipError, MissingContentTypesError, MalformedXmlError, OSError
    """
    diags: list[Diagnostic] = []
    pkg = opc.open_package(source, diags)
    if source_name is None:
        source_name = "<bytes>" if isinstance(source, (bytes, bytearray)) else os.path.basename(os.fspath(source))

    palette = ThemePalette.office()
    theme = opc.resolve_theme_part(pkg, diags)
    if theme is None:
        report(diags, "info", "NoTheme", "workbook has no theme; Office default palette used")
    else:
        palette = parse_theme(pkg.read(theme.path), diags)

    builder = _Builder(palette, diags)
    for drawing in opc.resolve_drawing_parts(pkg, diags):
        metrics = parse_sheet_metrics(pkg.parts.get(drawing.owner or ""), mdw_px, diags)
        for obj in parse_drawing(pkg.read(drawing.path), diags):
            builder.add_object(obj, metrics, drawing.sheet_name or "")
    return builder.result(source_name)


# --- serialization -------------------------------------------------------

SHAPE_FIELDS = ("id", "kind", "sheet", "bbox", "fill_color", "border_color", "text")
BBOX_FIELDS = ("left", "right", "top", "bottom")
CONNECTOR_FIELDS = (
    "id", "kind", "sheet", "start", "end", "bends", "start_direction", "end_direction",
    "line_color", "head_arrow", "tail_arrow",
)
POINT_FIELDS = ("x", "y")
DIAGNOSTIC_FIELDS = ("severity", "code", "message")
TOP_FIELDS = ("schema_version", "source_file", "shapes", "connectors", "diagnostics")


class Fixed2(float):
    """A float that serializes with exactly two decimals."""


def _point(p: PtPoint) -> dict:
    return {"x": Fixed2(p.x), "y": Fixed2(p.y)}


def diagram_to_dict(diagram: CanonicalDiagram) -> dict:
    """Plain-data form in the documented key order; numbers tagged for fixed-point output."""
    shapes = [
        {
            "id": s.id,
            "kind": s.kind,
            "sheet": s.sheet,
            "bbox": {k: Fixed2(getattr(s.bbox, k)) for k in BBOX_FIELDS},
            "fill_color": s.fill_color,
            "border_color": s.border_color,
            "text": s.text,
        }
        for s in diagram.shapes
    ]
    connectors = [
        {
            "id": c.id,
            "kind": c.kind,
            "sheet": c.sheet,
            "start": _point(c.start),
            "end": _point(c.end),
            "bends": [_point(p) for p in c.bends],
            "start_direction": c.start_direction.value,
            "end_direction": c.end_direction.value,
            "line_color": c.line_color,
            "head_arrow": c.head_arrow,
            "tail_arrow": c.tail_arrow,
        }
        for c in diagram.connectors
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "source_file": diagram.source_file,
        "shapes": shapes,
        "connectors": connectors,
        "diagnostics": [{"severity": d.severity, "code": d.code, "message": d.message} for d in diagram.diagnostics],
    }


def _emit(value, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for i, (k, v) in enumerate(items):
            out.append(f"{pad}  {json.dumps(k, ensure_ascii=False)}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad + "  ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, Fixed2):
        out.append(f"{round(float(value), 2) + 0.0:.2f}")
    elif isinstance(value, float):
        out.append(repr(value))
    else:
        # str, int, bool, None
        out.append(json.dumps(value, ensure_ascii=False))


def dumps_stable(data) -> str:
    """Indented JSON with insertion-ordered keys, LF newlines and a trailing newline."""
    out: list[str] = []
    _emit(data, 0, out)
    out.append("\n")
    return "".join(out)


def serialize_json(diagram: CanonicalDiagram) -> str:
    return dumps_stable(diagram_to_dict(diagram))


# --- validation ----------------------------------------------------------


def _check_color(value: str | None, where: str, out: list[Violation]) -> None:
    if value is not None and not COLOR_RE.match(value):
        out.append(Violation(where, f"color {value!r} is not #RRGGBB or #RRGGBBAA"))


def validate(diagram: CanonicalDiagram) -> list[Violation]:
    """Check every structural invariant of the canonical model; empty when all hold."""
    out: list[Violation] = []
    for index, s in enumerate(diagram.shapes):
        where = f"shapes[{index}]"
        if s.id != index:
            out.append(Violation(where, f"id {s.id} breaks the dense 0..n-1 numbering"))
        if s.kind not in ("rectangle", "roundRectangle", "textBox"):
            out.append(Violation(where, f"unknown shape kind {s.kind!r}"))
        if s.bbox.left > s.bbox.right or s.bbox.top > s.bbox.bottom:
            out.append(Violation(where, "bbox edges out of order"))
        if s.kind == "textBox" and s.text is None:
            out.append(Violation(where, "text box without text"))
        _check_color(s.fill_color, where, out)
        _check_color(s.border_color, where, out)
    for index, c in enumerate(diagram.connectors):
        where = f"connectors[{index}]"
        if c.id != index:
            out.append(Violation(where, f"id {c.id} breaks the dense 0..n-1 numbering"))
        if c.kind not in ("straight", "bent"):
            out.append(Violation(where, f"unknown connector kind {c.kind!r}"))
        if (c.kind == "straight") != (len(c.bends) == 0):
            out.append(Violation(where, "bends must be empty exactly for straight connectors"))
        pts = c.points
        if any(a == b for a, b in zip(pts, pts[1:])) and len(set(pts)) > 1:
            out.append(Violation(where, "consecutive duplicate points"))
        _check_color(c.line_color, where, out)
    return out



def diagram_from_dict(data: dict) -> CanonicalDiagram:
    """Rebuild a diagram from its serialized form (the inverse of :func:`diagram_to_dict`)."""

    def point(d: dict) -> PtPoint:
        return PtPoint(float(d["x"]), float(d["y"]))

    shapes = tuple(
        CanonicalShape(
            id=s["id"],
            kind=s["kind"],
            bbox=BBox(*(float(s["bbox"][k]) for k in BBOX_FIELDS)),
            fill_color=s["fill_color"],
            border_color=s["border_color"],
            text=s["text"],
            sheet=s["sheet"],
        )
        for s in data.get("shapes", ())
    )
    connectors = tuple(
        CanonicalConnector(
            id=c["id"],
            kind=c["kind"],
            start=point(c["start"]),
            end=point(c["end"]),
            bends=tuple(point(p) for p in c["bends"]),
            start_direction=CardinalDirection(c["start_direction"]),
            end_direction=CardinalDirection(c["end_direction"]),
            line_color=c["line_color"],
            head_arrow=c["head_arrow"],
            tail_arrow=c["tail_arrow"],
            sheet=c["sheet"],
        )
        for c in data.get("connectors", ())
    )
    diagnostics = tuple(Diagnostic(d["severity"], d["code"], d["message"]) for d in data.get("diagnostics", ()))
    return CanonicalDiagram(data.get("source_file", ""), shapes, connectors, diagnostics)
