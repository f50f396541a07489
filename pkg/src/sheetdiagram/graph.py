"""Deterministic entity/relation inference over a canonical diagram.

Components are rectangles paired with the text box that names them, edges bind
each connector endpoint to the component or free shape it points at, and the
remaining text boxes become connector annotations or free text. All thresholds
live in :class:`GraphConfig`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from .errors import Diagnostic, UnsupportedFormatError, report
from .geometry import BBox, CardinalDirection, PtPoint, polyline_distance, ray_hit_distance
from .model import CanonicalDiagram, Fixed2, dumps_stable

GRAPH_SCHEMA_VERSION = "1"
RAY_REACH_FACTOR = 10.0
RECT_KINDS = ("rectangle", "roundRectangle")


@dataclass(frozen=True)
class GraphConfig:
    containment_overlap_min: float = 0.5
    link_gap_tolerance: float = 6.0
    annotation_max_distance: float = 36.0

    def __post_init__(self):
        for name in ("containment_overlap_min", "link_gap_tolerance", "annotation_max_distance"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")
        if self.containment_overlap_min > 1:
            raise ValueError("containment_overlap_min must be <= 1")


@dataclass(frozen=True)
class Component:
    id: int
    name: str
    rect_shape_id: int | None
    label_shape_id: int | None
    bbox: BBox


@dataclass(frozen=True)
class EndpointRef:
    kind: Literal["component", "shape", "unbound"]
    id: int | None = None

    def __str__(self) -> str:
        return "unbound" if self.kind == "unbound" else f"{self.kind}:{self.id}"


UNBOUND = EndpointRef("unbound")


@dataclass(frozen=True)
class Edge:
    connector_id: int
    from_ref: EndpointRef
    to_ref: EndpointRef
    annotation_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class Annotation:
    shape_id: int
    text: str
    attached_connector_id: int | None


@dataclass(frozen=True)
class DiagramGraph:
    components: tuple[Component, ...]
    edges: tuple[Edge, ...]
    annotations: tuple[Annotation, ...]
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    def node_name(self, ref: EndpointRef, diagram: CanonicalDiagram) -> str | None:
        if ref.kind == "component":
            return self.components[ref.id].name
        if ref.kind == "shape":
            return diagram.shapes[ref.id].text or ""
        return None


def pair_components(diagram: CanonicalDiagram, config: GraphConfig | None = None) -> list[Component]:
    """Pair naming text boxes with the rectangles that contain them.

    A text box qualifies for a rectangle when at least
    ``containment_overlap_min`` of its own area overlaps it. Pairs are taken
    greedily by overlap (descending), then smaller rectangle area, then smaller
    ids; each shape is used at most once. Every rectangle yields a component,
    unnamed ones falling back to their own text.
    """
    config = config or GraphConfig()
    rects = [s for s in diagram.shapes if s.kind in RECT_KINDS]
    boxes = [s for s in diagram.shapes if s.kind == "textBox"]

    candidates = []
    for tb in boxes:
        area = tb.bbox.area
        for r in rects:
            if area > 0:
                frac = tb.bbox.intersection_area(r.bbox) / area
            else:
                frac = 1.0 if r.bbox.contains(tb.bbox.center) else 0.0
            if frac >= config.containment_overlap_min and frac > 0:
                candidates.append((-frac, r.bbox.area, r.id, tb.id))
    candidates.sort()

    label_of: dict[int, int] = {}
    used_boxes: set[int] = set()
    for _, _, rid, tid in candidates:
        if rid in label_of or tid in used_boxes:
            continue
        label_of[rid] = tid
        used_boxes.add(tid)

    components = []
    for r in rects:
        tid = label_of.get(r.id)
        if tid is not None:
            label = diagram.shapes[tid]
            name, bbox = label.text or "", r.bbox.union(label.bbox)
        else:
            name, bbox = (r.text or "").strip(), r.bbox
        components.append(Component(len(components), name, r.id, tid, bbox))
    return components


def _free_shapes(diagram: CanonicalDiagram, components: list[Component]):
    taken = {c.rect_shape_id for c in components} | {c.label_shape_id for c in components}
    return [s for s in diagram.shapes if s.id not in taken]


def _bind_endpoint(p: PtPoint, direction: CardinalDirection, targets, config: GraphConfig):
    tol = config.link_gap_tolerance
    best = None
    for order, ref, box in targets:
        dist = box.distance_to(p)
        if dist == 0:
            key = (0, 0.0)
        elif dist <= tol:
            key = (1, dist)
        else:
            hit = ray_hit_distance(p, direction, box)
            if hit is None or hit > RAY_REACH_FACTOR * tol:
                continue
            key = (2, hit)
        key = (*key, order, ref.id)
        if best is None or key < best[0]:
            best = (key, ref)
    return best[1] if best else UNBOUND


def binding_targets(diagram: CanonicalDiagram, components: list[Component]):
    """``(order, ref, bbox)`` for every component and every free shape."""
    targets = [(0, EndpointRef("component", c.id), c.bbox) for c in components]
    targets += [(1, EndpointRef("shape", s.id), s.bbox) for s in _free_shapes(diagram, components)]
    return targets


def bind_connectors(
    diagram: CanonicalDiagram,
    components: list[Component],
    config: GraphConfig | None = None,
    diagnostics: list[Diagnostic] | None = None,
) -> list[Edge]:
    """Bind both endpoints of every connector to a component or free shape.

    Candidates for an endpoint are targets containing it, targets within
    ``link_gap_tolerance`` of it, and targets hit by the ray cast along the
    endpoint's outward direction within ten times that tolerance. Containment
    beats proximity beats the ray; then distance, then components before
    shapes, then id. Endpoints without a candidate stay unbound and are
    reported.
    """
    config = config or GraphConfig()
    targets = binding_targets(diagram, components)
    edges = []
    for c in diagram.connectors:
        refs = []
        for label, p, d in (("start", c.start, c.start_direction), ("end", c.end, c.end_direction)):
            ref = _bind_endpoint(p, d, targets, config)
            if ref is UNBOUND:
                report(diagnostics, "warning", "UnboundEndpoint", f"connector {c.id} {label} at ({p.x:.2f}, {p.y:.2f}) touches no shape")
            refs.append(ref)
        edges.append(Edge(c.id, refs[0], refs[1]))
    return edges


def attach_annotations(
    diagram: CanonicalDiagram,
    components: list[Component],
    edges: list[Edge],
    config: GraphConfig | None = None,
) -> list[Annotation]:
    """Classify every text box that is not a component label.

    Boxes used as connector endpoints stay free text. The others attach to
    the connector whose polyline is nearest to the box center, if within
    ``annotation_max_distance``; ties go to the smaller connector id.
    """
    config = config or GraphConfig()
    labels = {c.label_shape_id for c in components}
    endpoints = {
        ref.id for e in edges for ref in (e.from_ref, e.to_ref) if ref.kind == "shape"
    }
    annotations = []
    for s in diagram.shapes:
        if s.kind != "textBox" or s.id in labels:
            continue
        attached = None
        if s.id not in endpoints:
            center = s.bbox.center
            best = None
            for c in diagram.connectors:
                d = polyline_distance(center, c.points)
                if d <= config.annotation_max_distance and (best is None or (d, c.id) < best):
                    best = (d, c.id)
            attached = best[1] if best else None
        annotations.append(Annotation(s.id, s.text or "", attached))
    return annotations


def build_graph(diagram: CanonicalDiagram, config: GraphConfig | None = None) -> DiagramGraph:
    config = config or GraphConfig()
    diags: list[Diagnostic] = []
    components = pair_components(diagram, config)
    edges = bind_connectors(diagram, components, config, diags)
    annotations = attach_annotations(diagram, components, edges, config)
    by_connector: dict[int, list[int]] = {}
    for a in annotations:
        if a.attached_connector_id is not None:
            by_connector.setdefault(a.attached_connector_id, []).append(a.shape_id)
    edges = [
        Edge(e.connector_id, e.from_ref, e.to_ref, tuple(sorted(by_connector.get(e.connector_id, ()))))
        for e in edges
    ]
    return DiagramGraph(tuple(components), tuple(edges), tuple(annotations), tuple(diags))


# --- export --------------------------------------------------------------


def _node_id(ref: EndpointRef, edge: Edge, end: str) -> str:
    if ref.kind == "component":
        return f"c{ref.id}"
    if ref.kind == "shape":
        return f"s{ref.id}"
    return f"u{edge.connector_id}_{end}"


def _edge_label(diagram: CanonicalDiagram, edge: Edge) -> str:
    return " / ".join(diagram.shapes[i].text or "" for i in edge.annotation_ids)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _mermaid_escape(text: str) -> str:
    return text.replace('"', "#quot;").replace("\n", "<br/>")


def _referenced_shapes(graph: DiagramGraph) -> list[int]:
    return sorted({r.id for e in graph.edges for r in (e.from_ref, e.to_ref) if r.kind == "shape"})


def _arrow_dir(diagram: CanonicalDiagram, edge: Edge) -> str:
    c = diagram.connectors[edge.connector_id]
    return {(False, True): "forward", (True, False): "back", (True, True): "both"}.get(
        (c.head_arrow, c.tail_arrow), "none"
    )


def to_dot(graph: DiagramGraph, diagram: CanonicalDiagram) -> str:
    lines = ["digraph diagram {", "  node [shape=box];"]
    for c in graph.components:
        lines.append(f'  c{c.id} [label="{_dot_escape(c.name)}"];')
    for sid in _referenced_shapes(graph):
        lines.append(f'  s{sid} [label="{_dot_escape(diagram.shapes[sid].text or "")}", shape=plaintext];')
    for e in graph.edges:
        for ref, end in ((e.from_ref, "start"), (e.to_ref, "end")):
            if ref.kind == "unbound":
                lines.append(f'  {_node_id(ref, e, end)} [label="", shape=point];')
    for e in graph.edges:
        attrs = [f'dir={_arrow_dir(diagram, e)}', f'id="connector{e.connector_id}"']
        label = _edge_label(diagram, e)
        if label:
            attrs.insert(0, f'label="{_dot_escape(label)}"')
        lines.append(f"  {_node_id(e.from_ref, e, 'start')} -> {_node_id(e.to_ref, e, 'end')} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_mermaid(graph: DiagramGraph, diagram: CanonicalDiagram) -> str:
    lines = ["flowchart LR"]
    for c in graph.components:
        lines.append(f'  c{c.id}["{_mermaid_escape(c.name)}"]')
    for sid in _referenced_shapes(graph):
        lines.append(f'  s{sid}["{_mermaid_escape(diagram.shapes[sid].text or "")}"]')
    for e in graph.edges:
        for ref, end in ((e.from_ref, "start"), (e.to_ref, "end")):
            if ref.kind == "unbound":
                lines.append(f"  {_node_id(ref, e, end)}(( ))")
    for e in graph.edges:
        a, b = _node_id(e.from_ref, e, "start"), _node_id(e.to_ref, e, "end")
        arrow = {"forward": "-->", "both": "<-->", "none": "---"}.get(_arrow_dir(diagram, e))
        if arrow is None:
            a, b, arrow = b, a, "-->"
        label = _edge_label(diagram, e)
        lines.append(f'  {a} {arrow}|"{_mermaid_escape(label)}"| {b}' if label else f"  {a} {arrow} {b}")
    return "\n".join(lines) + "\n"


def _bbox_dict(b: BBox) -> dict:
    return {"left": Fixed2(b.left), "right": Fixed2(b.right), "top": Fixed2(b.top), "bottom": Fixed2(b.bottom)}


def graph_to_dict(graph: DiagramGraph) -> dict:
    def ref(r: EndpointRef) -> dict:
        return {"kind": r.kind, "id": r.id}

    return {
        "schema_version": GRAPH_SCHEMA_VERSION,
        "components": [
            {
                "id": c.id,
                "name": c.name,
                "rect_shape_id": c.rect_shape_id,
                "label_shape_id": c.label_shape_id,
                "bbox": _bbox_dict(c.bbox),
            }
            for c in graph.components
        ],
        "edges": [
            {
                "connector_id": e.connector_id,
                "from": ref(e.from_ref),
                "to": ref(e.to_ref),
                "annotation_ids": list(e.annotation_ids),
            }
            for e in graph.edges
        ],
        "annotations": [
            {"shape_id": a.shape_id, "text": a.text, "attached_connector_id": a.attached_connector_id}
            for a in graph.annotations
        ],
    }


EXPORT_FORMATS = ("dot", "mermaid", "json")


def export_graph(graph: DiagramGraph, diagram: CanonicalDiagram, format: str = "dot") -> str:
    """Render the graph as DOT, Mermaid flowchart text or graph JSON.

    Raises:
        UnsupportedFormatError: ``format`` is not one of ``dot``, ``mermaid``, ``json``.
    """
    if format == "dot":
        return to_dot(graph, diagram)
    if format == "mermaid":
        return to_mermaid(graph, diagram)
    if format == "json":
        return dumps_stable(graph_to_dict(graph))
    raise UnsupportedFormatError(f"unsupported graph format {format!r}; expected one of {', '.join(EXPORT_FORMATS)}")

