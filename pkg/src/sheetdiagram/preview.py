"""Debug SVG rendering of a canonical diagram (1 SVG user unit = 1 pt)."""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .model import CanonicalDiagram

MARGIN = 10.0
CORNER_RADIUS = 8.0
DEFAULT_LINE = "#000000"


def _num(v: float) -> str:
    return f"{round(v, 2) + 0.0:g}"


def _paint(attr: str, color: str | None) -> str:
    if color is None:
        return f'{attr}="none"'
    if len(color) == 9:
        alpha = int(color[7:], 16) / 255
        return f'{attr}="{color[:7]}" {attr}-opacity="{_num(alpha)}"'
    return f'{attr}="{color}"'


def _marker_id(color: str, end: str) -> str:
    return f"arrow-{end}-{color.lstrip('#')}"


def _markers(diagram: CanonicalDiagram) -> list[str]:
    needed = sorted(
        {((c.line_color or DEFAULT_LINE)[:7], "end") for c in diagram.connectors if c.tail_arrow}
        | {((c.line_color or DEFAULT_LINE)[:7], "start") for c in diagram.connectors if c.head_arrow}
    )
    out = []
    for color, end in needed:
        path = "M0,0 L10,5 L0,10 z" if end == "end" else "M10,0 L0,5 L10,10 z"
        ref_x = 10 if end == "end" else 0
        out.append(
            f'<marker id="{_marker_id(color, end)}" viewBox="0 0 10 10" refX="{ref_x}" refY="5" '
            f'markerWidth="8" markerHeight="8" orient="auto"><path d="{path}" fill="{color}"/></marker>'
        )
    return out


def render_svg(diagram: CanonicalDiagram) -> str:
    """SVG document for ``diagram``; an empty diagram gives an empty canvas."""
    xs = [s.bbox.right for s in diagram.shapes] + [p.x for c in diagram.connectors for p in c.points]
    ys = [s.bbox.bottom for s in diagram.shapes] + [p.y for c in diagram.connectors for p in c.points]
    width = max(xs, default=0.0) + MARGIN
    height = max(ys, default=0.0) + MARGIN

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">'
    ]
    markers = _markers(diagram)
    if markers:
        lines.append("<defs>" + "".join(markers) + "</defs>")

    for s in diagram.shapes:
        b = s.bbox
        if s.kind != "textBox" or s.fill_color or s.border_color:
            rounded = f' rx="{_num(CORNER_RADIUS)}"' if s.kind == "roundRectangle" else ""
            lines.append(
                f'<rect id="shape{s.id}" x="{_num(b.left)}" y="{_num(b.top)}" width="{_num(b.width)}" '
                f'height="{_num(b.height)}"{rounded} {_paint("fill", s.fill_color)} {_paint("stroke", s.border_color)}/>'
            )
    for c in diagram.connectors:
        color = c.line_color or DEFAULT_LINE
        pts = " ".join(f"{_num(p.x)},{_num(p.y)}" for p in c.points)
        arrows = ""
        if c.head_arrow:
            arrows += f' marker-start="url(#{_marker_id(color[:7], "start")})"'
        if c.tail_arrow:
            arrows += f' marker-end="url(#{_marker_id(color[:7], "end")})"'
        lines.append(f'<polyline id="connector{c.id}" points="{pts}" fill="none" {_paint("stroke", color)}{arrows}/>')
    for s in diagram.shapes:
        if not s.text:
            continue
        cx, cy = s.bbox.center
        rows = s.text.split("\n")
        first = -(len(rows) - 1) * 0.6
        spans = "".join(
            f'<tspan x="{_num(cx)}" dy="{_num(first if i == 0 else 1.2)}em">{escape(row)}</tspan>'
            for i, row in enumerate(rows)
        )
        lines.append(
            f'<text x="{_num(cx)}" y="{_num(cy)}" font-size="10" text-anchor="middle" '
            f'dominant-baseline="middle" font-family={quoteattr("sans-serif")}>{spans}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
