"""Prompt rendering for the entity and relation understanding tasks.

Templates are plain text assets with ``{{slot}}`` placeholders. Substitution
happens in a single pass, so braces inside the inserted JSON or entity text are
never treated as placeholders.
"""

from __future__ import annotations

import re
from importlib import resources

from .errors import MissingEntityBlockError

TASKS = ("entities", "relations")
PLACEHOLDER = re.compile(r"\{\{(\w+)\}\}")

# one entry per key that can appear in the canonical JSON
FIELD_GLOSSARY = {
    "schema_version": "version of the JSON layout",
    "source_file": "name of the workbook the diagram was read from",
    "shapes": "list of rectangles, rounded rectangles and text boxes",
    "connectors": "list of lines and elbow connectors",
    "diagnostics": "notes about objects that could not be converted exactly",
    "id": "index of the object within its list, starting at 0",
    "kind": "shape kind (rectangle, roundRectangle, textBox) or connector kind (straight, bent)",
    "sheet": "worksheet that holds the object",
    "bbox": "axis-aligned bounding box of the rendered shape",
    "left": "x coordinate of the left edge in points",
    "right": "x coordinate of the right edge in points",
    "top": "y coordinate of the top edge in points; y grows downward",
    "bottom": "y coordinate of the bottom edge in points",
    "fill_color": "fill as #RRGGBB (or #RRGGBBAA when translucent); null means no fill",
    "border_color": "outline color in the same format; null means no outline",
    "text": "text content with paragraphs separated by newlines; null when empty",
    "start": "point where the connector begins",
    "end": "point where the connector ends",
    "x": "horizontal coordinate in points",
    "y": "vertical coordinate in points, growing downward",
    "bends": "corner points of an elbow connector in drawing order; empty for straight connectors",
    "start_direction": "side (N, E, S or W) the start point faces, i.e. toward the shape it attaches to",
    "end_direction": "side (N, E, S or W) the end point faces, i.e. toward the shape it attaches to",
    "line_color": "connector color as #RRGGBB; null means no visible line",
    "head_arrow": "true when an arrowhead is drawn at the start point",
    "tail_arrow": "true when an arrowhead is drawn at the end point",
    "severity": "diagnostic level: info, warning or error",
    "code": "short diagnostic identifier",
    "message": "human readable diagnostic text",
}


def attribute_glossary() -> str:
    return "\n".join(f"- {name}: {meaning}" for name, meaning in FIELD_GLOSSARY.items())


def load_template(task: str) -> str:
    if task not in TASKS:
        raise ValueError(f"unknown prompt task {task!r}; expected one of {', '.join(TASKS)}")
    return resources.files("sheetdiagram").joinpath(f"templates/{task}.txt").read_text("utf-8")


def fill_template(template: str, slots: dict[str, str]) -> str:
    """Substitute every ``{{name}}``; a placeholder without a value raises ``KeyError``."""
    missing = sorted(set(PLACEHOLDER.findall(template)) - set(slots))
    if missing:
        raise KeyError(f"no value for template slot(s): {', '.join(missing)}")
    return PLACEHOLDER.sub(lambda m: slots[m.group(1)], template)


def render_prompt(task: str, diagram_json: str, entity_block: str | None = None) -> str:
    """Prompt text for ``task`` with the canonical JSON embedded.

    Raises:
        MissingEntityBlockError: ``task`` is ``relations`` and no entity analysis was given.
    """
    slots = {"attribute_glossary": attribute_glossary(), "diagram_json": diagram_json.rstrip("\n")}
    if task == "relations":
        if entity_block is None or not entity_block.strip():
            raise MissingEntityBlockError("the relations prompt needs the entity analysis text (--entity-block)")
        slots["entity_block"] = entity_block.rstrip("\n")
    return fill_template(load_template(task), slots)
