"""Extract system design diagrams drawn with Excel shapes into structured data."""

__version__ = "0.1.0"

from .errors import (
    Diagnostic,
    InvalidManifestError,
    MalformedXmlError,
    MissingContentTypesError,
    MissingEntityBlockError,
    NotAZipError,
    SheetDiagramError,
    UnsupportedFormatError,
)
from .estimators import DiagramExtractor, DiagramGraphBuilder
from .graph import DiagramGraph, GraphConfig, build_graph, export_graph
from .model import CanonicalDiagram, extract_diagram, serialize_json, validate
from .preview import render_svg
from .prompts import render_prompt

__all__ = [
    "CanonicalDiagram",
    "Diagnostic",
    "DiagramExtractor",
    "DiagramGraph",
    "DiagramGraphBuilder",
    "GraphConfig",
    "InvalidManifestError",
    "MalformedXmlError",
    "MissingContentTypesError",
    "MissingEntityBlockError",
    "NotAZipError",
    "SheetDiagramError",
    "UnsupportedFormatError",
    "build_graph",
    "export_graph",
    "extract_diagram",
    "render_prompt",
    "render_svg",
    "serialize_json",
    "validate",
]
