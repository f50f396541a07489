"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import json
import os
from numbers import Real
from typing import Any

from .model import CanonicalDiagram, diagram_from_dict


def check_sources(X: Any) -> list:
    """Normalize ``X`` to a list of ``.xlsx`` sources (paths or raw bytes).

    A single path or bytes object is wrapped into a one-element list.
    """
    if isinstance(X, (str, bytes, bytearray, os.PathLike)):
        return [X]
    try:
        sources = list(X)
    except TypeError:
        raise TypeError(f"expected a path, bytes or an iterable of them, got {type(X).__name__}") from None
    for s in sources:
        if not isinstance(s, (str, bytes, bytearray, os.PathLike)):
            raise TypeError(f"unsupported source type {type(s).__name__}")
    return sources


def check_diagram(diagram: Any) -> CanonicalDiagram:
    """Accept a :class:`CanonicalDiagram`, its dict form, or its JSON text."""
    if isinstance(diagram, CanonicalDiagram):
        return diagram
    if isinstance(diagram, str):
        diagram = json.loads(diagram)
    if isinstance(diagram, dict):
        return diagram_from_dict(diagram)
    raise TypeError(f"expected a CanonicalDiagram, got {type(diagram).__name__}")


def check_non_negative(value: Any, name: str, upper: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not value >= 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    if upper is not None and value > upper:
        raise ValueError(f"{name} must be <= {upper}, got {value}")
    return value
