"""scikit-learn style front ends for extraction and graph inference.

Both estimators are stateless apart from validated parameters, so ``fit`` only
checks its inputs; they still follow the estimator protocol so they can be
cloned, parameter-searched and placed in a :class:`~sklearn.pipeline.Pipeline`.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .graph import DiagramGraph, Edge, GraphConfig, build_graph
from .model import CanonicalDiagram, extract_diagram
from .units import DEFAULT_MDW_PX
from .validation import check_diagram, check_non_negative, check_sources


class DiagramExtractor(TransformerMixin, BaseEstimator):
    """Turn ``.xlsx`` sources into canonical diagrams.

    Parameters
    ----------
    mdw_px : int, default=7
        Maximum digit width of the workbook's default font, in pixels. Drives
        the column-width to EMU conversion.
    """

    def __init__(self, mdw_px: int = DEFAULT_MDW_PX):
        self.mdw_px = mdw_px

    def fit(self, X, y=None):
        sources = check_sources(X)
        if not isinstance(self.mdw_px, int) or self.mdw_px <= 0:
            raise ValueError(f"mdw_px must be a positive int, got {self.mdw_px!r}")
        self.n_sources_ = len(sources)
        return self

    def transform(self, X) -> list[CanonicalDiagram]:
        check_is_fitted(self, "n_sources_")
        return [extract_diagram(src, self.mdw_px) for src in check_sources(X)]


class DiagramGraphBuilder(TransformerMixin, BaseEstimator):
    """Infer components, connector edges and annotations from a canonical diagram.

    Parameters
    ----------
    containment_overlap_min : float, default=0.5
        Fraction of a text box's area that must overlap a rectangle for the box
        to name it.
    link_gap_tolerance : float, default=6.0
        Largest gap in points between a connector endpoint and the shape it is
        bound to; rays are cast up to ten times this distance.
    annotation_max_distance : float, default=36.0
        Largest distance in points from a text box center to a connector for the
        box to annotate it.

    Attributes
    ----------
    graph_ : DiagramGraph
        The graph of the diagram passed to ``fit``.
    """

    def __init__(
        self,
        containment_overlap_min: float = 0.5,
        link_gap_tolerance: float = 6.0,
        annotation_max_distance: float = 36.0,
    ):
        self.containment_overlap_min = containment_overlap_min
        self.link_gap_tolerance = link_gap_tolerance
        self.annotation_max_distance = annotation_max_distance

    def _config(self) -> GraphConfig:
        return GraphConfig(
            containment_overlap_min=check_non_negative(self.containment_overlap_min, "containment_overlap_min", 1.0),
            link_gap_tolerance=check_non_negative(self.link_gap_tolerance, "link_gap_tolerance"),
            annotation_max_distance=check_non_negative(self.annotation_max_distance, "annotation_max_distance"),
        )

    def fit(self, X, y=None):
        self.config_ = self._config()
        self.graph_ = build_graph(check_diagram(X), self.config_)
        return self

    def transform(self, X) -> DiagramGraph:
        check_is_fitted(self, "config_")
        return build_graph(check_diagram(X), self.config_)

    def predict(self, X) -> list[Edge]:
        """Connector edges of ``X``: one per connector, endpoints bound or unbound."""
        return list(self.transform(X).edges)
