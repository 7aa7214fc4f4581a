"""Result record shared by the embedding procedures."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..graphs import Digraph, Multigraph, contains


@dataclass
class EmbeddingReport:
    """Inner and outer samples of one coupled run.

    ``inner`` is ``None`` when the procedure produced the empty marker.
    ``contained`` is recomputed from the stored objects, never trusted from
    the producer.  ``decoupled`` means the inner object was drawn
    independently after a stage failure.
    """

    inner: Multigraph | Digraph | None
    outer: Multigraph | Digraph | None
    mode: str = "simple-subgraph"
    decoupled: bool = False
    diagnostics: dict[str, Any] = field(default_factory=dict)
    contained: bool = field(init=False)

    def __post_init__(self):
        self.contained = self.check()

    def check(self) -> bool:
        if self.inner is None or self.outer is None:
            return False
        inner, outer = self.inner, self.outer
        if isinstance(inner, Digraph) and isinstance(outer, Digraph):
            return outer.contains(inner)
        if isinstance(inner, Digraph):
            inner = inner.to_undirected()
        if isinstance(outer, Digraph):
            outer = outer.to_undirected()
        return contains(inner, outer, self.mode)

    @property
    def empty(self) -> bool:
        return self.inner is None

    def to_record(self) -> dict[str, Any]:
        from ..io import graph_to_record

        return {
            "inner": None if self.inner is None else graph_to_record(self.inner),
            "outer": None if self.outer is None else graph_to_record(self.outer),
            "mode": self.mode,
            "contained": self.contained,
            "decoupled": self.decoupled,
            "diagnostics": _plain(self.diagnostics),
        }


def _plain(obj):
    """Make diagnostics JSON-friendly (numpy scalars, tuples, sets)."""
    import dataclasses

    import numpy as np

    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _plain({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, (Multigraph, Digraph)):
        from ..io import graph_to_record

        return graph_to_record(obj)
    if hasattr(obj, "numerator") and hasattr(obj, "denominator") and not isinstance(obj, (int, bool)):
        return float(obj)
    return obj
