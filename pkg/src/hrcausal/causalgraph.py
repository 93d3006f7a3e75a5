"""Lagged directed causal graphs, the SHD metric, and serialization.

Edges are identified by (source, target, lag) triples; strength and
p-value ride along but never enter graph comparison. The interchange
format is a versioned JSON document; a DOT rendering is provided for
visual inspection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import IncompatibleGraphsError, ParseError

FORMAT_VERSION = 1


@dataclass(frozen=True)
class LaggedEdge:
    """Directed link source -> target at a positive lag (sampling periods)."""

    source: str
    target: str
    lag: int
    strength: float = 1.0
    p_value: float = 0.0

    def __post_init__(self):
        if self.lag < 1:
            raise ValueError(f"lag must be >= 1, got {self.lag}")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value must be in [0, 1], got {self.p_value}")

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.source, self.target, self.lag)


@dataclass(frozen=True)
class CausalGraph:
    """Set of lagged edges over an ordered variable list."""

    variables: tuple[str, ...]
    tau_max: int
    edges: tuple[LaggedEdge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        edges = tuple(sorted(self.edges, key=lambda e: e.key))
        object.__setattr__(self, "edges", edges)
        if self.tau_max < 1:
            raise ValueError(f"tau_max must be >= 1, got {self.tau_max}")
        names = set(self.variables)
        if len(names) != len(self.variables):
            raise ValueError("duplicate variable names")
        seen: set[tuple[str, str, int]] = set()
        for e in edges:
            if e.source not in names or e.target not in names:
                raise ValueError(f"edge {e.key} references unknown variable")
            if e.lag > self.tau_max:
                raise ValueError(f"edge {e.key} exceeds tau_max={self.tau_max}")
            if e.key in seen:
                raise ValueError(f"duplicate edge {e.key}")
            seen.add(e.key)

    def edge_keys(self, include_auto: bool = True) -> set[tuple[str, str, int]]:
        """Edge identity set, optionally dropping self-loops."""
        return {
            e.key for e in self.edges if include_auto or e.source != e.target
        }

    def has_edge(self, source: str, target: str, lag: int = 1) -> bool:
        return (source, target, lag) in self.edge_keys()


def shd(a: CausalGraph, b: CausalGraph, include_auto: bool = False) -> int:
    """Structural Hamming distance: |symmetric difference of edge sets|.

    Self-loops are excluded unless include_auto is set; strength and
    p-value are ignored. Graphs must share variables and tau_max.
    """
    if set(a.variables) != set(b.variables):
        raise IncompatibleGraphsError(
            f"variable sets differ: {sorted(a.variables)} vs {sorted(b.variables)}"
        )
    if a.tau_max != b.tau_max:
        raise IncompatibleGraphsError(f"tau_max differs: {a.tau_max} vs {b.tau_max}")
    return len(a.edge_keys(include_auto) ^ b.edge_keys(include_auto))


def expected_hrsi_graph() -> CausalGraph:
    """Baseline model of the human-robot scenario.

    Speed and goal distance drive each other, and speed and collision
    risk drive each other; goal distance and risk are not directly linked.
    """
    edges = tuple(
        LaggedEdge(s, t, 1)
        for s, t in [("v", "d_g"), ("d_g", "v"), ("r", "v"), ("v", "r")]
    )
    return CausalGraph(("v", "d_g", "r"), 1, edges)


# -- serialization -------------------------------------------------------------

_EDGE_FIELDS = {"source", "target", "lag", "strength", "p_value"}
_DOC_FIELDS = {"format_version", "variables", "tau_max", "edges"}


def to_text(g: CausalGraph) -> str:
    """Render the graph document (JSON, edges in canonical order)."""
    doc = {
        "format_version": FORMAT_VERSION,
        "variables": list(g.variables),
        "tau_max": g.tau_max,
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "lag": e.lag,
                "strength": e.strength,
                "p_value": e.p_value,
            }
            for e in g.edges
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_text(text: str) -> CausalGraph:
    """Parse a graph document produced by :func:`to_text`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"graph document is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("graph document must be a JSON object")
    unknown = set(doc) - _DOC_FIELDS
    if unknown:
        raise ParseError(f"unknown graph document field(s): {sorted(unknown)}")
    missing = _DOC_FIELDS - set(doc)
    if missing:
        raise ParseError(f"missing graph document field(s): {sorted(missing)}")
    if doc["format_version"] != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {doc['format_version']!r}")
    edges = []
    for i, rec in enumerate(doc["edges"]):
        if not isinstance(rec, dict):
            raise ParseError(f"edge {i} is not an object")
        bad = set(rec) - _EDGE_FIELDS
        if bad:
            raise ParseError(f"edge {i}: unknown field(s) {sorted(bad)}")
        try:
            edges.append(
                LaggedEdge(
                    source=rec["source"],
                    target=rec["target"],
                    lag=int(rec["lag"]),
                    strength=float(rec.get("strength", 1.0)),
                    p_value=float(rec.get("p_value", 0.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"edge {i}: {exc}") from exc
    try:
        return CausalGraph(tuple(doc["variables"]), int(doc["tau_max"]), tuple(edges))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def write_graph(g: CausalGraph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_text(g))


def read_graph(path) -> CausalGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return from_text(fh.read())


def to_dot(g: CausalGraph) -> str:
    """DOT rendering: one node per variable, edges labelled "-<lag>"."""
    lines = ["digraph causal_model {", "  rankdir=LR;"]
    for name in g.variables:
        lines.append(f'  "{name}";')
    for e in g.edges:
        lines.append(f'  "{e.source}" -> "{e.target}" [label="-{e.lag}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
