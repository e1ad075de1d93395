"""Embedded property graph holding Article and Topic nodes.

The store is append-only (plus property reads): ingestion runs before the
service starts serving, and the serving phase never mutates the graph, so no
locking is done here. Node ids are assigned sequentially from 1 and never
reused; all iteration orders are ascending by node id, which keeps every
downstream query result reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Union

from .errors import (
    DuplicateEdgeError,
    DuplicateKeyError,
    FormatError,
    LabelMismatchError,
    SchemaViolationError,
    UnknownLabelError,
    UnknownNodeError,
)

NodeId = int
PropertyValue = Union[int, float, str, list, bool, None]

SNAPSHOT_VERSION = "kgchat-snapshot-1"

ARTICLE = "Article"
TOPIC = "Topic"
HAS_TOPIC = "HAS_TOPIC"

LABELS = (ARTICLE, TOPIC)
EDGE_KINDS = (HAS_TOPIC,)

# property -> required python type, per label
_REQUIRED = {
    ARTICLE: {"article_id": int, "content": str, "sentiment": str,
              "compound": float, "content_vector": list},
    TOPIC: {"topic_id": int, "name": str},
}


@dataclass
class Node:
    id: NodeId
    label: str
    properties: dict[str, PropertyValue]


@dataclass
class Edge:
    id: int
    source: NodeId
    target: NodeId
    kind: str


def _is_int(value: object) -> bool:
    # bool is an int subclass in Python; keep the variants distinct
    return isinstance(value, int) and not isinstance(value, bool)


def _is_float_vector(value: object) -> bool:
    return (isinstance(value, list)
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    and math.isfinite(x) for x in value))


def _check_property_value(name: str, value: PropertyValue) -> None:
    if value is None or isinstance(value, (bool, str)):
        return
    if _is_int(value) or isinstance(value, float):
        return
    if isinstance(value, list):
        if not _is_float_vector(value):
            raise SchemaViolationError(
                f"property {name!r}: vector entries must be finite numbers")
        return
    raise SchemaViolationError(
        f"property {name!r}: unsupported value type {type(value).__name__}")


class Graph:
    """Property graph of Article and Topic nodes joined by HAS_TOPIC edges."""

    def __init__(self, dimension: int = 64):
        self.dimension = dimension
        self._nodes: dict[NodeId, Node] = {}
        self._edges: dict[int, Edge] = {}
        self._article_index: dict[int, NodeId] = {}
        self._topic_index: dict[int, NodeId] = {}
        self._out: dict[NodeId, list[NodeId]] = {}
        self._in: dict[NodeId, list[NodeId]] = {}
        self._edge_pairs: set[tuple[NodeId, NodeId]] = set()
        self._next_node_id = 1
        self._next_edge_id = 1

    # --- construction ---

    def create_node(self, label: str, properties: dict[str, PropertyValue]) -> NodeId:
        """Insert a node, enforce the per-label schema, return its new id."""
        self._validate_node(label, properties)
        if label == ARTICLE and properties["article_id"] in self._article_index:
            raise DuplicateKeyError(f"article_id {properties['article_id']} already present")
        if label == TOPIC and properties["topic_id"] in self._topic_index:
            raise DuplicateKeyError(f"topic_id {properties['topic_id']} already present")
        node = Node(self._next_node_id, label, dict(properties))
        self._insert_node(node)
        self._next_node_id = node.id + 1
        return node.id

    def create_edge(self, source: NodeId, target: NodeId, kind: str) -> int:
        """Insert a directed Article->Topic edge, return its new id."""
        if kind not in EDGE_KINDS:
            raise UnknownLabelError(f"unknown relationship kind {kind!r}")
        src = self._nodes.get(source)
        dst = self._nodes.get(target)
        if src is None:
            raise UnknownNodeError(f"no node with id {source}")
        if dst is None:
            raise UnknownNodeError(f"no node with id {target}")
        if src.label != ARTICLE or dst.label != TOPIC:
            raise LabelMismatchError(
                f"{kind} must point Article->Topic, got {src.label}->{dst.label}")
        if (source, target) in self._edge_pairs:
            raise DuplicateEdgeError(f"edge ({source})-[:{kind}]->({target}) already present")
        edge = Edge(self._next_edge_id, source, target, kind)
        self._insert_edge(edge)
        self._next_edge_id = edge.id + 1
        return edge.id

    def _validate_node(self, label: str, properties: dict[str, PropertyValue]) -> None:
        if label not in LABELS:
            raise UnknownLabelError(f"unknown label {label!r}")
        for name, required_type in _REQUIRED[label].items():
            if name not in properties:
                raise SchemaViolationError(f"{label} node missing property {name!r}")
            value = properties[name]
            if required_type is int and not _is_int(value):
                raise SchemaViolationError(f"property {name!r} must be an integer")
            if required_type is str and not isinstance(value, str):
                raise SchemaViolationError(f"property {name!r} must be text")
            if required_type is float:
                if not (_is_int(value) or isinstance(value, float)):
                    raise SchemaViolationError(f"property {name!r} must be a number")
            if required_type is list and not isinstance(value, list):
                raise SchemaViolationError(f"property {name!r} must be a float vector")
        for name, value in properties.items():
            _check_property_value(name, value)
        if label == ARTICLE:
            vector = properties["content_vector"]
            if len(vector) != self.dimension:
                raise SchemaViolationError(
                    f"content_vector has length {len(vector)}, graph dimension is {self.dimension}")
            compound = properties["compound"]
            if not -1.0 <= float(compound) <= 1.0:
                raise SchemaViolationError(f"compound {compound} outside [-1, 1]")

    def _insert_node(self, node: Node) -> None:
        self._nodes[node.id] = node
        if node.label == ARTICLE:
            node.properties["compound"] = float(node.properties["compound"])
            node.properties["content_vector"] = [float(x) for x in node.properties["content_vector"]]
            self._article_index[node.properties["article_id"]] = node.id
        else:
            self._topic_index[node.properties["topic_id"]] = node.id

    def _insert_edge(self, edge: Edge) -> None:
        self._edges[edge.id] = edge
        self._out.setdefault(edge.source, []).append(edge.target)
        self._in.setdefault(edge.target, []).append(edge.source)
        self._edge_pairs.add((edge.source, edge.target))

    # --- lookups ---

    def get_node(self, node_id: NodeId) -> Optional[Node]:
        return self._nodes.get(node_id)

    def find_article(self, article_id: int) -> Optional[Node]:
        """Index-backed lookup of the unique Article with that article_id."""
        node_id = self._article_index.get(article_id)
        return self._nodes[node_id] if node_id is not None else None

    def find_topic(self, topic_id: int) -> Optional[Node]:
        node_id = self._topic_index.get(topic_id)
        return self._nodes[node_id] if node_id is not None else None

    def nodes_by_label(self, label: str) -> list[Node]:
        """All nodes with the label, ascending by node id."""
        if label not in LABELS:
            raise UnknownLabelError(f"unknown label {label!r}")
        return [n for n in self._iter_nodes() if n.label == label]

    def neighbors(self, node_id: NodeId, kind: str = HAS_TOPIC,
                  direction: Literal["out", "in"] = "out") -> list[Node]:
        """Adjacent nodes along `kind` edges, ascending by node id."""
        if kind not in EDGE_KINDS:
            raise UnknownLabelError(f"unknown relationship kind {kind!r}")
        if node_id not in self._nodes:
            raise UnknownNodeError(f"no node with id {node_id}")
        adjacency = self._out if direction == "out" else self._in
        return [self._nodes[i] for i in sorted(adjacency.get(node_id, []))]

    def has_edge(self, source: NodeId, target: NodeId, kind: str = HAS_TOPIC) -> bool:
        return kind in EDGE_KINDS and (source, target) in self._edge_pairs

    def _iter_nodes(self) -> Iterable[Node]:
        for node_id in sorted(self._nodes):
            yield self._nodes[node_id]

    def all_nodes(self) -> list[Node]:
        return list(self._iter_nodes())

    def all_edges(self) -> list[Edge]:
        return [self._edges[i] for i in sorted(self._edges)]

    def article_count(self) -> int:
        return len(self._article_index)

    def topic_count(self) -> int:
        return len(self._topic_index)

    def edge_count(self) -> int:
        return len(self._edges)

    # --- persistence ---

    def to_snapshot(self) -> dict:
        return {
            "version": SNAPSHOT_VERSION,
            "dimension": self.dimension,
            "nodes": [{"id": n.id, "label": n.label, "properties": n.properties}
                      for n in self._iter_nodes()],
            "edges": [{"id": e.id, "source": e.source, "target": e.target, "kind": e.kind}
                      for e in self.all_edges()],
        }

    def save_snapshot(self, path: str) -> None:
        """Write the graph as a single JSON document."""
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_snapshot(), fh, allow_nan=False)
            fh.write("\n")

    @classmethod
    def from_snapshot(cls, document: dict) -> "Graph":
        if not isinstance(document, dict) or document.get("version") != SNAPSHOT_VERSION:
            raise FormatError(f"snapshot version must be {SNAPSHOT_VERSION!r}")
        dimension = document.get("dimension")
        if not _is_int(dimension):
            raise FormatError("snapshot dimension must be an integer")
        graph = cls(dimension=dimension)
        try:
            for raw in document.get("nodes", []):
                node_id, label, props = raw["id"], raw["label"], raw["properties"]
                if not _is_int(node_id) or node_id in graph._nodes:
                    raise FormatError(f"bad or duplicate node id {node_id!r}")
                graph._validate_node(label, props)
                if label == ARTICLE and props["article_id"] in graph._article_index:
                    raise FormatError(f"duplicate article_id {props['article_id']}")
                if label == TOPIC and props["topic_id"] in graph._topic_index:
                    raise FormatError(f"duplicate topic_id {props['topic_id']}")
                graph._insert_node(Node(node_id, label, props))
            for raw in document.get("edges", []):
                edge = Edge(raw["id"], raw["source"], raw["target"], raw["kind"])
                src = graph._nodes.get(edge.source)
                dst = graph._nodes.get(edge.target)
                if src is None or dst is None:
                    raise FormatError(f"edge {edge.id} references a missing node")
                if edge.kind not in EDGE_KINDS:
                    raise FormatError(f"edge {edge.id} has unknown kind {edge.kind!r}")
                if src.label != ARTICLE or dst.label != TOPIC:
                    raise FormatError(f"edge {edge.id} does not point Article->Topic")
                if (edge.source, edge.target) in graph._edge_pairs:
                    raise FormatError(f"duplicate edge for pair ({edge.source}, {edge.target})")
                graph._insert_edge(edge)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed snapshot entry: {exc}") from exc
        except (UnknownLabelError, SchemaViolationError) as exc:
            raise FormatError(str(exc)) from exc
        if graph._nodes:
            graph._next_node_id = max(graph._nodes) + 1
        if graph._edges:
            graph._next_edge_id = max(graph._edges) + 1
        return graph

    @classmethod
    def load_snapshot(cls, path: str) -> "Graph":
        """Load a snapshot written by save_snapshot; inverse of it."""
        with open(path, "r", encoding="utf-8") as fh:
            try:
                document = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"snapshot is not valid JSON: {exc}") from exc
        return cls.from_snapshot(document)
