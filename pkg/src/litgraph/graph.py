"""Labelled property graph of publications and shared value nodes.

Every stored publication instantiates the same shape: one Publication
node wired to shared Year, Database, Citation, and Field value nodes
plus zero or more Keyword nodes.  Upserts are idempotent and keyed by a
canonical dedup key, so repeated or overlapping searches expand the
graph instead of duplicating it.  Persistence is two CSV files that any
external graph database can ingest.
"""

from __future__ import annotations

import csv
import json
import threading
from copy import deepcopy
from dataclasses import dataclass, field as dc_field
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

from .acquisition import PublicationRecord
from .textproc import Enrichment


class NodeLabel(str, Enum):
    PUBLICATION = "Publication"
    YEAR = "Year"
    DATABASE = "Database"
    CITATION = "Citation"
    KEYWORD = "Keyword"
    FIELD = "Field"


class EdgeLabel(str, Enum):
    PUBLISHED_IN = "PUBLISHED_IN"
    PUBLISHED_BY = "PUBLISHED_BY"
    CITED = "CITED"
    HAS_KEYWORD = "HAS_KEYWORD"
    APPLIED_IN = "APPLIED_IN"


# Target node label for each edge kind; src is always a Publication.
EDGE_TARGET: dict[EdgeLabel, NodeLabel] = {
    EdgeLabel.PUBLISHED_IN: NodeLabel.YEAR,
    EdgeLabel.PUBLISHED_BY: NodeLabel.DATABASE,
    EdgeLabel.CITED: NodeLabel.CITATION,
    EdgeLabel.HAS_KEYWORD: NodeLabel.KEYWORD,
    EdgeLabel.APPLIED_IN: NodeLabel.FIELD,
}

_SCALAR_EDGES = (
    EdgeLabel.PUBLISHED_IN,
    EdgeLabel.PUBLISHED_BY,
    EdgeLabel.CITED,
    EdgeLabel.APPLIED_IN,
)


class UpsertOutcome(str, Enum):
    CREATED = "created"
    UPDATED = "updated"
    UNCHANGED = "unchanged"


class InvariantViolationError(RuntimeError):
    """Internal graph consistency failure; the offending change is rolled back."""


class ImportSchemaError(ValueError):
    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DanglingEdgeError(ValueError):
    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass
class Node:
    id: str
    label: NodeLabel
    key: str
    props: dict = dc_field(default_factory=dict)


@dataclass
class Edge:
    src: str
    dst: str
    label: EdgeLabel
    props: dict = dc_field(default_factory=dict)


def normalize_phrase(phrase: str) -> str:
    return " ".join(phrase.split()).lower()


def dedup_key(record: PublicationRecord) -> str:
    """Canonical merge key: lowercase DOI, else normalized title + year."""
    if record.doi:
        return record.doi.strip().lower()
    title = "".join(
        c for c in record.title.lower() if c.isalnum() or c.isspace()
    )
    return f'{" ".join(title.split())}#{record.year}'


class KnowledgeGraph:
    """In-memory labelled property graph with idempotent publication upsert.

    Single-writer: mutations serialize through an internal lock;
    :meth:`snapshot` hands out consistent copies for concurrent readers.
    """

    def __init__(self):
        self._nodes: dict[str, Node] = {}
        self._by_key: dict[tuple[NodeLabel, str], str] = {}
        self._edges: dict[tuple[str, str, EdgeLabel], Edge] = {}
        self._out: dict[str, dict[EdgeLabel, list[str]]] = {}
        self._in_degree: dict[str, int] = {}
        self._next_id = 1
        self._lock = threading.RLock()

    # -- basic accessors --

    def nodes(self) -> Iterator[Node]:
        return iter(self._nodes.values())

    def edges(self) -> Iterator[Edge]:
        return iter(self._edges.values())

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def get_node(self, node_id: str) -> Node:
        return self._nodes[node_id]

    def find(self, label: NodeLabel, key: str) -> Optional[Node]:
        node_id = self._by_key.get((label, key))
        return self._nodes[node_id] if node_id is not None else None

    def publications(self) -> list[Node]:
        return [n for n in self._nodes.values() if n.label is NodeLabel.PUBLICATION]

    def out_edges(self, node_id: str, label: Optional[EdgeLabel] = None) -> list[Edge]:
        by_label = self._out.get(node_id, {})
        if label is not None:
            return [self._edges[(node_id, dst, label)] for dst in by_label.get(label, [])]
        return [
            self._edges[(node_id, dst, lbl)]
            for lbl, dsts in by_label.items()
            for dst in dsts
        ]

    def out_target(self, node_id: str, label: EdgeLabel) -> Node:
        """The unique target of a scalar edge kind, per the meta-model."""
        edges = self.out_edges(node_id, label)
        if len(edges) != 1:
            raise InvariantViolationError(
                f"publication {node_id} has {len(edges)} {label.value} edges"
            )
        return self._nodes[edges[0].dst]

    def snapshot(self) -> "KnowledgeGraph":
        with self._lock:
            copy = KnowledgeGraph.__new__(KnowledgeGraph)
            copy._nodes = deepcopy(self._nodes)
            copy._by_key = dict(self._by_key)
            copy._edges = deepcopy(self._edges)
            copy._out = {
                nid: {lbl: list(dsts) for lbl, dsts in by_label.items()}
                for nid, by_label in self._out.items()
            }
            copy._in_degree = dict(self._in_degree)
            copy._next_id = self._next_id
            copy._lock = threading.RLock()
            return copy

    # -- primitive mutations (journaled for rollback) --

    def _fresh_id(self) -> str:
        while f"n{self._next_id}" in self._nodes:
            self._next_id += 1
        node_id = f"n{self._next_id}"
        self._next_id += 1
        return node_id

    def _add_node(self, label: NodeLabel, key: str, props: dict, journal: list) -> Node:
        if (label, key) in self._by_key:
            raise InvariantViolationError(f"duplicate node ({label.value}, {key!r})")
        node = Node(self._fresh_id(), label, key, props)
        self._nodes[node.id] = node
        self._by_key[(label, key)] = node.id
        self._in_degree[node.id] = 0
        journal.append(("del_node", node))
        return node

    def _remove_node(self, node: Node, journal: list) -> None:
        del self._nodes[node.id]
        del self._by_key[(node.label, node.key)]
        self._in_degree.pop(node.id, None)
        self._out.pop(node.id, None)
        journal.append(("add_node", node))

    def _add_edge(self, src: str, dst: str, label: EdgeLabel, props: dict, journal: list) -> Edge:
        triple = (src, dst, label)
        if triple in self._edges:
            raise InvariantViolationError(f"duplicate edge {triple}")
        edge = Edge(src, dst, label, props)
        self._edges[triple] = edge
        self._out.setdefault(src, {}).setdefault(label, []).append(dst)
        self._in_degree[dst] = self._in_degree.get(dst, 0) + 1
        journal.append(("del_edge", edge))
        return edge

    def _remove_edge(self, edge: Edge, journal: list) -> None:
        del self._edges[(edge.src, edge.dst, edge.label)]
        self._out[edge.src][edge.label].remove(edge.dst)
        self._in_degree[edge.dst] -= 1
        journal.append(("add_edge", edge))

    def _rollback(self, journal: list) -> None:
        for op, payload in reversed(journal):
            if op == "del_node":
                node = payload
                del self._nodes[node.id]
                del self._by_key[(node.label, node.key)]
                self._in_degree.pop(node.id, None)
            elif op == "add_node":
                node = payload
                self._nodes[node.id] = node
                self._by_key[(node.label, node.key)] = node.id
                self._in_degree.setdefault(node.id, 0)
            elif op == "del_edge":
                edge = payload
                del self._edges[(edge.src, edge.dst, edge.label)]
                self._out[edge.src][edge.label].remove(edge.dst)
                self._in_degree[edge.dst] -= 1
            elif op == "add_edge":
                edge = payload
                self._edges[(edge.src, edge.dst, edge.label)] = edge
                self._out.setdefault(edge.src, {}).setdefault(edge.label, []).append(
                    edge.dst
                )
                self._in_degree[edge.dst] = self._in_degree.get(edge.dst, 0) + 1
            elif op == "set_props":
                target, old = payload
                target.props = old

    # -- upsert --

    def _ensure_value_node(self, label: NodeLabel, key: str, journal: list) -> Node:
        node = self.find(label, key)
        if node is None:
            node = self._add_node(label, key, {}, journal)
        return node

    def _gc_if_orphan(self, node: Node, journal: list) -> None:
        if node.label is not NodeLabel.PUBLICATION and self._in_degree.get(node.id, 0) == 0:
            self._remove_node(node, journal)

    def upsert_publication(
        self, record: PublicationRecord, enrichment: Enrichment
    ) -> tuple[str, UpsertOutcome]:
        """Create or merge one publication and its value nodes.

        Re-upserting an identical record is a no-op; a changed record
        re-targets its scalar value edges (orphaned value nodes are
        garbage-collected) and unions its keyword edges, so previously
        found keywords are never lost.
        """
        with self._lock:
            journal: list = []
            try:
                result = self._upsert(record, enrichment, journal)
                self._check_publication(result[0])
                return result
            except InvariantViolationError:
                self._rollback(journal)
                raise

    def _upsert(
        self, record: PublicationRecord, enrichment: Enrichment, journal: list
    ) -> tuple[str, UpsertOutcome]:
        key = dedup_key(record)
        props = {
            "title": record.title,
            "authors": list(record.authors),
            "abstract": record.abstract,
            "url": record.url,
            "keywords": list(record.keywords),
            "pub_type": record.pub_type.value,
        }
        if record.doi:
            props["doi"] = record.doi
        scalar_targets = {
            EdgeLabel.PUBLISHED_IN: str(record.year),
            EdgeLabel.PUBLISHED_BY: record.source_id,
            EdgeLabel.CITED: str(record.citation_count),
            EdgeLabel.APPLIED_IN: normalize_phrase(enrichment.field_label),
        }
        keyword_props: dict[str, dict] = {}
        for rank, scored in enumerate(enrichment.related_keywords, start=1):
            phrase = normalize_phrase(scored.phrase)
            if phrase and phrase not in keyword_props:
                keyword_props[phrase] = {"rank": rank, "score": scored.score}

        pub = self.find(NodeLabel.PUBLICATION, key)
        if pub is None:
            pub = self._add_node(NodeLabel.PUBLICATION, key, props, journal)
            for edge_label, target_key in scalar_targets.items():
                target = self._ensure_value_node(EDGE_TARGET[edge_label], target_key, journal)
                self._add_edge(pub.id, target.id, edge_label, {}, journal)
            for phrase, eprops in keyword_props.items():
                target = self._ensure_value_node(NodeLabel.KEYWORD, phrase, journal)
                self._add_edge(pub.id, target.id, EdgeLabel.HAS_KEYWORD, eprops, journal)
            return pub.id, UpsertOutcome.CREATED

        changed = False
        if pub.props != props:
            journal.append(("set_props", (pub, pub.props)))
            pub.props = props
            changed = True
        for edge_label, target_key in scalar_targets.items():
            current = self.out_target(pub.id, edge_label)
            if current.key != target_key:
                self._remove_edge(self._edges[(pub.id, current.id, edge_label)], journal)
                self._gc_if_orphan(current, journal)
                target = self._ensure_value_node(EDGE_TARGET[edge_label], target_key, journal)
                self._add_edge(pub.id, target.id, edge_label, {}, journal)
                changed = True
        for phrase, eprops in keyword_props.items():
            target = self._ensure_value_node(NodeLabel.KEYWORD, phrase, journal)
            existing = self._edges.get((pub.id, target.id, EdgeLabel.HAS_KEYWORD))
            if existing is None:
                self._add_edge(pub.id, target.id, EdgeLabel.HAS_KEYWORD, eprops, journal)
                changed = True
            elif existing.props != eprops:
                journal.append(("set_props", (existing, existing.props)))
                existing.props = eprops
                changed = True
        return pub.id, UpsertOutcome.UPDATED if changed else UpsertOutcome.UNCHANGED

    # -- invariants --

    def _check_publication(self, pub_id: str) -> None:
        out = self._out.get(pub_id, {})
        for edge_label in _SCALAR_EDGES:
            targets = out.get(edge_label, [])
            if len(targets) != 1:
                raise InvariantViolationError(
                    f"publication {pub_id}: {len(targets)} {edge_label.value} edges"
                )
        for edge_label, dsts in out.items():
            for dst in dsts:
                if self._nodes[dst].label is not EDGE_TARGET[edge_label]:
                    raise InvariantViolationError(
                        f"{edge_label.value} edge to {self._nodes[dst].label.value} node"
                    )

    def validate(self) -> None:
        """Full consistency check; raises on any broken invariant."""
        for edge in self._edges.values():
            if edge.src not in self._nodes or edge.dst not in self._nodes:
                raise InvariantViolationError(f"edge endpoint missing: {edge}")
            if self._nodes[edge.src].label is not NodeLabel.PUBLICATION:
                raise InvariantViolationError(f"edge source is not a Publication: {edge}")
            if self._nodes[edge.dst].label is not EDGE_TARGET[edge.label]:
                raise InvariantViolationError(
                    f"{edge.label.value} edge must target "
                    f"{EDGE_TARGET[edge.label].value}: {edge}"
                )
        for node in self._nodes.values():
            if node.label is NodeLabel.PUBLICATION:
                self._check_publication(node.id)
            elif self._in_degree.get(node.id, 0) == 0:
                raise InvariantViolationError(
                    f"orphan value node ({node.label.value}, {node.key!r})"
                )

    # -- stats and canonical form --

    def stats(self) -> "GraphStats":
        node_counts = {label.value: 0 for label in NodeLabel}
        for node in self._nodes.values():
            node_counts[node.label.value] += 1
        edge_counts = {label.value: 0 for label in EdgeLabel}
        for edge in self._edges.values():
            edge_counts[edge.label.value] += 1
        return GraphStats(node_counts, edge_counts, len(self._nodes), len(self._edges))

    def canonical_form(self) -> tuple:
        """Isomorphism-invariant form: sorted (label, key) nodes and
        sorted (src key, edge label, dst key) edges."""
        nodes = tuple(sorted((n.label.value, n.key) for n in self._nodes.values()))
        edges = tuple(
            sorted(
                (self._nodes[e.src].key, e.label.value, self._nodes[e.dst].key)
                for e in self._edges.values()
            )
        )
        return nodes, edges


@dataclass(frozen=True)
class GraphStats:
    node_counts: dict[str, int]
    edge_counts: dict[str, int]
    total_nodes: int
    total_edges: int


def isomorphic(a: KnowledgeGraph, b: KnowledgeGraph) -> bool:
    return a.canonical_form() == b.canonical_form()


def graph_stats(kg: KnowledgeGraph) -> GraphStats:
    return kg.stats()


# -- CSV persistence --

NODES_FILE = "nodes.csv"
EDGES_FILE = "edges.csv"
_NODES_HEADER = ["node_id", "label", "key", "props_json"]
_EDGES_HEADER = ["src_id", "dst_id", "label", "props_json"]


def _props_json(props: dict) -> str:
    return json.dumps(props, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def export_csv(kg: KnowledgeGraph, directory: str | Path) -> list[Path]:
    """Write nodes.csv and edges.csv; byte-stable for the same graph."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    nodes_path = directory / NODES_FILE
    edges_path = directory / EDGES_FILE

    with open(nodes_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(_NODES_HEADER)
        for node in sorted(kg.nodes(), key=lambda n: (n.label.value, n.key)):
            writer.writerow([node.id, node.label.value, node.key, _props_json(node.props)])

    def edge_sort_key(edge: Edge):
        return (kg.get_node(edge.src).key, kg.get_node(edge.dst).key, edge.label.value)

    with open(edges_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(_EDGES_HEADER)
        for edge in sorted(kg.edges(), key=edge_sort_key):
            writer.writerow([edge.src, edge.dst, edge.label.value, _props_json(edge.props)])

    return [nodes_path, edges_path]


def _parse_props(raw: str, row: int) -> dict:
    try:
        props = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ImportSchemaError(f"props_json is not valid JSON: {exc.msg}", row) from exc
    if not isinstance(props, dict):
        raise ImportSchemaError("props_json must be a JSON object", row)
    return props


def import_csv(directory: str | Path) -> KnowledgeGraph:
    """Rebuild a graph from nodes.csv + edges.csv.

    Row numbers in errors are 1-based file lines (header is line 1).
    The result is isomorphic to the exported graph; node ids are taken
    from the file.
    """
    directory = Path(directory)
    nodes_path = directory / NODES_FILE
    edges_path = directory / EDGES_FILE
    if not nodes_path.exists() or not edges_path.exists():
        raise FileNotFoundError(f"expected {NODES_FILE} and {EDGES_FILE} in {directory}")

    kg = KnowledgeGraph()
    with open(nodes_path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != _NODES_HEADER:
            raise ImportSchemaError(f"bad nodes header: {header}", 1)
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ImportSchemaError(f"expected 4 fields, got {len(row)}", row_no)
            node_id, label_raw, key, props_raw = row
            try:
                label = NodeLabel(label_raw)
            except ValueError:
                raise ImportSchemaError(f"unknown node label {label_raw!r}", row_no) from None
            if not node_id:
                raise ImportSchemaError("empty node_id", row_no)
            if node_id in kg._nodes:
                raise ImportSchemaError(f"duplicate node_id {node_id!r}", row_no)
            if (label, key) in kg._by_key:
                raise ImportSchemaError(
                    f"duplicate node ({label_raw}, {key!r})", row_no
                )
            node = Node(node_id, label, key, _parse_props(props_raw, row_no))
            kg._nodes[node_id] = node
            kg._by_key[(label, key)] = node_id
            kg._in_degree[node_id] = 0

    with open(edges_path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != _EDGES_HEADER:
            raise ImportSchemaError(f"bad edges header: {header}", 1)
        for row_no, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ImportSchemaError(f"expected 4 fields, got {len(row)}", row_no)
            src, dst, label_raw, props_raw = row
            try:
                label = EdgeLabel(label_raw)
            except ValueError:
                raise ImportSchemaError(f"unknown edge label {label_raw!r}", row_no) from None
            if src not in kg._nodes:
                raise DanglingEdgeError(f"unknown src node {src!r}", row_no)
            if dst not in kg._nodes:
                raise DanglingEdgeError(f"unknown dst node {dst!r}", row_no)
            if (src, dst, label) in kg._edges:
                raise ImportSchemaError(f"duplicate edge ({src}, {dst}, {label_raw})", row_no)
            if kg._nodes[src].label is not NodeLabel.PUBLICATION:
                raise ImportSchemaError("edge source must be a Publication node", row_no)
            if kg._nodes[dst].label is not EDGE_TARGET[label]:
                raise ImportSchemaError(
                    f"{label_raw} edge must target {EDGE_TARGET[label].value}", row_no
                )
            edge = Edge(src, dst, label, _parse_props(props_raw, row_no))
            kg._edges[(src, dst, label)] = edge
            kg._out.setdefault(src, {}).setdefault(label, []).append(dst)
            kg._in_degree[dst] = kg._in_degree.get(dst, 0) + 1

    kg.validate()
    return kg
