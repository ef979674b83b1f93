"""Per-feature disambiguation graphs and the edge-weight probability score.

Each feature name gets two graphs: one built from excerpts where the name
is a planetary surface feature, one from excerpts where it is something
else. Nodes are feature names, feature types and keywords. ``PART_OF``
links a feature name to its type; ``APPEARED_WITH`` links a keyword to the
feature name it was seen with, weighted by co-occurrence count.

A query keyword reaches the feature node either directly, or through
another feature of the same type (keyword -> other feature -> shared type
-> feature). A path contributes the product of its edge weights; with
unit ``PART_OF`` weights that is the keyword's weight on the other feature.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

PLANETARY = "planetary"
OTHER = "other"


class NodeKind(str, Enum):
    FEATURE_NAME = "FEATURE_NAME"
    FEATURE_TYPE = "FEATURE_TYPE"
    KEYWORD = "KEYWORD"


class Relation(str, Enum):
    PART_OF = "PART_OF"
    APPEARED_WITH = "APPEARED_WITH"


@dataclass(frozen=True, order=True)
class KgNode:
    kind: NodeKind
    label: str

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.label}"

    @classmethod
    def parse(cls, text: str) -> "KgNode":
        kind, sep, label = text.partition(":")
        if not sep or not label:
            raise ValueError(f"bad node {text!r}, expected KIND:label")
        return cls(NodeKind(kind.strip()), label)


@dataclass(frozen=True)
class KgEdge:
    source: KgNode
    target: KgNode
    relation: Relation
    weight: int

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("edge weight must be >= 1")
        if self.relation is Relation.PART_OF:
            if (self.source.kind, self.target.kind) != (NodeKind.FEATURE_NAME, NodeKind.FEATURE_TYPE):
                raise ValueError("PART_OF runs from a feature name to a feature type")
        elif NodeKind.KEYWORD not in (self.source.kind, self.target.kind):
            raise ValueError("APPEARED_WITH must touch a keyword node")


def feature_node(name: str) -> KgNode:
    return KgNode(NodeKind.FEATURE_NAME, name)


def type_node(name: str) -> KgNode:
    return KgNode(NodeKind.FEATURE_TYPE, name)


def keyword_node(term: str) -> KgNode:
    return KgNode(NodeKind.KEYWORD, term)


class KnowledgeGraph:
    """Weighted undirected multigraph keyed by (relation, source, target)."""

    def __init__(self):
        self._weights: dict[tuple[Relation, KgNode, KgNode], int] = {}
        self._nodes: set[KgNode] = set()
        self._adj: dict[KgNode, dict[KgNode, int]] = defaultdict(dict)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._weights == other._weights

    def copy(self) -> "KnowledgeGraph":
        g = KnowledgeGraph()
        g._nodes = set(self._nodes)
        g._weights = dict(self._weights)
        g._adj = defaultdict(dict, {k: dict(v) for k, v in self._adj.items()})
        return g

    @property
    def nodes(self) -> frozenset[KgNode]:
        return frozenset(self._nodes)

    def keyword_labels(self) -> set[str]:
        return {n.label for n in self._nodes if n.kind is NodeKind.KEYWORD}

    def add_node(self, node: KgNode) -> None:
        self._nodes.add(node)

    def add_edge(self, source: KgNode, target: KgNode, relation: Relation, weight: int = 1) -> None:
        KgEdge(source, target, relation, weight)
        key = (relation, source, target)
        self._nodes.update((source, target))
        self._weights[key] = self._weights.get(key, 0) + weight
        self._adj[source][target] = self._adj[source].get(target, 0) + weight
        self._adj[target][source] = self._adj[target].get(source, 0) + weight

    def weight(self, source: KgNode, target: KgNode, relation: Relation | None = None) -> int:
        if relation is None:
            return self._adj.get(source, {}).get(target, 0)
        return self._weights.get((relation, source, target), 0)

    def neighbors(self, node: KgNode) -> dict[KgNode, int]:
        return dict(self._adj.get(node, {}))

    def edges(self) -> Iterator[KgEdge]:
        for (rel, s, t), w in sorted(self._weights.items(), key=lambda kv: (kv[0][0].value, kv[0][1], kv[0][2])):
            yield KgEdge(s, t, rel, w)

    def merge(self, other: "KnowledgeGraph") -> "KnowledgeGraph":
        """Weight-additive union; associative and commutative."""
        out = self.copy()
        out._nodes |= other._nodes
        for e in other.edges():
            out.add_edge(e.source, e.target, e.relation, e.weight)
        return out

    def path_weight(self, keyword: str, feature: str) -> int:
        """Summed weight of the keyword's paths to ``feature``.

        Direct ``APPEARED_WITH`` edges count their weight. Paths through
        another feature node F of a type T shared with ``feature`` count
        w(k, F) * w(F, T) * w(feature, T).
        """
        k = keyword_node(keyword)
        target = feature_node(feature)
        if k not in self._nodes or target not in self._nodes:
            return 0
        total = self.weight(k, target, Relation.APPEARED_WITH)
        target_types = {n: w for n, w in self._adj[target].items() if n.kind is NodeKind.FEATURE_TYPE}
        if not target_types:
            return total
        for other, w_kf in self._adj[k].items():
            if other.kind is not NodeKind.FEATURE_NAME or other == target:
                continue
            for t, w_ft in self._adj[other].items():
                if t in target_types:
                    total += w_kf * w_ft * target_types[t]
        return total


@dataclass
class DisambiguationGraphPair:
    feature_name: str
    body: str
    feature_type: str
    planetary: KnowledgeGraph = field(default_factory=KnowledgeGraph)
    other: KnowledgeGraph = field(default_factory=KnowledgeGraph)

    def __post_init__(self):
        fn = feature_node(self.feature_name)
        self.planetary.add_node(fn)
        self.other.add_node(fn)
        tn = type_node(self.feature_type)
        for g in (self.planetary, self.other):
            if g.weight(fn, tn, Relation.PART_OF) == 0:
                g.add_edge(fn, tn, Relation.PART_OF)

    def graph(self, label: str) -> KnowledgeGraph:
        if label == PLANETARY:
            return self.planetary
        if label == OTHER:
            return self.other
        raise ValueError(f"label must be {PLANETARY!r} or {OTHER!r}, got {label!r}")

    def swapped(self) -> "DisambiguationGraphPair":
        return DisambiguationGraphPair(self.feature_name, self.body, self.feature_type,
                                       self.other.copy(), self.planetary.copy())


def add_observation(pair: DisambiguationGraphPair, keywords: Iterable[str], label: str,
                    source_feature: str | None = None, source_type: str | None = None
                    ) -> DisambiguationGraphPair:
    """Count one labeled excerpt's keywords into the graph chosen by ``label``.

    ``source_feature`` records an excerpt about a different feature (e.g.
    another crater) so its keywords can reach this one through the shared
    feature type.
    """
    keywords = list(dict.fromkeys(keywords))
    if not keywords:
        raise ValueError("observation needs at least one keyword")
    g = pair.graph(label)
    name = source_feature or pair.feature_name
    fn = feature_node(name)
    if name != pair.feature_name:
        ftype = source_type or pair.feature_type
        if g.weight(fn, type_node(ftype), Relation.PART_OF) == 0:
            g.add_edge(fn, type_node(ftype), Relation.PART_OF)
    for kw in keywords:
        g.add_edge(keyword_node(kw), fn, Relation.APPEARED_WITH)
    return pair


def graph_weight(g: KnowledgeGraph, keywords: Iterable[str], feature: str) -> int:
    return sum(g.path_weight(k, feature) for k in dict.fromkeys(keywords))


def kg_probability(pair: DisambiguationGraphPair, keywords: Iterable[str]) -> float:
    """Planetary share of the keywords' path weight; 0.5 when neither graph knows them."""
    keywords = list(keywords)
    wp = graph_weight(pair.planetary, keywords, pair.feature_name)
    wo = graph_weight(pair.other, keywords, pair.feature_name)
    if wp + wo == 0:
        return 0.5
    return wp / (wp + wo)


def shared_keyword_count(ga: KnowledgeGraph, gb: KnowledgeGraph) -> tuple[int, int, int]:
    a, b = ga.keyword_labels(), gb.keyword_labels()
    return len(a), len(b), len(a & b)


# ---------------------------------------------------------------- files

def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", text).strip("_")


def graph_paths(directory: str | Path, feature_name: str, body: str) -> tuple[Path, Path]:
    stem = f"{_slug(feature_name)}__{_slug(body)}"
    d = Path(directory)
    return d / f"{stem}.{PLANETARY}.graph", d / f"{stem}.{OTHER}.graph"


def _write_graph(g: KnowledgeGraph, path: Path, pair: DisambiguationGraphPair) -> None:
    lines = [f"{pair.feature_name} | {pair.body} | {pair.feature_type}"]
    for e in g.edges():
        lines.append(f"{e.relation.value} | {e.source} | {e.target} | {e.weight}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _read_graph(path: Path) -> tuple[tuple[str, str, str], KnowledgeGraph]:
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    header = tuple(p.strip() for p in lines[0].split("|"))
    if len(header) != 3:
        raise ValueError(f"{path}:1: header must be 'feature | body | type'")
    g = KnowledgeGraph()
    for lineno, ln in enumerate(lines[1:], 2):
        parts = [p.strip() for p in ln.split("|")]
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 'relation | from | to | weight'")
        rel, src, dst, w = parts
        g.add_edge(KgNode.parse(src), KgNode.parse(dst), Relation(rel), int(w))
    return header, g


def save_pair(pair: DisambiguationGraphPair, directory: str | Path) -> tuple[Path, Path]:
    Path(directory).mkdir(parents=True, exist_ok=True)
    p_path, o_path = graph_paths(directory, pair.feature_name, pair.body)
    _write_graph(pair.planetary, p_path, pair)
    _write_graph(pair.other, o_path, pair)
    return p_path, o_path


def load_pair(directory: str | Path, feature_name: str, body: str) -> DisambiguationGraphPair:
    p_path, o_path = graph_paths(directory, feature_name, body)
    (name, b, ftype), planetary = _read_graph(p_path)
    header, other = _read_graph(o_path)
    if header != (name, b, ftype):
        raise ValueError(f"graph headers disagree: {p_path} vs {o_path}")
    return DisambiguationGraphPair(name, b, ftype, planetary, other)
