"""Direction-augmented labeled graphs: sentence parses and semantic lexicons."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import TokenizedSentence, Vocabulary

log = logging.getLogger(__name__)

SELF = "self"
UNK_LABEL = "unk_label"
RELATIONS = ("synonym", "antonym", "hypernym", "hyponym")
_MIRROR = {"synonym": "synonym", "antonym": "antonym", "hypernym": "hyponym", "hyponym": "hypernym"}


class EdgeDirection(enum.IntEnum):
    FORWARD = 0
    INVERSE = 1
    SELF_LOOP = 2


class LabelSet:
    """Ordered label inventory.

    ``"self"`` always has id 0. While unfrozen, :meth:`add` grows the set;
    once frozen, unknown labels resolve to ``"unk_label"`` if present.
    """

    def __init__(self, labels: Iterable[str] = (), frozen: bool = False):
        self.labels: list[str] = []
        self.index: dict[str, int] = {}
        self.frozen = False
        self.add(SELF)
        for label in labels:
            self.add(label)
        self.frozen = frozen

    @classmethod
    def for_dependencies(cls, labels: Iterable[str] = ()) -> "LabelSet":
        return cls([UNK_LABEL, *labels])

    def add(self, label: str) -> int:
        if label in self.index:
            return self.index[label]
        if self.frozen:
            raise KeyError(f"label {label!r} not in frozen label set")
        self.index[label] = len(self.labels)
        self.labels.append(label)
        return self.index[label]

    def get(self, label: str) -> int:
        if label in self.index:
            return self.index[label]
        if not self.frozen:
            return self.add(label)
        if UNK_LABEL in self.index:
            return self.index[UNK_LABEL]
        raise KeyError(f"label {label!r} not in frozen label set")

    def freeze(self) -> "LabelSet":
        self.frozen = True
        return self

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.index

    def __getitem__(self, i: int) -> str:
        return self.labels[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelSet) and self.labels == other.labels

    def __repr__(self) -> str:
        return f"LabelSet({self.labels!r})"


@dataclass
class Graph:
    """Edges are parallel integer arrays; edge ``e`` carries a message from
    ``src[e]`` into ``dst[e]``."""

    num_nodes: int
    src: np.ndarray
    dst: np.ndarray
    label: np.ndarray
    direction: np.ndarray
    label_set: LabelSet
    _offsets: np.ndarray = field(init=False, repr=False)
    _order: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.src = np.asarray(self.src, dtype=np.int64)
        self.dst = np.asarray(self.dst, dtype=np.int64)
        self.label = np.asarray(self.label, dtype=np.int64)
        self.direction = np.asarray(self.direction, dtype=np.int64)
        n = self.num_nodes
        if len(self.src) and (self.src.min() < 0 or self.src.max() >= n
                              or self.dst.min() < 0 or self.dst.max() >= n):
            raise ValueError("edge endpoint out of range")
        self._order = np.lexsort((self.direction, self.label, self.src, self.dst))
        counts = np.bincount(self.dst, minlength=n)
        self._offsets = np.concatenate([[0], np.cumsum(counts)])

    @property
    def direction_masks(self) -> list[np.ndarray]:
        masks = getattr(self, "_masks", None)
        if masks is None:
            masks = self._masks = [self.direction == r for r in range(len(EdgeDirection))]
        return masks

    @property
    def num_edges(self) -> int:
        return len(self.src)

    def edges(self) -> list[tuple[int, int, int, EdgeDirection]]:
        return [(int(s), int(d), int(l), EdgeDirection(int(r)))
                for s, d, l, r in zip(self.src, self.dst, self.label, self.direction)]

    def in_edges(self, node: int) -> np.ndarray:
        """Indices of edges flowing into ``node`` in (src, label, direction) order."""
        if not 0 <= node < self.num_nodes:
            raise IndexError(f"node {node} out of range [0, {self.num_nodes})")
        return self._order[self._offsets[node]:self._offsets[node + 1]]

    def in_degree(self) -> np.ndarray:
        return np.diff(self._offsets)

    def count(self, direction: EdgeDirection | None = None, label: str | None = None) -> int:
        mask = np.ones(self.num_edges, dtype=bool)
        if direction is not None:
            mask &= self.direction == int(direction)
        if label is not None:
            if label not in self.label_set:
                return 0
            mask &= self.label == self.label_set.index[label]
        return int(mask.sum())


def neighborhood(graph: Graph, node: int) -> list[tuple[int, int, EdgeDirection]]:
    """Messages flowing into ``node`` (self-loop included) as
    ``(neighbor, label id, direction)``, ordered by neighbor then label."""
    idx = graph.in_edges(node)
    return [(int(graph.src[e]), int(graph.label[e]), EdgeDirection(int(graph.direction[e])))
            for e in idx]


@dataclass
class SentenceGraph(Graph):
    node_word_ids: np.ndarray = None

    @property
    def word_ids(self) -> np.ndarray:
        return self.node_word_ids


def build_sentence_graph(sentence: TokenizedSentence, label_set: LabelSet) -> SentenceGraph:
    n = len(sentence.raw_heads)
    src, dst, lab, dirs = [], [], [], []
    for i, (h, name) in enumerate(zip(sentence.raw_heads, sentence.raw_labels)):
        if h < 0 or h > n or h == i + 1:
            raise ValueError(f"token {i + 1}: head index {h} out of range")
        if h == 0:
            continue
        lid = label_set.get(name)
        src += [h - 1, i]
        dst += [i, h - 1]
        lab += [lid, lid]
        dirs += [EdgeDirection.FORWARD, EdgeDirection.INVERSE]
    self_id = label_set.index[SELF]
    src += range(n)
    dst += range(n)
    lab += [self_id] * n
    dirs += [EdgeDirection.SELF_LOOP] * n
    ids = sentence.token_ids if sentence.token_ids is not None else [-1] * n
    return SentenceGraph(n, src, dst, lab, dirs, label_set,
                         node_word_ids=np.asarray(ids, dtype=np.int64))


def discover_labels(sentences: Iterable[TokenizedSentence]) -> LabelSet:
    """First pass over a corpus collecting the dependency label inventory,
    frozen on return."""
    labels = LabelSet.for_dependencies()
    for s in sentences:
        for h, name in zip(s.raw_heads, s.raw_labels):
            if h != 0:
                labels.add(name)
    return labels.freeze()


@dataclass
class SemanticGraph(Graph):
    dropped: int = 0

    @property
    def relation_labels(self) -> LabelSet:
        return self.label_set

    def connected(self) -> np.ndarray:
        """Word ids with at least one non-self edge flowing in."""
        mask = self.direction != EdgeDirection.SELF_LOOP
        return np.unique(self.dst[mask])


def relation_label_set() -> LabelSet:
    return LabelSet(RELATIONS, frozen=True)


def build_semantic_graph(
    pairs: Iterable[tuple[str, str, str]],
    vocab: Vocabulary,
) -> SemanticGraph:
    """Vocabulary-wide typed graph from ``(relation, word, word)`` triples.

    Synonym/antonym pairs are symmetrised and every hypernym/hyponym pair
    also produces its mirror. Pairs touching an out-of-vocabulary word are
    dropped and tallied in ``graph.dropped``.
    """
    labels = relation_label_set()
    seen: set[tuple[int, int, int, int]] = set()
    dropped = 0
    for relation, w1, w2 in pairs:
        rel = relation.lower()
        if rel not in _MIRROR:
            raise ValueError(f"unknown relation {relation!r}")
        if w1 not in vocab or w2 not in vocab:
            dropped += 1
            continue
        u, v = vocab.index[w1], vocab.index[w2]
        if u == v:
            continue
        r, m = labels.index[rel], labels.index[_MIRROR[rel]]
        for a, b, lid in ((u, v, r), (v, u, m)):
            seen.add((a, b, lid, EdgeDirection.FORWARD))
            seen.add((b, a, lid, EdgeDirection.INVERSE))
    if dropped:
        log.info("dropped %d lexicon pairs with out-of-vocabulary words", dropped)
    edges = sorted(seen)
    n = len(vocab)
    self_id = labels.index[SELF]
    src = [e[0] for e in edges] + list(range(n))
    dst = [e[1] for e in edges] + list(range(n))
    lab = [e[2] for e in edges] + [self_id] * n
    dirs = [int(e[3]) for e in edges] + [EdgeDirection.SELF_LOOP] * n
    return SemanticGraph(n, src, dst, lab, dirs, labels, dropped=dropped)


def relation_subset(graph: SemanticGraph, relations: Sequence[str]) -> SemanticGraph:
    """Keep only edges of the given relations (self-loops always survive)."""
    wanted = {r.lower() for r in relations}
    unknown = wanted - set(RELATIONS)
    if unknown:
        raise ValueError(f"unknown relations: {sorted(unknown)}")
    ids = [graph.label_set.index[r] for r in wanted] + [graph.label_set.index[SELF]]
    keep = np.isin(graph.label, ids)
    if not np.any(keep & (graph.direction != EdgeDirection.SELF_LOOP)):
        log.warning("relation filter %s leaves no relation edges", sorted(wanted))
    return SemanticGraph(graph.num_nodes, graph.src[keep], graph.dst[keep], graph.label[keep],
                         graph.direction[keep], graph.label_set, dropped=graph.dropped)


def local_subgraph(graph: Graph, centers: Sequence[int]) -> tuple[Graph, np.ndarray]:
    """Graph made of the edges flowing into ``centers``.

    Returns the subgraph (nodes renumbered; the first ``len(centers)`` local
    nodes are the centers in order) and the array mapping local to global
    node ids. At one propagation layer the centers' outputs on the subgraph
    equal their outputs on the full graph.
    """
    centers = np.asarray(centers, dtype=np.int64)
    if len(np.unique(centers)) != len(centers):
        raise ValueError("centers must be distinct")
    idx = np.concatenate([graph.in_edges(int(c)) for c in centers]) if len(centers) else np.zeros(0, np.int64)
    others = np.setdiff1d(np.unique(graph.src[idx]), centers)
    nodes = np.concatenate([centers, others])
    local = {int(g): i for i, g in enumerate(nodes)}
    remap = np.vectorize(local.__getitem__, otypes=[np.int64])
    src = remap(graph.src[idx]) if len(idx) else idx
    dst = remap(graph.dst[idx]) if len(idx) else idx
    sub = Graph(len(nodes), src, dst, graph.label[idx], graph.direction[idx], graph.label_set)
    return sub, nodes


def read_lexicon(path) -> list[tuple[str, str, str]]:
    """``relation<TAB>word1<TAB>word2`` lines; ``#`` starts a comment line."""
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'relation<TAB>word1<TAB>word2'")
            rel = parts[0].strip().lower()
            if rel not in _MIRROR:
                raise ValueError(f"{path}:{lineno}: unknown relation {parts[0]!r}")
            pairs.append((rel, parts[1], parts[2]))
    return pairs


def write_lexicon(pairs: Iterable[tuple[str, str, str]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for rel, w1, w2 in pairs:
            f.write(f"{rel}\t{w1}\t{w2}\n")
