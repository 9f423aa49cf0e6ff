"""Filtered graph views over an edge store, and the queries they answer.

A view materializes the edges whose normalized weight falls in an inclusive
range, as symmetric adjacency lists keyed by word index.  Queries (ego
networks, shortest paths) run on the view; exports write Gephi-compatible
CSV (and optionally GEXF) files.
"""

from __future__ import annotations

import csv
import pathlib
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import quoteattr

import numpy as np

from .corpus import EncodedWord
from .errors import DataError
from .store import EdgeStore
from .triangle import cols_of_array, rows_of_array

__all__ = ["GraphView", "Path", "filter_view", "ego_network",
           "shortest_path", "export_csv", "export_gexf"]


@dataclass
class GraphView:
    """Undirected weighted graph induced by a normalized-weight filter.

    Only nodes with at least one passing edge are retained.  Adjacency lists
    are sorted by neighbor index, so traversals are deterministic.
    """

    node_ids: tuple[int, ...]
    adjacency: dict[int, list[tuple[int, float]]]
    labels: dict[int, str]
    filter_lo: float
    filter_hi: float
    _id_by_label: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._id_by_label:
            self._id_by_label = {label: i for i, label in self.labels.items()}

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.adjacency.values()) // 2

    def id_for_word(self, word: str) -> int | None:
        return self._id_by_label.get(word)

    def has_edge(self, u: int, v: int) -> bool:
        return any(nbr == v for nbr, _ in self.adjacency.get(u, ()))


@dataclass(frozen=True)
class Path:
    """A hop path through a view; consecutive nodes are adjacent."""

    nodes: tuple[int, ...]

    @property
    def hops(self) -> int:
        return len(self.nodes) - 1



def filter_view(
    store: EdgeStore,
    words: Sequence[EncodedWord],
    lo: float,
    hi: float,
) -> GraphView:
    """Materialize the subgraph with normalized weights in [lo, hi].

    One streaming pass over the payload; membership uses the same float64
    arithmetic as ``normalize``, so it matches a scalar scan exactly.
    """
    if lo > hi:
        raise ValueError(f"empty filter range: lo={lo} > hi={hi}")
    if not store.complete:
        raise DataError("cannot build a view over an incomplete store")
    store.check_words(words)
    lengths = np.array([len(w.phonemes) for w in words], dtype=np.int64)
    adjacency: dict[int, list[tuple[int, float]]] = {}
    for start, block in store.iter_blocks():
        idx = np.arange(start, start + block.size, dtype=np.int64)
        rows = rows_of_array(idx, store.n)
        cols = cols_of_array(idx, store.n, rows)
        weights = (100.0 * block) / np.maximum(lengths[rows], lengths[cols])
        keep = (weights >= lo) & (weights <= hi)
        for u, v, w in zip(rows[keep].tolist(), cols[keep].tolist(), weights[keep].tolist()):
            adjacency.setdefault(u, []).append((v, w))
            adjacency.setdefault(v, []).append((u, w))
    for adj in adjacency.values():
        adj.sort()
    node_ids = tuple(sorted(adjacency))
    labels = {i: words[i].word for i in node_ids}
    return GraphView(node_ids, adjacency, labels, lo, hi)


def ego_network(view: GraphView, seed_word: str, depth: int) -> GraphView:
    """Induced subgraph on every node within ``depth`` hops of the seed.

    All view edges among the retained nodes are kept, including those
    between two outermost nodes.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    seed = view.id_for_word(seed_word)
    if seed is None:
        raise DataError(f"word {seed_word!r} has no edges in the filtered view")
    kept = {seed}
    frontier = [seed]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for v, _ in view.adjacency[u]:
                if v not in kept:
                    kept.add(v)
                    nxt.append(v)
        if not nxt:
            break
        frontier = nxt
    adjacency = {
        u: [(v, w) for v, w in view.adjacency[u] if v in kept] for u in sorted(kept)
    }
    node_ids = tuple(sorted(kept))
    labels = {i: view.labels[i] for i in node_ids}
    return GraphView(node_ids, adjacency, labels, view.filter_lo, view.filter_hi)


def shortest_path(view: GraphView, from_word: str, to_word: str) -> Path | None:
    """Minimum-hop path by breadth-first search; None when disconnected.

    Neighbors expand in ascending index order, so tie-breaking is
    deterministic.
    """
    src = view.id_for_word(from_word)
    if src is None:
        raise DataError(f"word {from_word!r} has no edges in the filtered view")
    dst = view.id_for_word(to_word)
    if dst is None:
        raise DataError(f"word {to_word!r} has no edges in the filtered view")
    if src == dst:
        return Path((src,))
    parent: dict[int, int] = {src: src}
    queue: deque[int] = deque([src])
    while queue:
        u = queue.popleft()
        for v, _ in view.adjacency[u]:
            if v in parent:
                continue
            parent[v] = u
            if v == dst:
                nodes = [v]
                while nodes[-1] != src:
                    nodes.append(parent[nodes[-1]])
                nodes.reverse()
                return Path(tuple(nodes))
            queue.append(v)
    return None


def export_csv(view: GraphView, nodes_path: str | pathlib.Path, edges_path: str | pathlib.Path) -> None:
    """Write Gephi-importable node and edge tables.

    Nodes: ``Id,Label`` sorted by id.  Edges: ``Source,Target,Weight,Type``
    with Source < Target, sorted, weights printed with 2 decimals, Type
    fixed to Undirected.  Output is byte-identical across runs.
    """
    if not view.node_ids:
        raise DataError("empty view: nothing to export")
    with open(nodes_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["Id", "Label"])
        for i in view.node_ids:
            writer.writerow([i, view.labels[i]])
    with open(edges_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["Source", "Target", "Weight", "Type"])
        for u in view.node_ids:
            for v, w in view.adjacency[u]:
                if u < v:
                    writer.writerow([u, v, f"{w:.2f}", "Undirected"])


def export_gexf(view: GraphView, path: str | pathlib.Path) -> None:
    """Minimal static undirected GEXF export with edge weights."""
    if not view.node_ids:
        raise DataError("empty view: nothing to export")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<gexf xmlns="http://gexf.net/1.2" version="1.2">',
        '  <graph mode="static" defaultedgetype="undirected">',
        "    <nodes>",
    ]
    for i in view.node_ids:
        lines.append(f'      <node id="{i}" label={quoteattr(view.labels[i])} />')
    lines.append("    </nodes>")
    lines.append("    <edges>")
    edge_id = 0
    for u in view.node_ids:
        for v, w in view.adjacency[u]:
            if u < v:
                lines.append(
                    f'      <edge id="{edge_id}" source="{u}" target="{v}" weight="{w:.2f}" />'
                )
                edge_id += 1
    lines.append("    </edges>")
    lines.append("  </graph>")
    lines.append("</gexf>")
    pathlib.Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
