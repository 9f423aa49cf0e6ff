"""HTTP query service wrapping the core package.

The service loads one edge store (plus its word list) and answers the same
queries as the CLI: histograms, ego networks, shortest paths, neighbor
lookups and pure geometry arithmetic.  A standalone /align endpoint scores
two raw IPA transcriptions, which is what an online rhyme finder needs.

Filtered views are cached per (lo, hi) range, so repeated queries against
the same weight slice do not rescan the payload.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query

from ..aligner import GAP, ScoringScheme, nw_align
from ..corpus import DEFAULT_DIGRAPHS, CorpusRow, build_inventory, encode_word, load_words
from ..errors import DataError
from ..graph import GraphView, ego_network, filter_view, shortest_path
from ..store import EdgeStore, histogram, normalize
from ..triangle import nodes_for_edge_budget, num_edges
from .schemas import (
    AlignRequest,
    AlignResponse,
    BudgetResponse,
    EdgeOut,
    EgoRequest,
    GeometryResponse,
    GraphResponse,
    HealthResponse,
    HistogramResponse,
    ManifestResponse,
    NeighborOut,
    NeighborsResponse,
    NodeOut,
    PathRequest,
    PathResponse,
)

__all__ = ["create_app"]

_VIEW_CACHE_SLOTS = 8


class _State:
    def __init__(self, store_prefix=None, words_path=None):
        self.store: EdgeStore | None = None
        self.words = None
        if store_prefix is not None:
            self.store = EdgeStore(store_prefix)
            if words_path is None:
                words_path = _default_words_path(store_prefix)
            self.words = load_words(words_path)
            self.store.check_words(self.words)
        self._views: dict[tuple[float, float], GraphView] = {}

    def view(self, lo: float, hi: float) -> GraphView:
        key = (lo, hi)
        if key not in self._views:
            if len(self._views) >= _VIEW_CACHE_SLOTS:
                self._views.pop(next(iter(self._views)))
            self._views[key] = filter_view(self.store, self.words, lo, hi)
        return self._views[key]


def _default_words_path(store_prefix: str) -> str:
    prefix = str(store_prefix)
    if prefix.endswith(".nwedges"):
        prefix = prefix[: -len(".nwedges")]
    return prefix + ".words"


def _graph_response(view: GraphView) -> GraphResponse:
    edges = [
        EdgeOut(source=u, target=v, weight=round(w, 2))
        for u in view.node_ids
        for v, w in view.adjacency[u]
        if u < v
    ]
    return GraphResponse(
        node_count=view.node_count,
        edge_count=view.edge_count,
        nodes=[NodeOut(id=i, label=view.labels[i]) for i in view.node_ids],
        edges=edges,
    )


def create_app(store_prefix=None, words_path=None) -> FastAPI:
    """Build the service; pass an edge store prefix to enable graph queries."""
    app = FastAPI(title="phonsim", version="0.1.0")
    try:
        state = _State(store_prefix, words_path)
    except (DataError, OSError) as exc:
        raise SystemExit(f"cannot serve store {store_prefix!r}: {exc}") from exc

    def require_store() -> _State:
        if state.store is None:
            raise HTTPException(status_code=409, detail="no edge store loaded")
        return state

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(
            status="ok",
            store_loaded=state.store is not None,
            nodes=state.store.n if state.store else None,
        )

    @app.post("/align", response_model=AlignResponse)
    def align(req: AlignRequest):
        scheme = ScoringScheme(req.match, req.mismatch, req.gap)
        try:
            rows = [CorpusRow("a", req.ipa_a, 0.0), CorpusRow("b", req.ipa_b, 0.0)]
            inventory = build_inventory(rows, DEFAULT_DIGRAPHS)
            word_a = encode_word(rows[0], inventory, DEFAULT_DIGRAPHS)
            word_b = encode_word(rows[1], inventory, DEFAULT_DIGRAPHS)
        except DataError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        alignment = nw_align(word_a, word_b, scheme)
        symbol = inventory.symbols
        return AlignResponse(
            tokens_a=[symbol[p] for p in word_a.phonemes],
            tokens_b=[symbol[p] for p in word_b.phonemes],
            aligned_a=["-" if a is GAP else symbol[a] for a, _ in alignment.pairs],
            aligned_b=["-" if b is GAP else symbol[b] for _, b in alignment.pairs],
            score=alignment.score,
            normalized=normalize(alignment.score, len(word_a.phonemes), len(word_b.phonemes)),
        )

    @app.get("/info/nodes/{n}", response_model=GeometryResponse)
    def info_nodes(n: int):
        if n < 1:
            raise HTTPException(status_code=422, detail="n must be >= 1")
        edges = num_edges(n)
        return GeometryResponse(
            nodes=n, edges=edges, payload_bytes=edges, payload_gib=edges / 2**30
        )

    @app.get("/info/budget/{budget_bytes}", response_model=BudgetResponse)
    def info_budget(budget_bytes: int):
        if budget_bytes < 1:
            raise HTTPException(status_code=422, detail="budget must be >= 1")
        n = nodes_for_edge_budget(budget_bytes)
        return BudgetResponse(
            budget_bytes=budget_bytes, max_nodes=n, edges_at_max=num_edges(n)
        )

    @app.get("/store/manifest", response_model=ManifestResponse)
    def store_manifest():
        st = require_store()
        return ManifestResponse(**vars(st.store.manifest))

    @app.get("/store/histogram", response_model=HistogramResponse)
    def store_histogram(normalized: bool = Query(default=False)):
        st = require_store()
        h = histogram(st.store, st.words, normalized=normalized)
        return HistogramResponse(
            normalized=h.normalized,
            bin_edges=list(h.bin_edges),
            counts=list(h.counts),
            total=h.total,
            mean=h.mean,
            min=h.min,
            max=h.max,
        )

    @app.get("/query/neighbors", response_model=NeighborsResponse)
    def neighbors(word: str, lo: float, hi: float):
        st = require_store()
        view = st.view(lo, hi)
        node = view.id_for_word(word)
        if node is None:
            raise HTTPException(
                status_code=404, detail=f"word {word!r} has no edges in range"
            )
        items = [
            NeighborOut(word=view.labels[v], weight=round(w, 2))
            for v, w in view.adjacency[node]
        ]
        return NeighborsResponse(word=word, neighbors=items)

    @app.post("/query/ego", response_model=GraphResponse)
    def ego(req: EgoRequest):
        st = require_store()
        try:
            sub = ego_network(st.view(req.lo, req.hi), req.word, req.depth)
        except DataError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return _graph_response(sub)

    @app.post("/query/path", response_model=PathResponse)
    def path(req: PathRequest):
        st = require_store()
        view = st.view(req.lo, req.hi)
        try:
            found = shortest_path(view, req.source, req.target)
        except DataError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        if found is None:
            return PathResponse(found=False, words=[], hops=None)
        return PathResponse(
            found=True, words=[view.labels[i] for i in found.nodes], hops=found.hops
        )

    return app
