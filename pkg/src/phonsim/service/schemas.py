"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class AlignRequest(BaseModel):
    ipa_a: str
    ipa_b: str
    match: int = 1
    mismatch: int = -1
    gap: int = -1


class AlignResponse(BaseModel):
    tokens_a: list[str]
    tokens_b: list[str]
    aligned_a: list[str]  # "-" marks a gap
    aligned_b: list[str]
    score: int
    normalized: float


class GeometryResponse(BaseModel):
    nodes: int
    edges: int
    payload_bytes: int
    payload_gib: float


class BudgetResponse(BaseModel):
    budget_bytes: int
    max_nodes: int
    edges_at_max: int


class ManifestResponse(BaseModel):
    format_version: int
    n: int
    num_edges: int
    match: int
    mismatch: int
    gap: int
    scheme_hash: str
    words_digest: str
    payload_digest: str
    complete: bool


class HistogramResponse(BaseModel):
    normalized: bool
    bin_edges: list[int]
    counts: list[int]
    total: int
    mean: float
    min: int
    max: int


class NodeOut(BaseModel):
    id: int
    label: str


class EdgeOut(BaseModel):
    source: int
    target: int
    weight: float


class EgoRequest(BaseModel):
    word: str
    depth: int = Field(default=3, ge=1)
    lo: float
    hi: float


class GraphResponse(BaseModel):
    node_count: int
    edge_count: int
    nodes: list[NodeOut]
    edges: list[EdgeOut]


class PathRequest(BaseModel):
    source: str
    target: str
    lo: float
    hi: float


class PathResponse(BaseModel):
    found: bool
    words: list[str]
    hops: int | None


class NeighborOut(BaseModel):
    word: str
    weight: float


class NeighborsResponse(BaseModel):
    word: str
    neighbors: list[NeighborOut]


class HealthResponse(BaseModel):
    status: str
    store_loaded: bool
    nodes: int | None = None
