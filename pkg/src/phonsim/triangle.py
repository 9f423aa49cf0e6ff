"""Linear indexing of the upper-triangular adjacency matrix.

Edges of the complete undirected graph on n nodes (no self-loops) are
enumerated row-major: (0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1).
The position of an edge in that enumeration is its linear index, which
doubles as its byte offset in an edge store.

Row recovery from an index uses the closed form floor(z - sqrt(z^2 - 2*idx))
with z = n - 1/2, evaluated in 64-bit floats, and is then corrected against
exact integer prefix sums so that results never depend on floating-point
rounding.  All counting arithmetic uses Python's unbounded integers (or
int64 in the vectorized variants, safe for n well beyond 10^7).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "num_edges",
    "prefix_count",
    "edges_before_row",
    "row_of",
    "col_of",
    "index_of",
    "rows_of_array",
    "cols_of_array",
    "indices_of_array",
    "nodes_for_edge_budget",
    "plan_block_width",
]


def num_edges(n: int) -> int:
    """Number of undirected edges (upper-triangular entries) for n nodes."""
    if n < 1:
        raise ValueError(f"node count must be >= 1, got {n}")
    return n * (n - 1) // 2


def edges_before_row(r: int, n: int) -> int:
    """Number of edges in rows 0..r-1, i.e. the linear index where row r starts."""
    # r * (2n - r - 1) is always even, so // is exact
    return r * (2 * n - r - 1) // 2


def prefix_count(r: int, n: int) -> int:
    """Edges traversed up to and including the end of row r.

    Row r holds n-1-r entries; rows run 0..n-2.
    """
    if not 0 <= r <= n - 2:
        raise ValueError(f"row {r} out of range for n={n} (rows run 0..{n - 2})")
    return edges_before_row(r + 1, n)


def row_of(idx: int, n: int) -> int:
    """Row of the edge with linear index idx.

    Float recovery first, then an exact integer bracket correction so that
    edges_before_row(r) <= idx < edges_before_row(r+1) holds exactly.
    """
    total = num_edges(n)
    if not 0 <= idx < total:
        raise ValueError(f"edge index {idx} out of range [0, {total}) for n={n}")
    z = n - 0.5
    r = math.floor(z - math.sqrt(z * z - 2.0 * idx))
    r = min(max(r, 0), n - 2)
    while r > 0 and idx < edges_before_row(r, n):
        r -= 1
    while idx >= edges_before_row(r + 1, n):
        r += 1
    return r


def col_of(idx: int, n: int, r: int) -> int:
    """Column of edge idx, given its row r (r must equal row_of(idx, n))."""
    before = edges_before_row(r, n)
    if not (0 <= r <= n - 2 and before <= idx < edges_before_row(r + 1, n)):
        raise ValueError(f"row {r} is inconsistent with edge index {idx} for n={n}")
    return r + 1 + (idx - before)


def index_of(r: int, c: int, n: int) -> int:
    """Linear index of edge (r, c); requires 0 <= r < c <= n-1."""
    if not 0 <= r < c <= n - 1:
        raise ValueError(f"invalid edge ({r}, {c}) for n={n}: need 0 <= r < c <= n-1")
    return edges_before_row(r, n) + (c - r - 1)


def rows_of_array(idx: np.ndarray, n: int) -> np.ndarray:
    """Vectorized row_of over an int64 index array (indices must be in range)."""
    idx = np.asarray(idx, dtype=np.int64)
    z = n - 0.5
    r = np.floor(z - np.sqrt(z * z - 2.0 * idx.astype(np.float64))).astype(np.int64)
    np.clip(r, 0, n - 2, out=r)
    for _ in range(64):
        before = r * (2 * n - r - 1) // 2
        too_high = idx < before
        too_low = idx >= before + (n - 1 - r)
        if not too_high.any() and not too_low.any():
            return r
        r = r - too_high.astype(np.int64) + too_low.astype(np.int64)
    raise AssertionError("row bracket correction did not converge")


def cols_of_array(idx: np.ndarray, n: int, r: np.ndarray) -> np.ndarray:
    """Vectorized col_of; r must be rows_of_array(idx, n)."""
    idx = np.asarray(idx, dtype=np.int64)
    return r + 1 + (idx - r * (2 * n - r - 1) // 2)


def indices_of_array(r: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """Vectorized index_of over row/column arrays (must satisfy r < c <= n-1)."""
    r = np.asarray(r, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    return r * (2 * n - r - 1) // 2 + (c - r - 1)


def nodes_for_edge_budget(budget_bytes: int, bytes_per_edge: int = 1) -> int:
    """Largest n whose full edge set fits the byte budget.

    Inverts num_edges via n = 1/2 + sqrt(1/4 + 2*edges), then corrects with
    exact integer arithmetic.
    """
    if budget_bytes < 1:
        raise ValueError("budget must be >= 1 byte")
    if bytes_per_edge < 1:
        raise ValueError("bytes_per_edge must be >= 1")
    cap = budget_bytes // bytes_per_edge
    n = max(1, int(0.5 + math.sqrt(0.25 + 2.0 * cap)))
    while num_edges(n) > cap:
        n -= 1
    while num_edges(n + 1) <= cap:
        n += 1
    return n


def plan_block_width(q: int, shared_mem_per_block_bytes: int, max_threads: int = 1024) -> int:
    """Widest work unit (threads per block) whose per-thread (q+1)^2-byte
    score matrices fit the shared-memory budget, capped by the thread limit."""
    if q < 1:
        raise ValueError("maximum word length must be >= 1")
    matrix_bytes = (q + 1) * (q + 1)
    if matrix_bytes > shared_mem_per_block_bytes:
        raise ValueError(
            f"word too long for block planning: one score matrix needs "
            f"{matrix_bytes} bytes but only {shared_mem_per_block_bytes} are available"
        )
    return min(max_threads, shared_mem_per_block_bytes // matrix_bytes)
