"""All-pairs alignment scores in exact row-major edge order.

The n(n-1)/2 edge scores are produced in contiguous linear-index chunks.
Each chunk is scored by a numpy kernel that sweeps the score-matrix rows for
its whole batch of word pairs at once, laid out so that every matrix column
is one contiguous vector across the batch.  All arithmetic is integer, so
chunk results are bit-identical to the scalar dynamic program regardless of
chunking, worker count or scheduling.

Chunks are committed to the sink strictly in order: with one worker they are
computed inline, otherwise a process pool returns them in submission order.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .aligner import DEFAULT_SCHEME, ScoringScheme
from .corpus import EncodedWord
from .errors import DataError
from .triangle import cols_of_array, num_edges, rows_of_array

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "ComputePlan",
    "ComputeStats",
    "preflight_range_check",
    "compute_all_pairs",
]

DEFAULT_CHUNK_SIZE = 65536  # edges per work unit


@dataclass(frozen=True)
class ComputePlan:
    """How to partition and parallelize one all-pairs run."""

    n: int
    chunk_size: int = DEFAULT_CHUNK_SIZE
    worker_count: int = 1
    scheme: ScoringScheme = DEFAULT_SCHEME

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two words")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if self.worker_count < 1:
            raise ValueError("worker_count must be positive")

    def chunks(self) -> Iterator[tuple[int, int]]:
        """Contiguous (start, end) ranges partitioning [0, num_edges) in order."""
        total = num_edges(self.n)
        for start in range(0, total, self.chunk_size):
            yield start, min(start + self.chunk_size, total)


@dataclass
class ComputeStats:
    edges_written: int
    wall_time: float
    min_score: int
    max_score: int
    mean_score: float


def preflight_range_check(words: Sequence[EncodedWord], scheme: ScoringScheme) -> int:
    """Verify every achievable score fits a signed 8-bit byte; returns the
    maximum word length q.

    An alignment of words no longer than q has at most q scored symbol pairs
    and at most 2q gaps, so [min(0, 2q*gap, q*min_sim), max(0, 2q*gap,
    q*max_sim)] bounds all scores.  Narrowing is checked, never saturating:
    a scheme that could overflow is a configuration error.
    """
    if not words:
        raise ValueError("word list is empty")
    q = max(len(w.phonemes) for w in words)
    lo = min(0, 2 * q * scheme.gap, q * scheme.min_similarity)
    hi = max(0, 2 * q * scheme.gap, q * scheme.max_similarity)
    problems = []
    if lo < -128:
        problems.append(f"minimum achievable score {lo} < -128")
    if hi > 127:
        problems.append(f"maximum achievable score {hi} > 127")
    if problems:
        raise DataError(
            "scores would overflow 8-bit storage for max word length "
            f"{q}: {'; '.join(problems)}"
        )
    return q


def _pack_words(words: Sequence[EncodedWord], q: int) -> tuple[np.ndarray, np.ndarray]:
    """Pad phoneme-ID sequences into an (n, q) int32 matrix plus lengths."""
    n = len(words)
    ids = np.zeros((n, q), dtype=np.int32)
    lengths = np.empty(n, dtype=np.int32)
    for i, w in enumerate(words):
        lengths[i] = len(w.phonemes)
        ids[i, : len(w.phonemes)] = w.phonemes
    return ids, lengths


def _similarity_matrix(scheme: ScoringScheme, size: int) -> np.ndarray:
    sim = np.full((size, size), scheme.mismatch, dtype=np.int32)
    np.fill_diagonal(sim, scheme.match)
    for (a, b), value in scheme.overrides.items():
        if a < size and b < size:
            sim[a, b] = value
            sim[b, a] = value
    return sim


def _nw_batch(
    a_ids: np.ndarray,
    a_len: np.ndarray,
    b_ids: np.ndarray,
    b_len: np.ndarray,
    sim: np.ndarray,
    gap: int,
) -> np.ndarray:
    """Score a batch of pairs; returns int32 scores.

    Score matrices for the whole batch are swept row by row, transposed as
    (column, pair) so each column is one contiguous vector across the batch.
    Per matrix row, the diagonal and from-above candidates are two bulk
    vector ops; the left-to-right gap chain then runs column by column over
    contiguous slices.  All arithmetic is integer, so results are exactly
    the scalar dynamic program's.  Rows beyond a pair's own lengths are
    computed on padding but never read: the result is captured from row
    len(a) at column len(b), and no cell depends on cells to its right.
    Cells are preflight-bounded to [-128, 127], so int16 has ample headroom.
    """
    batch = a_ids.shape[0]
    qa = int(a_len.max())
    qb = int(b_len.max())
    size = sim.shape[0]
    sim_flat = np.ascontiguousarray(sim).astype(np.int16).ravel()
    idx_dtype = np.int16 if size * size <= 32767 else np.int32
    a_codes = (a_ids[:, :qa] * np.int32(size)).astype(idx_dtype)
    b_codes = np.ascontiguousarray(b_ids[:, :qb].T).astype(idx_dtype)  # (qb, batch)
    gap16 = np.int16(gap)

    col = np.arange(qb + 1, dtype=np.int16).reshape(-1, 1)
    prev = np.broadcast_to(col * gap16, (qb + 1, batch)).copy()  # matrix row 0
    cur = np.empty_like(prev)
    gather = np.empty((qb, batch), dtype=idx_dtype)
    diag = np.empty((qb, batch), dtype=np.int16)
    vert = np.empty((qb, batch), dtype=np.int16)
    chain = np.empty(batch, dtype=np.int16)
    result = np.empty(batch, dtype=np.int32)

    for i in range(1, qa + 1):
        np.add(b_codes, a_codes[:, i - 1][None, :], out=gather)
        np.take(sim_flat, gather, out=diag)
        diag += prev[:-1]
        np.add(prev[1:], gap16, out=vert)
        np.maximum(diag, vert, out=diag)  # best of diagonal and from-above
        cur[0] = i * gap
        for j in range(1, qb + 1):
            np.add(cur[j - 1], gap16, out=chain)
            np.maximum(diag[j - 1], chain, out=cur[j])
        ending = a_len == i
        if ending.any():
            result[ending] = cur[b_len[ending], np.flatnonzero(ending)]
        prev, cur = cur, prev
    return result


def _score_range(
    ids: np.ndarray,
    lengths: np.ndarray,
    sim: np.ndarray,
    gap: int,
    n: int,
    start: int,
    end: int,
) -> tuple[bytes, int, int, int]:
    """Score edges [start, end); returns (payload bytes, sum, min, max)."""
    idx = np.arange(start, end, dtype=np.int64)
    rows = rows_of_array(idx, n)
    cols = cols_of_array(idx, n, rows)
    scores = _nw_batch(ids[rows], lengths[rows], ids[cols], lengths[cols], sim, gap)
    return (
        scores.astype(np.int8).tobytes(),
        int(scores.sum(dtype=np.int64)),
        int(scores.min()),
        int(scores.max()),
    )


_WORKER_STATE: tuple | None = None


def _init_worker(ids, lengths, sim, gap, n) -> None:
    global _WORKER_STATE
    _WORKER_STATE = (ids, lengths, sim, gap, n)


def _worker_score(bounds: tuple[int, int]) -> tuple[bytes, int, int, int]:
    ids, lengths, sim, gap, n = _WORKER_STATE
    return _score_range(ids, lengths, sim, gap, n, bounds[0], bounds[1])


def _pool_context():
    try:
        return multiprocessing.get_context("fork")
    except ValueError:  # pragma: no cover - non-fork platforms
        return multiprocessing.get_context()


def compute_all_pairs(
    words: Sequence[EncodedWord],
    scheme: ScoringScheme,
    sink,
    plan: ComputePlan | None = None,
) -> ComputeStats:
    """Compute every upper-triangular edge score and write it through the sink.

    The payload is byte-identical for any chunk size and worker count.  On
    failure the sink is aborted so the manifest carries the partial-output
    marker.
    """
    n = len(words)
    q = preflight_range_check(words, scheme)
    if plan is None:
        plan = ComputePlan(n=n, scheme=scheme)
    if plan.n != n:
        raise ValueError(f"plan is for n={plan.n}, got {n} words")
    if plan.scheme != scheme:
        raise ValueError("plan scheme differs from the scheme argument")

    ids, lengths = _pack_words(words, q)
    sim = _similarity_matrix(scheme, int(ids.max()) + 1)
    gap = scheme.gap

    total = num_edges(n)
    edges = 0
    score_sum = 0
    score_min = 127
    score_max = -128
    started = time.perf_counter()
    try:
        if plan.worker_count == 1:
            results = (
                _score_range(ids, lengths, sim, gap, n, start, end)
                for start, end in plan.chunks()
            )
            for payload, chunk_sum, chunk_min, chunk_max in results:
                sink.write(payload)
                edges += len(payload)
                score_sum += chunk_sum
                score_min = min(score_min, chunk_min)
                score_max = max(score_max, chunk_max)
        else:
            ctx = _pool_context()
            with ctx.Pool(
                processes=plan.worker_count,
                initializer=_init_worker,
                initargs=(ids, lengths, sim, gap, n),
            ) as pool:
                # imap preserves submission order: chunks commit in sequence
                for payload, chunk_sum, chunk_min, chunk_max in pool.imap(
                    _worker_score, plan.chunks(), chunksize=1
                ):
                    sink.write(payload)
                    edges += len(payload)
                    score_sum += chunk_sum
                    score_min = min(score_min, chunk_min)
                    score_max = max(score_max, chunk_max)
    except Exception:
        sink.abort()
        raise
    wall = time.perf_counter() - started
    if edges != total:
        sink.abort()
        raise DataError(f"wrote {edges} edges, expected {total}")
    return ComputeStats(
        edges_written=edges,
        wall_time=wall,
        min_score=score_min,
        max_score=score_max,
        mean_score=score_sum / edges,
    )
