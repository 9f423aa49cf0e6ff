"""Binary edge-weight store: headerless i8 payload plus a text manifest.

The payload file holds exactly n(n-1)/2 signed 8-bit scores; the byte at
offset ``idx`` is the weight of the edge with linear index ``idx`` (row-major
upper-triangular order), so random access is pure offset arithmetic.  A
human-readable ``key<TAB>value`` manifest binds the payload to its corpus
and scoring scheme via 64-bit streaming checksums and carries a completeness
flag: readers refuse stores from aborted runs unless forced.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .aligner import ScoringScheme
from .corpus import EncodedWord
from .errors import DataError
from .triangle import cols_of_array, index_of, num_edges, rows_of_array

__all__ = [
    "FORMAT_VERSION",
    "PAYLOAD_SUFFIX",
    "MANIFEST_SUFFIX",
    "EdgeStoreManifest",
    "EdgeStoreWriter",
    "EdgeStore",
    "write_store",
    "words_digest",
    "normalize",
    "Histogram",
    "histogram",
]

FORMAT_VERSION = 1
PAYLOAD_SUFFIX = ".nwedges"
MANIFEST_SUFFIX = ".nwedges.manifest"

_MANIFEST_KEYS = (
    "format_version",
    "n",
    "num_edges",
    "match",
    "mismatch",
    "gap",
    "scheme_hash",
    "words_digest",
    "payload_digest",
    "complete",
)


def _paths(prefix: str | Path) -> tuple[Path, Path]:
    prefix = Path(prefix)
    if prefix.name.endswith(PAYLOAD_SUFFIX):
        payload = prefix
    else:
        payload = prefix.with_name(prefix.name + PAYLOAD_SUFFIX)
    return payload, payload.with_name(payload.name + ".manifest")


def words_digest(words: Sequence[EncodedWord]) -> str:
    """64-bit streaming checksum of the ordered word+ipa list."""
    h = hashlib.blake2b(digest_size=8)
    for w in words:
        h.update(f"{w.word}\t{w.ipa}\n".encode())
    return h.hexdigest()


def normalize(score: int, len_a: int, len_b: int) -> float:
    """Length-independent edge weight: 100 * score / max(len_a, len_b)."""
    if len_a < 1 or len_b < 1:
        raise ValueError("word lengths must be >= 1")
    return 100 * score / max(len_a, len_b)


@dataclass
class EdgeStoreManifest:
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

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for key in _MANIFEST_KEYS:
                value = getattr(self, key)
                if isinstance(value, bool):
                    value = "true" if value else "false"
                fh.write(f"{key}\t{value}\n")

    @classmethod
    def load(cls, path: str | Path) -> "EdgeStoreManifest":
        pairs: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                key, sep, value = line.partition("\t")
                if not sep:
                    raise DataError(f"{path}: line {lineno}: expected 'key<TAB>value'")
                pairs[key] = value
        missing = [k for k in _MANIFEST_KEYS if k not in pairs]
        if missing:
            raise DataError(f"{path}: missing manifest keys: {', '.join(missing)}")
        try:
            manifest = cls(
                format_version=int(pairs["format_version"]),
                n=int(pairs["n"]),
                num_edges=int(pairs["num_edges"]),
                match=int(pairs["match"]),
                mismatch=int(pairs["mismatch"]),
                gap=int(pairs["gap"]),
                scheme_hash=pairs["scheme_hash"],
                words_digest=pairs["words_digest"],
                payload_digest=pairs["payload_digest"],
                complete=pairs["complete"] == "true",
            )
        except ValueError as exc:
            raise DataError(f"{path}: malformed manifest field: {exc}") from None
        if manifest.num_edges != num_edges(manifest.n):
            raise DataError(
                f"{path}: num_edges {manifest.num_edges} does not match n={manifest.n}"
            )
        return manifest


class EdgeStoreWriter:
    """Exclusive single writer for a new store.

    Payload chunks are appended with ``write``; ``finalize`` verifies the
    total length and writes the manifest last with complete=true.  ``abort``
    (called automatically if the ``with`` block fails) leaves the manifest
    marked complete=false so readers reject the partial output.
    """

    def __init__(self, prefix: str | Path, words: Sequence[EncodedWord], scheme: ScoringScheme):
        self.payload_path, self.manifest_path = _paths(prefix)
        self.n = len(words)
        self.expected_bytes = num_edges(self.n)
        self._scheme = scheme
        self._words_digest = words_digest(words)
        self._digest = hashlib.blake2b(digest_size=8)
        self._written = 0
        self._fh = open(self.payload_path, "wb")
        self._closed = False

    def write(self, data: bytes) -> None:
        if self._closed:
            raise ValueError("writer is closed")
        self._fh.write(data)
        self._digest.update(data)
        self._written += len(data)
        if self._written > self.expected_bytes:
            raise DataError(
                f"payload overflow: {self._written} bytes written, "
                f"expected {self.expected_bytes}"
            )

    def _manifest(self, complete: bool) -> EdgeStoreManifest:
        return EdgeStoreManifest(
            format_version=FORMAT_VERSION,
            n=self.n,
            num_edges=self.expected_bytes,
            match=self._scheme.match,
            mismatch=self._scheme.mismatch,
            gap=self._scheme.gap,
            scheme_hash=self._scheme.hash_hex(),
            words_digest=self._words_digest,
            payload_digest=self._digest.hexdigest(),
            complete=complete,
        )

    def finalize(self) -> EdgeStoreManifest:
        if self._closed:
            raise ValueError("writer is closed")
        self._fh.close()
        self._closed = True
        if self._written != self.expected_bytes:
            manifest = self._manifest(complete=False)
            manifest.save(self.manifest_path)
            raise DataError(
                f"payload length mismatch: {self._written} bytes written, "
                f"expected {self.expected_bytes}; store marked incomplete"
            )
        manifest = self._manifest(complete=True)
        manifest.save(self.manifest_path)
        return manifest

    def abort(self) -> None:
        if self._closed:
            return
        self._fh.close()
        self._closed = True
        self._manifest(complete=False).save(self.manifest_path)

    def __enter__(self) -> "EdgeStoreWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if not self._closed:
            if exc_type is None:
                self.finalize()
            else:
                self.abort()


def write_store(
    prefix: str | Path,
    words: Sequence[EncodedWord],
    scheme: ScoringScheme,
    payload: bytes | Iterable[bytes],
) -> EdgeStoreManifest:
    """One-shot store write from an in-memory payload or chunk iterable."""
    writer = EdgeStoreWriter(prefix, words, scheme)
    try:
        if isinstance(payload, (bytes, bytearray, memoryview)):
            writer.write(bytes(payload))
        else:
            for chunk in payload:
                writer.write(chunk)
        return writer.finalize()
    except Exception:
        writer.abort()
        raise


class EdgeStore:
    """Read-only view of a written store.

    Uses positional reads on a shared file descriptor, so one instance can
    serve any number of concurrent readers.
    """

    def __init__(self, prefix: str | Path, force: bool = False):
        self.payload_path, self.manifest_path = _paths(prefix)
        self.manifest = EdgeStoreManifest.load(self.manifest_path)
        if not self.manifest.complete and not force:
            raise DataError(
                f"{self.payload_path}: store is marked incomplete (aborted run); "
                "pass force=True to read anyway"
            )
        self.n = self.manifest.n
        self.num_edges = self.manifest.num_edges
        actual = os.path.getsize(self.payload_path)
        if self.manifest.complete and actual != self.num_edges:
            raise DataError(
                f"{self.payload_path}: payload is {actual} bytes, "
                f"manifest says {self.num_edges}"
            )
        self._fd = os.open(self.payload_path, os.O_RDONLY)
        self._size = actual

    @property
    def complete(self) -> bool:
        return self.manifest.complete

    def close(self) -> None:
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None

    def __enter__(self) -> "EdgeStore":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def check_words(self, words: Sequence[EncodedWord]) -> None:
        """Verify that a word list is the one this store was computed from."""
        if len(words) != self.n:
            raise DataError(f"word list has {len(words)} entries, store has n={self.n}")
        digest = words_digest(words)
        if digest != self.manifest.words_digest:
            raise DataError(
                f"word list digest {digest} does not match manifest "
                f"{self.manifest.words_digest}"
            )

    def read_weight(self, r: int, c: int) -> int:
        """Score of edge (r, c), sign-extended from its payload byte."""
        idx = index_of(r, c, self.n)  # validates 0 <= r < c <= n-1
        data = os.pread(self._fd, 1, idx)
        if len(data) != 1:
            raise DataError(f"{self.payload_path}: short read at offset {idx}")
        return int.from_bytes(data, "little", signed=True)

    def iter_blocks(self, block_edges: int = 1 << 22) -> Iterator[tuple[int, np.ndarray]]:
        """Stream the payload as (start_index, int8 array) blocks."""
        offset = 0
        while offset < self._size:
            data = os.pread(self._fd, min(block_edges, self._size - offset), offset)
            if not data:
                break
            yield offset, np.frombuffer(data, dtype=np.int8)
            offset += len(data)

    def verify_payload(self) -> bool:
        """Recompute the payload checksum against the manifest (full scan)."""
        h = hashlib.blake2b(digest_size=8)
        for _, block in self.iter_blocks():
            h.update(block.tobytes())
        return h.hexdigest() == self.manifest.payload_digest


# normalized weights lie in [-12800, 12700] even for degenerate length-1
# words at the i8 extremes; raw scores use the same span for one code path
_HIST_OFFSET = -12800
_HIST_SPAN = 25501


@dataclass(frozen=True)
class Histogram:
    """Width-1 integer bins over raw or normalized edge weights.

    ``bin_edges`` has len(counts)+1 entries (left edges plus final right
    edge).  ``mean`` is the exact mean of the binned integer values, which
    for raw scores is the true mean score.
    """

    bin_edges: tuple[int, ...]
    counts: tuple[int, ...]
    total: int
    mean: float
    min: int
    max: int
    normalized: bool


def histogram(store: EdgeStore, words: Sequence[EncodedWord], normalized: bool = False) -> Histogram:
    """Single streaming pass over the store; exact totals.

    Normalized weights are binned by floor (computed in exact integer
    arithmetic, never floating point).
    """
    if not store.complete:
        raise DataError("cannot build a histogram over an incomplete store")
    store.check_words(words)
    lengths = np.array([len(w.phonemes) for w in words], dtype=np.int64)
    counts = np.zeros(_HIST_SPAN, dtype=np.int64)
    total = 0
    value_sum = 0
    for start, block in store.iter_blocks():
        if normalized:
            idx = np.arange(start, start + block.size, dtype=np.int64)
            rows = rows_of_array(idx, store.n)
            cols = cols_of_array(idx, store.n, rows)
            max_len = np.maximum(lengths[rows], lengths[cols])
            values = np.floor_divide(100 * block.astype(np.int64), max_len)
        else:
            values = block.astype(np.int64)
        counts += np.bincount(values - _HIST_OFFSET, minlength=_HIST_SPAN)
        total += block.size
        value_sum += int(values.sum())
    if total != store.num_edges:
        raise DataError(f"scanned {total} edges, expected {store.num_edges}")
    nonzero = np.flatnonzero(counts)
    lo = int(nonzero[0]) + _HIST_OFFSET
    hi = int(nonzero[-1]) + _HIST_OFFSET
    trimmed = counts[lo - _HIST_OFFSET : hi - _HIST_OFFSET + 1]
    return Histogram(
        bin_edges=tuple(range(lo, hi + 2)),
        counts=tuple(int(c) for c in trimmed),
        total=total,
        mean=value_sum / total,
        min=lo,
        max=hi,
        normalized=normalized,
    )
